//! Ensemble checks of the functionals: chaos expansions, variance formulas
//! on S^3 and distance-to-Gaussian trends.

use sphere_chaos::cli::{chaos_expansion, correlation};
use sphere_chaos::functionals::{indicator_coeffs, indicator_tail_variance};
use sphere_chaos::moments::projection_variance;
use sphere_chaos::specfun::{gauss_sf, sphere_measure};
use sphere_chaos::stats::{run_ensemble_multi, Functional};

fn indicator_with_projections(truncation: usize) -> Vec<Functional> {
    let mut fs = vec![Functional::Excursion { z: 1.0 }];
    fs.extend((1..=truncation).map(|q| Functional::Projection { q }));
    fs
}

#[test]
fn truncated_expansion_tracks_excursion_volume() {
    let ell = 32;
    let all = run_ensemble_multi(2, ell, 4 * ell, &indicator_with_projections(8), 2000, 21).unwrap();
    let c = indicator_coeffs(1.0, 8).unwrap();
    let expansion = chaos_expansion(c.coeffs(), &all[1..]);
    let r = correlation(&all[0].values, &expansion);
    assert!(r > 0.99, "{r}");
}

#[test]
fn truncation_error_matches_tail_bound() {
    // The mean squared remainder of the Q = 8 expansion equals the tail sum in
    // expectation; allow for Monte Carlo and grid error.
    let ell = 32;
    let reps = 2000;
    let all = run_ensemble_multi(2, ell, 8 * ell, &indicator_with_projections(8), reps, 22).unwrap();
    let c = indicator_coeffs(1.0, 8).unwrap();
    let expansion = chaos_expansion(c.coeffs(), &all[1..]);
    let mean = sphere_measure(2) * gauss_sf(1.0);
    let mse = all[0]
        .values
        .iter()
        .zip(&expansion)
        .map(|(s, e)| (s - mean - e).powi(2))
        .sum::<f64>()
        / reps as f64;
    let tail = indicator_tail_variance(1.0, ell, 2, 8, 400).unwrap();
    println!("mean squared remainder {mse:e}, tail bound {tail:e}");
    assert!(mse <= 1.25 * tail && mse >= 0.75 * tail);
}

#[test]
fn quadratic_projection_variance_on_s3() {
    for ell in [2, 4, 8] {
        let s = &run_ensemble_multi(3, ell, 40, &[Functional::Projection { q: 2 }], 2000, 23).unwrap()[0];
        let target = projection_variance(ell, 2, 3).unwrap();
        let dev = (s.variance - target).abs() / s.variance_stderr();
        println!("d=3 ell={ell}: {} vs {target} ({dev:.2} se), ks {:.4}", s.variance, s.ks_to_normal.unwrap());
        assert!(dev <= 3.0);
        if ell == 8 {
            assert!(s.ks_to_normal.unwrap() <= 0.07);
        }
    }
}

#[test]
fn excluded_pairs_are_reported() {
    for (q, d) in [(3, 3), (4, 3), (5, 3)] {
        for ell in [4, 8] {
            let s = &run_ensemble_multi(d, ell, 40, &[Functional::Projection { q }], 500, 24).unwrap()[0];
            let k = s.excess_kurtosis().unwrap();
            println!("(q,d)=({q},{d}) ell={ell}: ks {:.4}, cum4/var^2 {k:.3}", s.ks_to_normal.unwrap());
            assert!(k.is_finite());
        }
    }
}

#[test]
fn gaussian_distances_shrink_with_degree() {
    // 20000 replicates: at 2000 the trends are below the Monte Carlo noise.
    let fs = [Functional::Excursion { z: 1.0 }, Functional::Projection { q: 3 }];
    let mut w1 = Vec::new();
    let mut k3 = Vec::new();
    for ell in [32, 64, 128] {
        let s = run_ensemble_multi(2, ell, 2 * ell, &fs, 20_000, 25 + ell as u64).unwrap();
        w1.push(s[0].w1_to_normal.unwrap());
        k3.push(s[1].excess_kurtosis().unwrap());
    }
    println!("w1 of S(1): {w1:?}; cum4/var^2 of h_3: {k3:?}");
    assert!(w1[2] < w1[0]);
    assert!(k3[0] > k3[1] && k3[1] > k3[2]);
}
