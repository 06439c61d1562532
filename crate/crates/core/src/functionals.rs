//! Nonlinear functionals of a field sample: excursion volume, defect,
//! chaotic projections and truncated chaos expansions.

use crate::error::{Error, Result};
use crate::field::FieldSample;
use crate::moments::projection_variance_over_factorial;
use crate::specfun::{gauss_pdf, gauss_sf, hermite_all, hermite_eval, hermite_normalized, sphere_measure};

/// Default truncation order for indicator expansions.
pub const DEFAULT_TRUNCATION: usize = 8;

/// Hermite coefficients `J_0..=J_Q` of a nonlinearity `M`, `J_q = E[M(Z) H_q(Z)]`.
///
/// The expansion itself starts at `q = 1`; `J_0` is kept only for the mean.
#[derive(Debug, Clone, PartialEq)]
pub struct ChaosCoefficients {
    coeffs: Vec<f64>,
    rank: Option<usize>,
}

impl ChaosCoefficients {
    /// `coeffs[q] = J_q`; needs at least `J_0, J_1, J_2`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() < 3 {
            return Err(Error::domain("truncation", coeffs.len() as f64 - 1.0, "Q >= 2"));
        }
        let rank = coeffs.iter().skip(1).position(|&c| c != 0.0).map(|i| i + 1);
        Ok(Self { coeffs, rank })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Hermite rank: smallest `q >= 1` with `J_q != 0`.
    pub fn rank(&self) -> Option<usize> {
        self.rank
    }

    /// `J_Q^2 / Q!`, the last retained term of `sum_q J_q^2 / q!`.
    pub fn last_term(&self) -> f64 {
        let q = self.truncation();
        let fact: f64 = (1..=q).map(|k| k as f64).product();
        self.coeffs[q] * self.coeffs[q] / fact
    }

    /// Whether the last retained term is below `tolerance`.
    pub fn is_truncation_adequate(&self, tolerance: f64) -> bool {
        self.last_term() < tolerance
    }
}

/// Chaos coefficients of `1(. > z)`: `J_0 = 1 - Phi(z)`, `J_q = H_{q-1}(z) phi(z)`.
pub fn indicator_coeffs(z: f64, truncation: usize) -> Result<ChaosCoefficients> {
    let pdf = gauss_pdf(z);
    let mut coeffs = Vec::with_capacity(truncation + 1);
    coeffs.push(gauss_sf(z));
    coeffs.extend((1..=truncation).map(|q| hermite_eval(q - 1, z) * pdf));
    ChaosCoefficients::new(coeffs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionalKind {
    Excursion { z: f64 },
    Defect,
    Projection { q: usize },
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalValue {
    pub kind: FunctionalKind,
    pub value: f64,
    /// `value` minus its analytic mean.
    pub centered: f64,
}

/// Grid estimate of the volume of `{x : T(x) > z}`.
pub fn excursion_volume(sample: &FieldSample, z: f64) -> FunctionalValue {
    let w = sample.grid.weights();
    let value: f64 = sample
        .values
        .iter()
        .zip(w)
        .filter(|(v, _)| **v > z)
        .map(|(_, w)| w)
        .sum();
    let mean = sphere_measure(sample.grid.d()) * gauss_sf(z);
    FunctionalValue {
        kind: FunctionalKind::Excursion { z },
        value,
        centered: value - mean,
    }
}

/// Positive minus negative volume; nodes with value exactly 0 contribute nothing.
pub fn defect(sample: &FieldSample) -> FunctionalValue {
    let value: f64 = sample
        .values
        .iter()
        .zip(sample.grid.weights())
        .map(|(&v, &w)| {
            if v > 0.0 {
                w
            } else if v < 0.0 {
                -w
            } else {
                0.0
            }
        })
        .sum();
    FunctionalValue {
        kind: FunctionalKind::Defect,
        value,
        centered: value,
    }
}

/// `h_{ell;q,d} = int H_q(T(x)) dx` by grid quadrature.
pub fn hermite_projection(sample: &FieldSample, q: usize) -> FunctionalValue {
    let value: f64 = sample
        .values
        .iter()
        .zip(sample.grid.weights())
        .map(|(&v, &w)| w * hermite_eval(q, v))
        .sum();
    let centered = if q == 0 {
        value - sphere_measure(sample.grid.d())
    } else {
        value
    };
    FunctionalValue {
        kind: FunctionalKind::Projection { q },
        value,
        centered,
    }
}

/// `h_{ell;q,d}` for `q = 0..=max_q` in one pass over the nodes.
pub fn hermite_projections(sample: &FieldSample, max_q: usize) -> Vec<f64> {
    let mut out = vec![0.0; max_q + 1];
    let mut h = vec![0.0; max_q + 1];
    for (&v, &w) in sample.values.iter().zip(sample.grid.weights()) {
        hermite_all(v, &mut h);
        for (o, hq) in out.iter_mut().zip(&h) {
            *o += w * hq;
        }
    }
    out
}

/// Truncated expansion `sum_{q=1}^{Q} (J_q / q!) h_{ell;q,d}`.
pub fn generic_functional(sample: &FieldSample, coeffs: &ChaosCoefficients) -> Result<FunctionalValue> {
    if coeffs.rank().is_none() {
        return Err(Error::RankUndefined);
    }
    let h = hermite_projections(sample, coeffs.truncation());
    let mut fact = 1.0;
    let mut value = 0.0;
    for (q, (&j, &hq)) in coeffs.coeffs().iter().zip(&h).enumerate().skip(1) {
        fact *= q as f64;
        value += j / fact * hq;
    }
    Ok(FunctionalValue {
        kind: FunctionalKind::Generic,
        value,
        centered: value,
    })
}

/// Expected squared truncation error of the indicator expansion at level `z`:
/// `sum_{q=Q+1}^{max_q} J_q^2 Var[h_{ell;q,d}] / q!^2`, `ell` even.
pub fn indicator_tail_variance(z: f64, ell: usize, d: usize, truncation: usize, max_q: usize) -> Result<f64> {
    let pdf = gauss_pdf(z);
    let mut total = 0.0;
    for q in (truncation + 1)..=max_q {
        // J_q^2 / q! = phi^2 H_{q-1}^2 / q! = phi^2 Htilde_{q-1}^2 / q
        let hn = hermite_normalized(q - 1, z);
        let coeff = pdf * pdf * hn * hn / q as f64;
        total += coeff * projection_variance_over_factorial(ell, q, d)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use proptest::prelude::*;

    use super::*;
    use crate::field::{build_grid, simulate_s2, SphereGrid};

    fn sample(ell: usize, res: usize, seed: u64) -> FieldSample {
        let grid = Arc::new(build_grid(2, res).unwrap());
        simulate_s2(ell, &grid, seed).unwrap()
    }

    #[test]
    fn indicator_coefficients() {
        let c = indicator_coeffs(0.0, 8).unwrap();
        assert!((c.coeffs()[1] - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert_eq!(c.coeffs()[2], 0.0);
        assert_eq!(c.rank(), Some(1));
        let c = indicator_coeffs(1.0, 8).unwrap();
        assert!((c.coeffs()[2] - 0.241_970_724_519_143_4).abs() < 1e-15);
        assert!(c.is_truncation_adequate(1e-3));
        assert_eq!(c.truncation(), 8);
    }

    #[test]
    fn indicator_coefficients_match_quadrature() {
        // J_q = int_z^inf H_q(t) phi(t) dt by composite Simpson on [z, z + 40].
        let z = 0.7;
        let c = indicator_coeffs(z, 6).unwrap();
        let n = 200_000;
        let h = 40.0 / n as f64;
        for q in 0..=6 {
            let f = |t: f64| hermite_eval(q, t) * gauss_pdf(t);
            let mut s = f(z) + f(z + 40.0);
            for i in 1..n {
                s += f(z + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            assert!((s * h / 3.0 - c.coeffs()[q]).abs() < 1e-10, "q={q}");
        }
    }

    #[test]
    fn excursion_extremes() {
        let s = sample(6, 16, 3);
        let low = excursion_volume(&s, -10.0);
        assert!((low.value - 4.0 * PI).abs() < 1e-9);
        assert_eq!(excursion_volume(&s, 10.0).value, 0.0);
    }

    #[test]
    fn defect_identity() {
        let s = sample(9, 20, 11);
        let d = defect(&s).value;
        let e = excursion_volume(&s, 0.0).value;
        let total: f64 = s.grid.weights().iter().sum();
        assert!((d - (2.0 * e - total)).abs() < 1e-12);
    }

    #[test]
    fn defect_ignores_exact_zeros() {
        let grid: Arc<SphereGrid> = Arc::new(build_grid(2, 4).unwrap());
        let mut values = vec![1.0; grid.len()];
        values[0] = 0.0;
        let w0 = grid.weights()[0];
        let total: f64 = grid.weights().iter().sum();
        let s = FieldSample {
            grid,
            values,
            ell: crate::specfun::Multipole::new(1, 2),
            seed: 0,
        };
        assert!((defect(&s).value - (total - w0)).abs() < 1e-14);
    }

    #[test]
    fn low_order_projections() {
        let s = sample(10, 32, 5);
        let h0 = hermite_projection(&s, 0);
        let total: f64 = s.grid.weights().iter().sum();
        assert_eq!(h0.value, total);
        assert!(hermite_projection(&s, 1).value.abs() < 1e-10);
        let all = hermite_projections(&s, 4);
        for q in 0..=4 {
            assert!((all[q] - hermite_projection(&s, q).value).abs() < 1e-10);
        }
    }

    #[test]
    fn generic_functional_single_terms() {
        let s = sample(12, 32, 8);
        let h2 = ChaosCoefficients::new(vec![0.0, 0.0, 2.0]).unwrap();
        let g = generic_functional(&s, &h2).unwrap();
        assert!((g.value - hermite_projection(&s, 2).value).abs() < 1e-12);
        let first = ChaosCoefficients::new(vec![0.0, 1.0, 0.0]).unwrap();
        assert!(generic_functional(&s, &first).unwrap().value.abs() < 1e-10);
        let zero = ChaosCoefficients::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(generic_functional(&s, &zero), Err(Error::RankUndefined)));
        assert_eq!(zero.rank(), None);
    }

    #[test]
    fn tail_variance_is_positive_and_shrinks_with_truncation() {
        let t8 = indicator_tail_variance(1.0, 8, 2, 8, 200).unwrap();
        let t12 = indicator_tail_variance(1.0, 8, 2, 12, 200).unwrap();
        assert!(t8 > t12 && t12 > 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn excursion_volume_is_monotone_and_bounded(seed in any::<u64>(), ell in 1usize..20, base in -3.0f64..3.0) {
            let s = sample(ell, 16, seed);
            let total = 4.0 * PI;
            let mut last = f64::INFINITY;
            for k in 0..12 {
                let v = excursion_volume(&s, base + 0.25 * k as f64).value;
                prop_assert!(v >= 0.0 && v <= total + 1e-9);
                prop_assert!(v <= last);
                last = v;
            }
            let d = defect(&s).value;
            prop_assert!(d.abs() <= total + 1e-9);
        }
    }
}
