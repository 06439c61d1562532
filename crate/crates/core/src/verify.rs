//! Acceptance batteries, shared by `--verify` and the acceptance test target.

use std::f64::consts::PI;
use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;

use crate::cli::{execute, CommandKind, Format, RunArgs, RunConfig};
use crate::error::Result;
use crate::field::seed::{replicate_seed, stream};
use crate::functionals::indicator_coeffs;
use crate::moments::{asymptotic_constant, moment_integral, projection_variance};
use crate::specfun::{gauss_sf, gegenbauer_eval, GegenbauerSpec};
use crate::stats::{rate_fit, run_ensemble_multi, Functional};

/// Master seed of every Monte Carlo battery; ensembles at degree `ell` use
/// `replicate_seed(MASTER_SEED, ell)`.
pub const MASTER_SEED: u64 = 1;

pub const CRITERIA: usize = 11;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{:>2}] {}: {} ({:.2} s, budget {} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )
    }
}

fn timed(id: usize, title: &'static str, budget_secs: u64, f: impl FnOnce() -> Result<(bool, String)>) -> Outcome {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget_secs);
    let (ok, mut detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
    if elapsed > budget {
        detail.push_str("; over runtime budget");
    }
    Outcome {
        id,
        title,
        passed: ok && elapsed <= budget,
        detail,
        elapsed,
        budget,
    }
}

pub fn run(id: usize) -> Outcome {
    match id {
        1 => gegenbauer_correctness(),
        2 => orthogonality(),
        3 => decay_rates(),
        4 => log_constant(),
        5 => two_route_constants(),
        6 => variance_formula(),
        7 => excursion_mean(),
        8 => rank_two_equivalence(),
        9 => clt_battery(),
        10 => defect_battery(),
        11 => determinism(),
        _ => panic!("no criterion {id}"),
    }
}

pub fn run_all() -> Vec<Outcome> {
    (1..=CRITERIA).map(run).collect()
}

fn ensemble_seed(ell: usize) -> u64 {
    replicate_seed(MASTER_SEED, ell as u64)
}

/// `P_n(cos t) = sum_k a_k a_{n-k} cos((n - 2k) t)` with `a_k = binom(2k, k) / 4^k`.
fn legendre_cosine_series(n: usize, theta: f64) -> f64 {
    let mut a = vec![1.0; n + 1];
    for k in 1..=n {
        a[k] = a[k - 1] * (2 * k - 1) as f64 / (2 * k) as f64;
    }
    (0..=n)
        .map(|k| a[k] * a[n - k] * ((n as f64 - 2.0 * k as f64) * theta).cos())
        .sum()
}

pub fn gegenbauer_correctness() -> Outcome {
    timed(1, "gegenbauer correctness", 1, || {
        let mut rng = stream(MASTER_SEED);
        let ts: Vec<f64> = (0..100).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let mut worst = 0.0f64;
        for ell in 0..=100 {
            let g2 = GegenbauerSpec::new(ell, 2)?;
            let g3 = GegenbauerSpec::new(ell, 3)?;
            for &t in &ts {
                let theta = t.acos();
                let k = (ell + 1) as f64;
                let chebyshev = (k * theta).sin() / (k * theta.sin());
                worst = worst
                    .max((gegenbauer_eval(&g2, t)? - legendre_cosine_series(ell, theta)).abs())
                    .max((gegenbauer_eval(&g3, t)? - chebyshev).abs());
            }
        }
        Ok((worst <= 1e-10, format!("max abs error {worst:.3e} (tol 1e-10)")))
    })
}

pub fn orthogonality() -> Outcome {
    timed(2, "orthogonality", 10, || {
        let mut worst = 0.0f64;
        for ell in (0..=200).step_by(2) {
            worst = worst.max((moment_integral(ell, 2, 2)? - 1.0 / (2 * ell + 1) as f64).abs());
        }
        Ok((worst <= 1e-9, format!("max abs error {worst:.3e} (tol 1e-9)")))
    })
}

const RATE_DEGREES: [usize; 4] = [64, 128, 256, 512];

fn slope(q: usize, d: usize) -> Result<f64> {
    let pairs = RATE_DEGREES
        .iter()
        .map(|&l| Ok((l as f64, moment_integral(l, q, d)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(rate_fit(&pairs)?.slope)
}

pub fn decay_rates() -> Outcome {
    timed(3, "decay rates", 120, || {
        let mut ok = true;
        let mut parts = Vec::new();
        for (q, d) in [(3, 2), (5, 2), (3, 3), (4, 3)] {
            let s = slope(q, d)?;
            ok &= (s + d as f64).abs() <= 0.1;
            parts.push(format!("({q},{d}) {s:.4}"));
        }
        for d in [2, 3, 4] {
            let s = slope(2, d)?;
            ok &= (s + (d - 1) as f64).abs() <= 0.05;
            parts.push(format!("(2,{d}) {s:.4}"));
        }
        Ok((ok, format!("slopes {}", parts.join(", "))))
    })
}

pub fn log_constant() -> Outcome {
    timed(4, "log-case constant c_{4;2}", 60, || {
        let ell = 1024usize;
        let l = ell as f64;
        let scaled = moment_integral(ell, 4, 2)? * l * l / l.ln();
        let target = 1.5 / (PI * PI);
        let rel = (scaled / target - 1.0).abs();
        Ok((
            rel <= 0.15,
            format!("ell^2/log(ell) * integral = {scaled:.6} vs {target:.6}, rel err {rel:.3} (tol 0.15)"),
        ))
    })
}

pub fn two_route_constants() -> Outcome {
    timed(5, "two-route constants", 120, || {
        let ell = 512usize;
        let mut ok = true;
        let mut parts = Vec::new();
        for (q, d) in [(3, 2), (5, 2), (3, 3), (4, 3)] {
            let c = asymptotic_constant(q, d)?;
            let scaled = moment_integral(ell, q, d)? * (ell as f64).powi(d as i32);
            if c.abs() >= 1e-3 {
                let rel = (scaled / c - 1.0).abs();
                ok &= rel <= 0.05;
                parts.push(format!("({q},{d}) c={c:.6} rel {rel:.4}"));
            } else {
                parts.push(format!("({q},{d}) c={c:.2e} skipped"));
            }
        }
        Ok((ok, parts.join(", ")))
    })
}

pub fn variance_formula() -> Outcome {
    timed(6, "projection variance formula", 120, || {
        let ell = 10;
        let s = &run_ensemble_multi(2, ell, 64, &[Functional::Projection { q: 2 }], 5000, ensemble_seed(ell))?[0];
        let target = projection_variance(ell, 2, 2)?;
        let se = s.variance_stderr();
        let dev = (s.variance - target).abs() / se;
        Ok((
            dev <= 3.0,
            format!("MC variance {:.4} +- {se:.4} vs {target:.4} ({dev:.2} se)", s.variance),
        ))
    })
}

pub fn excursion_mean() -> Outcome {
    timed(7, "excursion mean", 60, || {
        let ell = 8;
        let s = &run_ensemble_multi(2, ell, 32, &[Functional::Excursion { z: 1.0 }], 2000, ensemble_seed(ell))?[0];
        let target = 4.0 * PI * gauss_sf(1.0);
        let dev = (s.mean - target).abs() / s.mean_stderr();
        Ok((
            dev <= 3.0,
            format!("mean {:.5} +- {:.5} vs {target:.5} ({dev:.2} se)", s.mean, s.mean_stderr()),
        ))
    })
}

pub fn rank_two_equivalence() -> Outcome {
    timed(8, "hermite-rank-2 variance equivalence", 300, || {
        let ell = 128;
        let fs = [Functional::Excursion { z: 1.0 }, Functional::Projection { q: 2 }];
        let s = run_ensemble_multi(2, ell, 2 * ell, &fs, 2000, ensemble_seed(ell))?;
        let j2 = indicator_coeffs(1.0, 2)?.coeffs()[2];
        let ratio = s[0].variance / (0.25 * j2 * j2 * s[1].variance);
        Ok((
            (0.85..=1.15).contains(&ratio),
            format!("Var[S]/Var[(J_2/2) h_2] = {ratio:.4} at ell = {ell} (range [0.85, 1.15])"),
        ))
    })
}

const CLT_DEGREES: [usize; 3] = [32, 64, 128];

fn monotone_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" > ")
}

pub fn clt_battery() -> Outcome {
    timed(9, "CLT battery", 600, || {
        let fs = [
            Functional::Excursion { z: 1.0 },
            Functional::Projection { q: 2 },
            Functional::Projection { q: 3 },
        ];
        let mut ks = vec![Vec::new(); fs.len()];
        for &ell in &CLT_DEGREES {
            let s = run_ensemble_multi(2, ell, 2 * ell, &fs, 2000, ensemble_seed(ell))?;
            for (k, summary) in s.iter().enumerate() {
                ks[k].push(summary.ks_to_normal.unwrap());
            }
        }
        let mut ok = true;
        let mut parts = Vec::new();
        for (name, v) in ["S(1)", "h_2", "h_3"].iter().zip(&ks) {
            let bound = v[2] <= 0.05;
            let mono = monotone_decreasing(v);
            ok &= bound && mono;
            parts.push(format!(
                "{name} ks {}{}{}",
                fmt_list(v),
                if bound { "" } else { " [above 0.05]" },
                if mono { "" } else { " [not monotone]" }
            ));
        }
        Ok((ok, parts.join("; ")))
    })
}

/// Latitudes per degree for the defect; the sign functional needs a finer grid
/// than the smooth functionals.
pub const DEFECT_RESOLUTION_FACTOR: usize = 8;

pub fn defect_battery() -> Outcome {
    timed(10, "defect", 600, || {
        let bound = 32.0 / 27f64.sqrt();
        let mut ok = true;
        let mut parts = Vec::new();
        let mut last_ks = 1.0;
        for &ell in &CLT_DEGREES {
            let res = DEFECT_RESOLUTION_FACTOR * ell;
            let s = &run_ensemble_multi(2, ell, res, &[Functional::Defect], 2000, ensemble_seed(ell))?[0];
            let dev = s.mean.abs() / s.mean_stderr();
            let scaled = (ell * ell) as f64 * s.variance;
            ok &= dev <= 3.0 && scaled > bound;
            last_ks = s.ks_to_normal.unwrap();
            parts.push(format!("ell {ell}: mean {dev:.2} se, ell^2 Var {scaled:.3}"));
        }
        ok &= last_ks <= 0.07;
        parts.push(format!("ks at 128 {last_ks:.4} (tol 0.07), bound {bound:.3}"));
        Ok((ok, parts.join("; ")))
    })
}

fn cli_args(ell: &[usize], q: Option<usize>, reps: usize, seed: u64) -> RunArgs {
    RunArgs {
        d: 2,
        q,
        truncation: 8,
        ell: ell.to_vec(),
        z: 1.0,
        reps,
        res: None,
        seed,
        output: None,
        format: Format::Csv,
        dump: None,
    }
}

fn render(cfg: &RunConfig, format: Format) -> std::result::Result<Vec<u8>, String> {
    let rows = execute(cfg).map_err(|e| e.to_string())?;
    let mut buf = Vec::new();
    crate::cli::write_rows(&rows, format, &mut buf).map_err(|e| e.to_string())?;
    Ok(buf)
}

pub fn determinism() -> Outcome {
    timed(11, "CLI determinism", 600, || {
        let runs = [
            (CommandKind::Constants, cli_args(&[], Some(4), 2, 0)),
            (CommandKind::Moments, cli_args(&[10, 20, 40], Some(3), 2, 0)),
            (CommandKind::Simulate, cli_args(&[8, 16], None, 2, 3)),
            (CommandKind::Clt, cli_args(&[32, 64, 128], Some(2), 2000, 7)),
            (CommandKind::Excursion, cli_args(&[16, 32], None, 400, 5)),
            (CommandKind::Defect, cli_args(&[16, 32], None, 400, 9)),
        ];
        let mut failures = Vec::new();
        for (command, args) in runs {
            let cfg = match RunConfig::new(command, args) {
                Ok(cfg) => cfg,
                Err(e) => {
                    failures.push(format!("{command:?}: {e}"));
                    continue;
                }
            };
            for format in [Format::Csv, Format::Json] {
                let a = render(&cfg, format);
                let b = render(&cfg, format);
                if a.is_err() || a != b {
                    failures.push(format!("{command:?} {format:?}"));
                }
            }
        }
        let ok = failures.is_empty();
        let detail = if ok {
            "6 commands x 2 formats byte-identical".to_string()
        } else {
            format!("differs: {}", failures.join(", "))
        };
        Ok((ok, detail))
    })
}
