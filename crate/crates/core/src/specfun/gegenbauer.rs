//! Normalized Gegenbauer polynomials through the symmetric Jacobi recurrence.

use libm::lgamma as ln_gamma;

use crate::error::{Error, Result};

/// Slack allowed on the argument before `|t| <= 1` is considered violated.
pub const ARGUMENT_TOLERANCE: f64 = 1e-12;

/// Degree `ell` Gegenbauer polynomial on `S^d`, normalized so that `G(1) = 1`.
///
/// Evaluation runs the three-term recurrence for the Jacobi polynomial
/// `P^{(a,a)}` with `a = d/2 - 1` and divides by the value the same
/// recurrence produces at `t = 1`, so the normalization is exact to roundoff
/// even for odd `d` where `alpha` itself goes through log-gamma.
#[derive(Debug, Clone, PartialEq)]
pub struct GegenbauerSpec {
    ell: usize,
    d: usize,
    alpha: f64,
    value_at_one: f64,
}

impl GegenbauerSpec {
    pub fn new(ell: usize, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::domain("d", d as f64, "d >= 2"));
        }
        let a = jacobi_parameter(d);
        let alpha = if d % 2 == 0 {
            (1..=ell).fold(1.0, |acc, k| acc * (k as f64 + a) / k as f64)
        } else {
            (ln_gamma(ell as f64 + a + 1.0) - ln_gamma(ell as f64 + 1.0) - ln_gamma(a + 1.0)).exp()
        };
        let value_at_one = jacobi_symmetric(ell, a, 1.0);
        if !value_at_one.is_finite() {
            return Err(Error::domain("ell", ell as f64, "P_ell(1) representable in f64"));
        }
        Ok(Self {
            ell,
            d,
            alpha,
            value_at_one,
        })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `binomial(ell + d/2 - 1, ell)`, the value of the unnormalized Jacobi polynomial at 1.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.eval_unchecked(check_argument(t)?))
    }

    /// Evaluation without the domain check, for quadrature loops whose nodes
    /// are already known to lie in `[-1, 1]`.
    #[inline]
    pub fn eval_unchecked(&self, t: f64) -> f64 {
        jacobi_symmetric(self.ell, jacobi_parameter(self.d), t) / self.value_at_one
    }

    /// `G_{k;d}(t)` for every `k = 0..=ell` from one recurrence pass.
    pub fn batch(&self, t: f64) -> Result<Vec<f64>> {
        let t = check_argument(t)?;
        let a = jacobi_parameter(self.d);
        let mut out = Vec::with_capacity(self.ell + 1);
        let (mut p_prev, mut p) = (0.0, 1.0);
        let (mut one_prev, mut one) = (0.0, 1.0);
        for n in 0..=self.ell {
            if n > 0 {
                let next = jacobi_step(n, a, t, p, p_prev);
                let next_one = jacobi_step(n, a, 1.0, one, one_prev);
                p_prev = p;
                p = next;
                one_prev = one;
                one = next_one;
            }
            out.push(p / one);
        }
        Ok(out)
    }
}

/// `G_{ell;d}(t)`.
pub fn gegenbauer_eval(spec: &GegenbauerSpec, t: f64) -> Result<f64> {
    spec.eval(t)
}

/// `G_{k;d}(t)` for `k = 0..=spec.ell()`.
pub fn gegenbauer_batch(spec: &GegenbauerSpec, t: f64) -> Result<Vec<f64>> {
    spec.batch(t)
}

fn check_argument(t: f64) -> Result<f64> {
    if t.is_nan() || t.abs() > 1.0 + ARGUMENT_TOLERANCE {
        return Err(Error::domain("t", t, "|t| <= 1"));
    }
    Ok(t.clamp(-1.0, 1.0))
}

#[inline]
fn jacobi_parameter(d: usize) -> f64 {
    d as f64 / 2.0 - 1.0
}

// One step n-2, n-1 -> n of the recurrence for P^{(a,a)}. The n = 1 case is
// special-cased because the generic coefficients degenerate when a = 0.
#[inline]
fn jacobi_step(n: usize, a: f64, t: f64, p1: f64, p2: f64) -> f64 {
    if n == 1 {
        return (a + 1.0) * t;
    }
    let nf = n as f64;
    let lead = (2.0 * nf + 2.0 * a - 1.0) * (nf + a);
    let lag = (nf + a - 1.0) * (nf + a);
    (lead * t * p1 - lag * p2) / (nf * (nf + 2.0 * a))
}

#[inline]
fn jacobi_symmetric(ell: usize, a: f64, t: f64) -> f64 {
    let (mut p_prev, mut p) = (0.0, 1.0);
    for n in 1..=ell {
        let next = jacobi_step(n, a, t, p, p_prev);
        p_prev = p;
        p = next;
    }
    p
}

/// A spherical multipole: degree together with the Laplace-Beltrami eigenvalue on `S^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Multipole {
    pub ell: usize,
    pub d: usize,
}

impl Multipole {
    pub fn new(ell: usize, d: usize) -> Self {
        Self { ell, d }
    }

    /// `E_ell = ell (ell + d - 1)`.
    pub fn eigenvalue(&self) -> u64 {
        let ell = self.ell as u64;
        ell * (ell + self.d as u64 - 1)
    }

    pub fn is_even(&self) -> bool {
        self.ell % 2 == 0
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn legendre_closed(ell: usize, t: f64) -> f64 {
        match ell {
            0 => 1.0,
            1 => t,
            2 => (3.0 * t * t - 1.0) / 2.0,
            3 => (5.0 * t.powi(3) - 3.0 * t) / 2.0,
            4 => (35.0 * t.powi(4) - 30.0 * t * t + 3.0) / 8.0,
            _ => unreachable!(),
        }
    }

    #[test]
    fn value_at_one_is_one() {
        let g = GegenbauerSpec::new(7, 5).unwrap();
        assert_eq!(g.eval(1.0).unwrap(), 1.0);
    }

    #[test]
    fn low_degree_examples() {
        let g1 = GegenbauerSpec::new(1, 2).unwrap();
        assert!((g1.eval(0.3).unwrap() - 0.3).abs() < 1e-15);
        let g2 = GegenbauerSpec::new(2, 2).unwrap();
        assert!((g2.eval(0.0).unwrap() + 0.5).abs() < 1e-15);
        let g3 = GegenbauerSpec::new(2, 3).unwrap();
        assert!((g3.eval(0.0).unwrap() + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn legendre_low_degrees() {
        for ell in 0..=4 {
            let g = GegenbauerSpec::new(ell, 2).unwrap();
            for i in 0..=20 {
                let t = -1.0 + 0.1 * i as f64;
                assert!((g.eval(t).unwrap() - legendre_closed(ell, t)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn batch_examples() {
        let g = GegenbauerSpec::new(0, 4).unwrap();
        assert_eq!(g.batch(0.7).unwrap(), vec![1.0]);
        let g = GegenbauerSpec::new(2, 2).unwrap();
        let b = g.batch(0.0).unwrap();
        assert_eq!(b.len(), 3);
        assert_eq!(b[0], 1.0);
        assert_eq!(b[1], 0.0);
        assert!((b[2] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn batch_matches_single_evaluations() {
        let top = GegenbauerSpec::new(50, 3).unwrap();
        let b = top.batch(0.25).unwrap();
        for (k, v) in b.iter().enumerate() {
            let single = GegenbauerSpec::new(k, 3).unwrap().eval(0.25).unwrap();
            assert_eq!(*v, single, "degree {k}");
        }
    }

    #[test]
    fn alpha_matches_recurrence_normalization() {
        for d in 2..=7 {
            for ell in [0usize, 1, 5, 40, 171, 300] {
                let g = GegenbauerSpec::new(ell, d).unwrap();
                let rel = (g.alpha() / g.value_at_one - 1.0).abs();
                assert!(rel < 1e-11, "d={d} ell={ell} rel={rel}");
            }
        }
    }

    #[test]
    fn normalization_holds_up_to_degree_200() {
        for d in 2..=6 {
            for ell in 0..=200 {
                let g = GegenbauerSpec::new(ell, d).unwrap();
                assert!((g.eval(1.0).unwrap() - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn rejects_arguments_outside_interval() {
        let g = GegenbauerSpec::new(3, 2).unwrap();
        assert!(matches!(g.eval(1.01), Err(Error::Domain { .. })));
        assert!(g.eval(f64::NAN).is_err());
        assert!(g.eval(1.0 + 1e-13).is_ok());
        assert!(GegenbauerSpec::new(3, 1).is_err());
    }

    #[test]
    fn multipole_eigenvalues() {
        assert_eq!(Multipole::new(4, 2).eigenvalue(), 20);
        assert_eq!(Multipole::new(3, 5).eigenvalue(), 21);
        let mut last = None;
        for ell in 0..50 {
            let e = Multipole::new(ell, 3).eigenvalue();
            if let Some(prev) = last {
                assert!(e > prev);
            }
            last = Some(e);
        }
        assert!(Multipole::new(6, 2).is_even());
    }

    proptest! {
        #[test]
        fn parity(ell in 0usize..300, d in 2usize..8, t in -1.0f64..=1.0) {
            let g = GegenbauerSpec::new(ell, d).unwrap();
            let sign = if ell % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((g.eval(-t).unwrap() - sign * g.eval(t).unwrap()).abs() <= 1e-12);
        }

        #[test]
        fn bounded_by_one(ell in 0usize..300, d in 2usize..8, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let g = GegenbauerSpec::new(ell, d).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let sup = (0..10_000)
                .map(|_| g.eval_unchecked(rng.random_range(-1.0..=1.0)).abs())
                .fold(0.0, f64::max);
            prop_assert!(sup <= 1.0 + 1e-12);
        }
    }
}
