//! Bessel functions of the first kind for the non-negative half-integer
//! orders `d/2 - 1` that occur on spheres.
//!
//! Integer orders: power series below [`SERIES_SEAM`], Hankel asymptotic
//! expansion (optimally truncated) above it. Half-integer orders: closed
//! trigonometric forms of the spherical Bessel functions, except for
//! `x < max(1, nu - 1/2)` where the upward recurrence cancels and the power
//! series is used instead.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};

/// Argument at which integer-order evaluation switches from the power series.
pub const SERIES_SEAM: f64 = 12.0;

/// `J_nu` for `nu = twice_nu / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BesselJ {
    twice_nu: u32,
}

impl BesselJ {
    pub fn new(nu: f64) -> Result<Self> {
        let twice = 2.0 * nu;
        if !(nu >= 0.0) || twice.fract() != 0.0 || twice > 1e6 {
            return Err(Error::BesselOrder(nu));
        }
        Ok(Self {
            twice_nu: twice as u32,
        })
    }

    /// Order `d/2 - 1` for sphere dimension `d >= 2`.
    pub fn for_sphere(d: usize) -> Self {
        assert!(d >= 2);
        Self {
            twice_nu: (d - 2) as u32,
        }
    }

    pub fn order(&self) -> f64 {
        self.twice_nu as f64 / 2.0
    }

    pub fn is_half_integer(&self) -> bool {
        self.twice_nu % 2 == 1
    }

    /// The order one higher, used for derivatives.
    pub fn raised(&self) -> Self {
        Self {
            twice_nu: self.twice_nu + 2,
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain("x", x, "x >= 0"));
        }
        Ok(self.eval_nonneg(x))
    }

    /// Evaluation for `x >= 0` (not checked).
    pub fn eval_nonneg(&self, x: f64) -> f64 {
        let nu = self.order();
        if x == 0.0 {
            return if self.twice_nu == 0 { 1.0 } else { 0.0 };
        }
        if self.is_half_integer() {
            let n = (self.twice_nu / 2) as usize;
            if x < (n as f64).max(1.0) {
                series(nu, x)
            } else {
                (2.0 * x / PI).sqrt() * spherical_j(n, x)
            }
        } else if x < SERIES_SEAM || x < nu * nu {
            series(nu, x)
        } else {
            hankel(nu, x)
        }
    }

    /// `d/dx J_nu(x) = (nu / x) J_nu(x) - J_{nu+1}(x)`.
    pub fn derivative(&self, x: f64) -> f64 {
        if x == 0.0 {
            return match self.twice_nu {
                2 => 0.5,
                1 => f64::INFINITY,
                _ => 0.0,
            };
        }
        self.order() / x * self.eval_nonneg(x) - self.raised().eval_nonneg(x)
    }
}

/// `J_nu(x)` for `nu` in `{0, 1/2, 1, 3/2, ...}` and `x >= 0`.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    BesselJ::new(nu)?.eval(x)
}

/// `Gamma(nu + 1)` for half-integer `nu >= 0` by exact products.
pub(crate) fn gamma_shifted(nu: f64) -> f64 {
    let twice = (2.0 * nu).round() as u64;
    if twice % 2 == 0 {
        (1..=twice / 2).fold(1.0, |acc, k| acc * k as f64)
    } else {
        // Gamma(3/2) = sqrt(pi)/2, Gamma(k + 3/2) = (k + 1/2) Gamma(k + 1/2)
        let mut g = PI.sqrt() / 2.0;
        let mut a = 1.5;
        while a < nu + 1.0 - 0.25 {
            g *= a;
            a += 1.0;
        }
        g
    }
}

/// Power series `sum_k (-1)^k (x/2)^(2k + nu) / (k! Gamma(k + nu + 1))`.
fn series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = half.powf(nu) / gamma_shifted(nu);
    let mut sum = term;
    let q = half * half;
    for k in 1..500 {
        let kf = k as f64;
        term *= -q / (kf * (kf + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && kf > q.sqrt() {
            break;
        }
    }
    sum
}

/// Hankel expansion `sqrt(2/(pi x)) (P cos w - Q sin w)`, `w = x - nu pi/2 - pi/4`,
/// truncated before the smallest term.
fn hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() >= last || next == 0.0 {
            break;
        }
        last = next.abs();
        term = next;
        // P collects even k with sign (-1)^(k/2), Q odd k with sign (-1)^((k-1)/2).
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    // cos(x - phase) with the phase reduced modulo 2 pi before combining with x.
    let phase = (nu * FRAC_PI_2 + FRAC_PI_4).rem_euclid(2.0 * PI);
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cw = cx * cp + sx * sp;
    let sw = sx * cp - cx * sp;
    (2.0 / (PI * x)).sqrt() * (p * cw - q * sw)
}

/// Spherical Bessel `j_n(x)` by upward recurrence from the closed forms; stable for `x > n`.
fn spherical_j(n: usize, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    if n == 0 {
        return j0;
    }
    let mut prev = j0;
    let mut cur = s / (x * x) - c / x;
    for k in 1..n {
        let next = (2 * k + 1) as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}
