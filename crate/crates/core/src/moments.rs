//! Gegenbauer moment integrals, their high-degree constants and the variance
//! of chaotic projections.
//!
//! `moment_integral(ell, q, d)` is
//! `int_0^{pi/2} G_{ell;d}(cos t)^q sin(t)^{d-1} dt`. Its decay in `ell` is
//! one of three laws (see [`scaling_law`]); the constant of the generic
//! `ell^{-d}` law is a Bessel integral evaluated by [`asymptotic_constant`].

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::specfun::{gamma_shifted, sphere_measure, BesselJ, GaussLegendre, GegenbauerSpec, SERIES_SEAM};

/// Gauss-Legendre nodes per panel of the moment quadrature.
pub const NODES_PER_PANEL: usize = 16;

/// Absolute accuracy the Bessel-integral constants are required to reach.
pub const CONSTANT_TOLERANCE: f64 = 1e-6;

fn panel_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NODES_PER_PANEL))
}

fn chunk_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(32))
}

/// `int_0^{pi/2} G_{ell;d}(cos t)^q sin(t)^{d-1} dt`.
pub fn moment_integral(ell: usize, q: usize, d: usize) -> Result<f64> {
    moment_integral_refined(ell, q, d, 1)
}

/// As [`moment_integral`] with `refinement` times the default panel count.
///
/// The default uses `2 (ell + 1)` panels, i.e. width `pi / (4 (ell + 1))`.
pub fn moment_integral_refined(ell: usize, q: usize, d: usize, refinement: usize) -> Result<f64> {
    let spec = GegenbauerSpec::new(ell, d)?;
    let panels = 2 * (ell + 1) * refinement.max(1);
    let width = FRAC_PI_2 / panels as f64;
    let rule = panel_rule();
    let power = d as i32 - 1;
    let q = q as i32;

    let mut sum = 0.0;
    let mut comp = 0.0;
    for p in 0..panels {
        let a = p as f64 * width;
        let panel = rule.integrate(a, a + width, |t| {
            let (s, c) = t.sin_cos();
            spec.eval_unchecked(c).powi(q) * s.powi(power)
        });
        // Neumaier summation; odd moments are small differences of O(1/ell) panels.
        let t = sum + panel;
        if sum.abs() >= panel.abs() {
            comp += (sum - t) + panel;
        } else {
            comp += (panel - t) + sum;
        }
        sum = t;
    }
    Ok(sum + comp)
}

/// `Var[h_{ell;q,d}] = 2 q! mu_d mu_{d-1} moment_integral(ell, q, d)` for even `ell`.
pub fn projection_variance(ell: usize, q: usize, d: usize) -> Result<f64> {
    let reduced = projection_variance_over_factorial(ell, q, d)?;
    let factorial: f64 = (1..=q).map(|k| k as f64).product();
    Ok(reduced * factorial)
}

/// `Var[h_{ell;q,d}] / q!`, finite for every `q` where the factorial is not.
pub fn projection_variance_over_factorial(ell: usize, q: usize, d: usize) -> Result<f64> {
    if ell % 2 == 1 {
        return Err(Error::OddDegree(ell));
    }
    if ell < 2 {
        return Err(Error::domain("ell", ell as f64, "even ell >= 2"));
    }
    if q < 2 {
        return Err(Error::domain("q", q as f64, "q >= 2"));
    }
    let integral = moment_integral(ell, q, d)?;
    Ok(2.0 * sphere_measure(d) * sphere_measure(d - 1) * integral)
}

/// Decay law `C ell^exponent (log ell)^log_power` of a moment integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingLaw {
    pub q: usize,
    pub d: usize,
    pub exponent: i32,
    pub log_power: i32,
    /// `None` when the Bessel route fails to converge.
    pub constant: Option<f64>,
}

impl ScalingLaw {
    /// The factor that turns `moment_integral(ell, q, d)` into an estimate of the constant.
    pub fn normalizer(&self, ell: usize) -> f64 {
        let l = ell as f64;
        l.powi(-self.exponent) / l.ln().powi(self.log_power)
    }
}

/// Which of the three decay laws governs `(q, d)`.
pub fn scaling_law(q: usize, d: usize) -> Result<ScalingLaw> {
    if q < 2 || d < 2 {
        return Err(Error::Undefined { q, d });
    }
    let (exponent, log_power) = match (q, d) {
        (2, _) => (-(d as i32 - 1), 0),
        (4, 2) => (-2, 1),
        _ => (-(d as i32), 0),
    };
    Ok(ScalingLaw {
        q,
        d,
        exponent,
        log_power,
        constant: asymptotic_constant(q, d).ok(),
    })
}

/// `c_{q;d}`: closed forms for `q = 2` and `(q, d) = (4, 2)`, otherwise
/// `(2^{nu} nu!)^q int_0^inf J_nu(s)^q s^{-q nu + d - 1} ds` with `nu = d/2 - 1`.
pub fn asymptotic_constant(q: usize, d: usize) -> Result<f64> {
    if q < 2 || d < 2 {
        return Err(Error::Undefined { q, d });
    }
    if q == 2 {
        let fact: f64 = (1..d).map(|k| k as f64).product();
        return Ok(fact * sphere_measure(d) / (4.0 * sphere_measure(d - 1)));
    }
    if (q, d) == (4, 2) {
        return Ok(3.0 / (2.0 * PI * PI));
    }
    BesselIntegral::new(q, d).evaluate()
}

/// Moment integral together with its scaled value and the asymptotic target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentResult {
    pub ell: usize,
    pub q: usize,
    pub d: usize,
    pub integral: f64,
    /// `integral` times `ell^d`, `ell^{d-1}` (q = 2) or `ell^2 / log ell` ((q, d) = (4, 2)).
    pub scaled: f64,
    /// Asymptotic constant, NaN when unknown.
    pub target: f64,
    /// `|scaled - target| / |target|`, NaN when unknown.
    pub rel_err: f64,
}

impl MomentResult {
    pub fn compute(ell: usize, q: usize, d: usize) -> Result<Self> {
        let integral = moment_integral(ell, q, d)?;
        let (scaled, target) = match scaling_law(q, d) {
            Ok(law) => (
                integral * law.normalizer(ell),
                law.constant.unwrap_or(f64::NAN),
            ),
            Err(_) => (f64::NAN, f64::NAN),
        };
        Ok(Self {
            ell,
            q,
            d,
            integral,
            scaled,
            target,
            rel_err: (scaled - target).abs() / target.abs(),
        })
    }
}

/// Sign of `c_{q;d}` for odd `q <= 7`, `d <= 6`; reported, not asserted.
pub fn positivity_probe() -> Vec<(usize, usize, Result<f64>)> {
    let mut out = Vec::new();
    for d in 2..=6 {
        for q in [3, 5, 7] {
            out.push((q, d, asymptotic_constant(q, d)));
        }
    }
    out
}

/// `2^{nu} nu! J_nu(s) / s^nu`, equal to 1 at the origin.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BesselKernel {
    nu: f64,
    bessel: BesselJ,
    scale: f64,
}

impl BesselKernel {
    pub(crate) fn new(d: usize) -> Self {
        let bessel = BesselJ::for_sphere(d);
        let nu = bessel.order();
        Self {
            nu,
            bessel,
            scale: 2f64.powf(nu) * gamma_shifted(nu),
        }
    }

    pub(crate) fn eval(&self, s: f64) -> f64 {
        if s < SERIES_SEAM {
            let q = -0.25 * s * s;
            let mut term = 1.0;
            let mut sum = 1.0;
            for k in 1..200 {
                let kf = k as f64;
                term *= q / (kf * (kf + self.nu));
                sum += term;
                if term.abs() < 1e-17 * sum.abs().max(1e-300) && kf * kf > -q {
                    break;
                }
            }
            sum
        } else {
            self.scale * self.bessel.eval_nonneg(s) / s.powf(self.nu)
        }
    }
}

/// `k`-th positive zero of `J_nu`: McMahon's expansion refined by Newton.
pub fn bessel_zero(bessel: BesselJ, k: usize) -> f64 {
    let nu = bessel.order();
    let mu = 4.0 * nu * nu;
    let beta = (k as f64 + 0.5 * nu - 0.25) * PI;
    let b8 = 8.0 * beta;
    let mut x = beta
        - (mu - 1.0) / b8
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8.powi(3))
        - 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * b8.powi(5));
    for _ in 0..60 {
        let dx = bessel.eval_nonneg(x) / bessel.derivative(x);
        x -= dx;
        if dx.abs() <= 4.0 * f64::EPSILON * x {
            break;
        }
    }
    x
}

struct BesselIntegral {
    q: usize,
    d: usize,
    kernel: BesselKernel,
}

impl BesselIntegral {
    const ODD_CHUNKS: usize = 400;
    const EVEN_CHUNKS: usize = 1200;
    const EULER_WINDOW: usize = 40;

    fn new(q: usize, d: usize) -> Self {
        Self {
            q,
            d,
            kernel: BesselKernel::new(d),
        }
    }

    fn integrand(&self, s: f64) -> f64 {
        self.kernel.eval(s).powi(self.q as i32) * s.powi(self.d as i32 - 1)
    }

    /// Decay exponent `p` of the envelope `s^{-p}` of the integrand.
    fn decay(&self) -> f64 {
        (self.d as f64 - 1.0) * (self.q as f64 / 2.0 - 1.0)
    }

    /// Partial integrals up to the first `n` zeros, with those zeros.
    fn partial_sums(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let rule = chunk_rule();
        let mut sums = Vec::with_capacity(n);
        let mut zeros = Vec::with_capacity(n);
        let mut left = 0.0;
        let mut total = 0.0;
        for k in 1..=n {
            let right = bessel_zero(self.kernel.bessel, k);
            total += rule.integrate(left, right, |s| self.integrand(s));
            sums.push(total);
            zeros.push(right);
            left = right;
        }
        (sums, zeros)
    }

    fn evaluate(&self) -> Result<f64> {
        let scale = 1.0;
        let (value, spread) = if self.q % 2 == 1 {
            // Chunks between zeros alternate in sign: accelerate the partial sums
            // by repeated averaging over a trailing window, twice for an error estimate.
            let (sums, _) = self.partial_sums(Self::ODD_CHUNKS);
            let n = sums.len();
            let w = Self::EULER_WINDOW;
            let a = euler_average(&sums[n - w..]);
            let b = euler_average(&sums[n - w - 25..n - 25]);
            (a, (a - b).abs())
        } else {
            // Even powers carry a non-oscillating envelope; add its tail in closed form.
            let p = self.decay();
            if p <= 1.0 {
                return Err(Error::Undefined {
                    q: self.q,
                    d: self.d,
                });
            }
            let (sums, zeros) = self.partial_sums(Self::EVEN_CHUNKS);
            let amplitude = self.kernel.scale * (2.0 / PI).sqrt();
            let mean_cos = binomial(self.q, self.q / 2) / 2f64.powi(self.q as i32);
            let tail = |x: f64| amplitude.powi(self.q as i32) * mean_cos * x.powf(1.0 - p) / (p - 1.0);
            let n = sums.len();
            let a = sums[n - 1] + tail(zeros[n - 1]);
            let b = sums[n / 2 - 1] + tail(zeros[n / 2 - 1]);
            (a, (a - b).abs())
        };
        if !value.is_finite() || spread > CONSTANT_TOLERANCE * scale {
            return Err(Error::NonConverged {
                q: self.q,
                d: self.d,
                estimate: spread,
            });
        }
        Ok(value)
    }
}

/// Euler transform of an alternating series given as partial sums: repeated
/// pairwise averaging down to a single value.
fn euler_average(partial: &[f64]) -> f64 {
    let mut level = partial.to_vec();
    while level.len() > 1 {
        level = level.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    level[0]
}

fn binomial(n: usize, k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * (n - k + i) as f64 / i as f64)
}
