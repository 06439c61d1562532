//! Special functions consumed by the moment, field and functional modules.
//!
//! Everything here is pure and reentrant.

mod bessel;
mod gauss;
mod gegenbauer;
mod hermite;
mod quadrature;

use std::f64::consts::PI;

pub use bessel::{bessel_j, BesselJ, SERIES_SEAM};
pub(crate) use bessel::gamma_shifted;
pub use gauss::{gauss_cdf, gauss_pdf, gauss_pdf_cdf, gauss_quantile, gauss_sf};
pub use gegenbauer::{gegenbauer_batch, gegenbauer_eval, GegenbauerSpec, Multipole, ARGUMENT_TOLERANCE};
pub use hermite::{hermite_all, hermite_eval, hermite_normalized};
pub use quadrature::GaussLegendre;

/// Surface measure `mu_d = 2 pi^{(d+1)/2} / Gamma((d+1)/2)` of the unit sphere `S^d`.
///
/// Uses `mu_d = 2 pi mu_{d-2} / (d - 1)` from `mu_0 = 2`, `mu_1 = 2 pi`.
pub fn sphere_measure(d: usize) -> f64 {
    let (mut m, start) = if d % 2 == 0 { (2.0, 0) } else { (2.0 * PI, 1) };
    let mut k = start;
    while k < d {
        k += 2;
        m *= 2.0 * PI / (k - 1) as f64;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::tgamma as gamma;

    #[test]
    fn low_dimensional_measures() {
        assert!((sphere_measure(1) - 2.0 * PI).abs() < 1e-15);
        assert!((sphere_measure(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_measure(3) - 2.0 * PI * PI).abs() < 1e-14);
    }

    #[test]
    fn matches_gamma_formula() {
        for d in 1..20 {
            let want = 2.0 * PI.powf((d + 1) as f64 / 2.0) / gamma((d + 1) as f64 / 2.0);
            assert!((sphere_measure(d) / want - 1.0).abs() < 1e-13, "d={d}");
        }
    }
}
