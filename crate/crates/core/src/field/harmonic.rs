//! Exact harmonic synthesis of the degree-`ell` eigenfunction on `S^2`.
//!
//! `T(x) = sqrt(4 pi / (2 ell + 1)) sum_m a_m Y_{ell m}(x)` with `a_0` real
//! standard Gaussian and `a_m = (u_m + i v_m) / sqrt 2` for `m > 0`, the
//! negative orders fixed by `a_{-m} = (-1)^m conj(a_m)`. The field is real:
//! `T = sqrt(4 pi / (2 ell + 1)) [a_0 Y_0 + sqrt 2 sum_{m>0} Pbar_m (u_m cos m phi - v_m sin m phi)]`.
//! Longitude sums are done by one inverse FFT per latitude.

use std::f64::consts::PI;
use std::sync::Arc;

use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::{GridKind, SphereGrid};
use super::{seed, FieldSample};
use crate::error::{Error, Result};
use crate::specfun::Multipole;

/// Orthonormal associated Legendre functions `Pbar_ell^m(x)`, `m = 0..=ell`,
/// normalized so that `Pbar_ell^m(cos t) e^{i m p}` has unit `L^2(S^2)` norm.
/// The Condon-Shortley phase is omitted.
pub fn normalized_legendre(ell: usize, x: f64) -> Vec<f64> {
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut out = vec![0.0; ell + 1];
    let mut diag = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=ell {
        if m > 0 {
            let mf = m as f64;
            diag *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s;
        }
        if m == ell {
            out[m] = diag;
            break;
        }
        let mf = m as f64;
        let mut p2 = diag;
        let mut p1 = x * (2.0 * mf + 3.0).sqrt() * diag;
        let mut a_prev = (2.0 * mf + 3.0).sqrt();
        for n in (m + 2)..=ell {
            let nf = n as f64;
            let a = ((4.0 * nf * nf - 1.0) / (nf * nf - mf * mf)).sqrt();
            let p = a * (x * p1 - p2 / a_prev);
            p2 = p1;
            p1 = p;
            a_prev = a;
        }
        out[m] = p1;
    }
    out
}

/// Reusable synthesizer for one `(grid, ell)` pair.
pub struct HarmonicSynthesizer {
    grid: Arc<SphereGrid>,
    ell: usize,
    n_lat: usize,
    n_lon: usize,
    // n_lat x (ell + 1), already multiplied by sqrt(4 pi / (2 ell + 1)) and sqrt 2 for m > 0
    table: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for HarmonicSynthesizer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HarmonicSynthesizer")
            .field("ell", &self.ell)
            .field("n_lat", &self.n_lat)
            .field("n_lon", &self.n_lon)
            .finish()
    }
}

impl HarmonicSynthesizer {
    pub fn new(grid: Arc<SphereGrid>, ell: usize) -> Result<Self> {
        if grid.d() != 2 || grid.kind() != GridKind::Product {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: grid.d(),
            });
        }
        let layout = grid.layout().expect("product grid carries its layout");
        let n_lat = layout.cos_theta.len();
        let n_lon = layout.n_lon;
        let amp = (4.0 * PI / (2 * ell + 1) as f64).sqrt();
        let mut table = Vec::with_capacity(n_lat * (ell + 1));
        for &x in &layout.cos_theta {
            let p = normalized_legendre(ell, x);
            table.extend(p.iter().enumerate().map(|(m, v)| {
                let r = if m == 0 { 1.0 } else { std::f64::consts::SQRT_2 };
                amp * r * v
            }));
        }
        let fft = FftPlanner::new().plan_fft_inverse(n_lon);
        Ok(Self {
            grid,
            ell,
            n_lat,
            n_lon,
            table,
            fft,
        })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    /// Draws `(a_0, u_1, v_1, ..., u_ell, v_ell)` from the stream of `seed`.
    fn coefficients(&self, seed: u64) -> Vec<Complex64> {
        let mut rng = seed::stream(seed);
        let mut a = Vec::with_capacity(self.ell + 1);
        let a0: f64 = StandardNormal.sample(&mut rng);
        a.push(Complex64::new(a0, 0.0));
        for _ in 1..=self.ell {
            let u: f64 = StandardNormal.sample(&mut rng);
            let v: f64 = StandardNormal.sample(&mut rng);
            a.push(Complex64::new(u, v));
        }
        a
    }

    pub fn sample(&self, seed: u64) -> FieldSample {
        let a = self.coefficients(seed);
        let mut values = Vec::with_capacity(self.n_lat * self.n_lon);
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n_lon];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        let width = self.ell + 1;
        for j in 0..self.n_lat {
            buf.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
            let row = &self.table[j * width..(j + 1) * width];
            for (m, (&p, &am)) in row.iter().zip(&a).enumerate() {
                // Orders above the Nyquist limit alias onto m mod n_lon at the nodes.
                buf[m % self.n_lon] += am * p;
            }
            self.fft.process_with_scratch(&mut buf, &mut scratch);
            values.extend(buf.iter().map(|c| c.re));
        }
        FieldSample {
            grid: Arc::clone(&self.grid),
            values,
            ell: Multipole::new(self.ell, 2),
            seed,
        }
    }
}
