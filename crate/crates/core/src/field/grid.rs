use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::{sphere_measure, GaussLegendre};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Gauss-Legendre in `cos(theta)` times uniform longitudes (`d = 2`).
    Product,
    /// Low-discrepancy equal-weight point set (`d >= 3`).
    QuasiUniform,
}

/// Latitude structure of a product grid, used by harmonic synthesis.
#[derive(Debug, Clone)]
pub struct ProductLayout {
    pub cos_theta: Vec<f64>,
    pub lat_weights: Vec<f64>,
    pub n_lon: usize,
}

/// Quadrature nodes on `S^d` with positive weights summing to `mu_d`.
///
/// Nodes are stored flat, `d + 1` coordinates per node. For product grids the
/// node order is latitude-major: node `j * n_lon + k` sits on latitude `j`,
/// longitude `2 pi k / n_lon`.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    d: usize,
    resolution: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
    kind: GridKind,
    layout: Option<ProductLayout>,
}

impl SphereGrid {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        let s = self.d + 1;
        &self.coords[i * s..(i + 1) * s]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d + 1)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn layout(&self) -> Option<&ProductLayout> {
        self.layout.as_ref()
    }

    /// `<x_i, x_j>` clamped to `[-1, 1]`.
    pub fn inner(&self, i: usize, j: usize) -> f64 {
        let dot: f64 = self.node(i).iter().zip(self.node(j)).map(|(a, b)| a * b).sum();
        dot.clamp(-1.0, 1.0)
    }

    /// Geodesic distance `arccos <x_i, x_j>` in `[0, pi]`.
    pub fn geodesic(&self, i: usize, j: usize) -> f64 {
        self.inner(i, j).acos()
    }

    /// Index of the node closest to `-x_i`.
    pub fn antipode(&self, i: usize) -> usize {
        (0..self.len())
            .min_by(|&a, &b| self.inner(i, a).total_cmp(&self.inner(i, b)))
            .unwrap_or(i)
    }
}

/// Product grid for `d = 2` (`resolution` latitudes, `2 * resolution`
/// longitudes) or a quasi-uniform set of `resolution^2` nodes for `d >= 3`.
pub fn build_grid(d: usize, resolution: usize) -> Result<SphereGrid> {
    if resolution < 4 {
        return Err(Error::ResolutionTooSmall(resolution));
    }
    match d {
        0 | 1 => Err(Error::domain("d", d as f64, "d >= 2")),
        2 => Ok(product_grid(resolution)),
        _ => Ok(quasi_uniform_grid(d, resolution)),
    }
}

fn product_grid(resolution: usize) -> SphereGrid {
    let rule = GaussLegendre::new(resolution);
    let n_lon = 2 * resolution;
    let dphi = 2.0 * PI / n_lon as f64;
    let mut coords = Vec::with_capacity(3 * resolution * n_lon);
    let mut weights = Vec::with_capacity(resolution * n_lon);
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let s = (1.0 - x * x).sqrt();
        for k in 0..n_lon {
            let (sp, cp) = (k as f64 * dphi).sin_cos();
            coords.extend_from_slice(&[s * cp, s * sp, x]);
            weights.push(w * dphi);
        }
    }
    SphereGrid {
        d: 2,
        resolution,
        coords,
        weights,
        kind: GridKind::Product,
        layout: Some(ProductLayout {
            cos_theta: rule.nodes,
            lat_weights: rule.weights,
            n_lon,
        }),
    }
}

// Additive recurrence with the generalized golden ratio (root of x^{dim+1} = x + 1),
// pushed through the inverse CDF of each hyperspherical angle.
fn quasi_uniform_grid(d: usize, resolution: usize) -> SphereGrid {
    let n = resolution * resolution;
    let dim = d;
    let mut g = 1.5f64;
    for _ in 0..60 {
        g -= (g.powi(dim as i32 + 1) - g - 1.0) / ((dim as f64 + 1.0) * g.powi(dim as i32) - 1.0);
    }
    let steps: Vec<f64> = (1..=dim).map(|i| g.powi(-(i as i32))).collect();
    let angle_cdfs: Vec<SinePowerCdf> = (1..d).map(|k| SinePowerCdf::new(d - k)).collect();

    let mut coords = Vec::with_capacity(n * (d + 1));
    let mut point = vec![0.0; d + 1];
    for i in 0..n {
        let u: Vec<f64> = steps.iter().map(|a| (0.5 + a * (i + 1) as f64).fract()).collect();
        let mut radius = 1.0;
        for (k, cdf) in angle_cdfs.iter().enumerate() {
            let theta = cdf.inverse(u[k]);
            let (s, c) = theta.sin_cos();
            point[k] = radius * c;
            radius *= s;
        }
        let (s, c) = (2.0 * PI * u[dim - 1]).sin_cos();
        point[d - 1] = radius * c;
        point[d] = radius * s;
        let norm = point.iter().map(|v| v * v).sum::<f64>().sqrt();
        coords.extend(point.iter().map(|v| v / norm));
    }
    let w = sphere_measure(d) / n as f64;
    SphereGrid {
        d,
        resolution,
        coords,
        weights: vec![w; n],
        kind: GridKind::QuasiUniform,
        layout: None,
    }
}

/// CDF of the density proportional to `sin(t)^m` on `[0, pi]`.
struct SinePowerCdf {
    m: usize,
    total: f64,
}

impl SinePowerCdf {
    fn new(m: usize) -> Self {
        Self {
            m,
            total: sine_power_integral(m, PI),
        }
    }

    fn cdf(&self, t: f64) -> f64 {
        sine_power_integral(self.m, t) / self.total
    }

    fn inverse(&self, u: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, PI);
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// `int_0^t sin(s)^m ds` by the reduction formula
/// `I_k = -sin^{k-1} cos / k + (k-1)/k I_{k-2}`.
fn sine_power_integral(m: usize, t: f64) -> f64 {
    let (s, c) = t.sin_cos();
    let mut table = vec![t, 1.0 - c];
    for k in 2..=m {
        let kf = k as f64;
        let next = -s.powi(k as i32 - 1) * c / kf + (kf - 1.0) / kf * table[k - 2];
        table.push(next);
    }
    table[m]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::GegenbauerSpec;

    #[test]
    fn product_grid_weights_and_norms() {
        let g = build_grid(2, 64).unwrap();
        assert_eq!(g.len(), 8192);
        assert_eq!(g.kind(), GridKind::Product);
        let s: f64 = g.weights().iter().sum();
        assert!((s - 4.0 * PI).abs() < 1e-10);
        assert!(g.weights().iter().all(|&w| w > 0.0));
        for x in g.nodes() {
            let n: f64 = x.iter().map(|v| v * v).sum();
            assert!((n.sqrt() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn quasi_uniform_grid_weights_and_norms() {
        let g = build_grid(3, 40).unwrap();
        assert_eq!(g.len(), 1600);
        let s: f64 = g.weights().iter().sum();
        assert!((s - 2.0 * PI * PI).abs() < 1e-10);
        for x in g.nodes() {
            let n: f64 = x.iter().map(|v| v * v).sum();
            assert!((n.sqrt() - 1.0).abs() < 1e-12);
        }
        for i in (0..g.len()).step_by(97) {
            let t = g.geodesic(i, (i * 31 + 5) % g.len());
            assert!((0.0..=PI).contains(&t));
        }
    }

    #[test]
    fn quasi_uniform_grid_is_balanced() {
        // Low-order moments of a uniform law on S^d: E[x_k] = 0, E[x_k^2] = 1/(d+1).
        for d in 3..=5 {
            let g = build_grid(d, 50).unwrap();
            let n = g.len() as f64;
            for k in 0..=d {
                let m1: f64 = g.nodes().map(|x| x[k]).sum::<f64>() / n;
                let m2: f64 = g.nodes().map(|x| x[k] * x[k]).sum::<f64>() / n;
                assert!(m1.abs() < 0.02, "d={d} k={k} m1={m1}");
                assert!((m2 - 1.0 / (d + 1) as f64).abs() < 0.02, "d={d} k={k} m2={m2}");
            }
        }
    }

    #[test]
    fn product_grid_integrates_eigenfunctions_to_zero() {
        let g = build_grid(2, 64).unwrap();
        let p4 = GegenbauerSpec::new(4, 2).unwrap();
        let north = [0.0, 0.0, 1.0];
        let s: f64 = g
            .nodes()
            .zip(g.weights())
            .map(|(x, w)| w * p4.eval_unchecked(x[2] * north[2]))
            .sum();
        assert!(s.abs() < 1e-9);
    }

    #[test]
    fn rejects_small_resolution_and_dimension() {
        assert!(matches!(build_grid(2, 3), Err(Error::ResolutionTooSmall(3))));
        assert!(build_grid(1, 10).is_err());
    }

    #[test]
    fn sine_power_integrals() {
        assert!((sine_power_integral(0, 1.0) - 1.0).abs() < 1e-15);
        assert!((sine_power_integral(2, PI) - PI / 2.0).abs() < 1e-15);
        assert!((sine_power_integral(3, PI) - 4.0 / 3.0).abs() < 1e-15);
        assert!((sine_power_integral(4, PI) - 3.0 * PI / 8.0).abs() < 1e-15);
        assert!((sine_power_integral(5, PI / 2.0) - 8.0 / 15.0).abs() < 1e-15);
    }
}
