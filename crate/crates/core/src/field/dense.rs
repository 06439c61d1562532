//! General-`d` simulation by factorizing the covariance matrix on the grid.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};

use super::grid::SphereGrid;
use super::{seed, FieldSample};
use crate::error::{Error, Result};
use crate::specfun::{GegenbauerSpec, Multipole};

/// Largest node count accepted for the dense factorization.
pub const DENSE_NODE_BUDGET: usize = 6000;

/// Relative diagonal jitter, in units of `trace / N` (which is 1 here).
pub const JITTER: f64 = 1e-10;

/// Lower Cholesky factor of `[G_{ell;d}(<x_i, x_j>)] + jitter I`, built once per `(grid, ell)`.
pub struct DenseSampler {
    grid: Arc<SphereGrid>,
    ell: usize,
    factor: DMatrix<f64>,
}

impl std::fmt::Debug for DenseSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DenseSampler")
            .field("ell", &self.ell)
            .field("nodes", &self.grid.len())
            .finish()
    }
}

/// `[G_{ell;d}(<x_i, x_j>)]` on `grid`.
pub fn covariance_matrix(grid: &SphereGrid, ell: usize) -> Result<DMatrix<f64>> {
    let spec = GegenbauerSpec::new(ell, grid.d())?;
    let n = grid.len();
    let mut cov = DMatrix::zeros(n, n);
    for j in 0..n {
        cov[(j, j)] = spec.eval_unchecked(1.0);
        for i in (j + 1)..n {
            let v = spec.eval_unchecked(grid.inner(i, j));
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    Ok(cov)
}

impl DenseSampler {
    pub fn new(grid: Arc<SphereGrid>, ell: usize) -> Result<Self> {
        let n = grid.len();
        if n > DENSE_NODE_BUDGET {
            return Err(Error::GridTooLarge {
                nodes: n,
                budget: DENSE_NODE_BUDGET,
            });
        }
        let mut cov = covariance_matrix(&grid, ell)?;
        let trace: f64 = cov.diagonal().iter().sum();
        let jitter = JITTER * trace / n as f64;
        for i in 0..n {
            cov[(i, i)] += jitter;
        }
        let chol = cov
            .cholesky()
            .ok_or(Error::FactorizationFailed { ell, nodes: n })?;
        Ok(Self {
            grid,
            ell,
            factor: chol.unpack(),
        })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    pub fn sample(&self, seed: u64) -> FieldSample {
        let n = self.grid.len();
        let mut rng = seed::stream(seed);
        let z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut values = vec![0.0; n];
        for (j, &zj) in z.iter().enumerate() {
            let col = self.factor.column(j);
            for i in j..n {
                values[i] += col[i] * zj;
            }
        }
        FieldSample {
            grid: Arc::clone(&self.grid),
            values,
            ell: Multipole::new(self.ell, self.grid.d()),
            seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_grid;

    #[test]
    fn covariance_diagonal_is_one() {
        let grid = build_grid(4, 10).unwrap();
        let cov = covariance_matrix(&grid, 5).unwrap();
        assert!(cov.diagonal().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn factor_reproduces_covariance() {
        let grid = Arc::new(build_grid(3, 12).unwrap());
        let sampler = DenseSampler::new(Arc::clone(&grid), 4).unwrap();
        let cov = covariance_matrix(&grid, 4).unwrap();
        let l = sampler.factor();
        let back = l * l.transpose();
        let err = (back - cov).abs().max();
        assert!(err < 1e-8, "err={err}");
    }

    #[test]
    fn rank_deficient_covariances_factorize() {
        // dim H_ell on S^3 is (ell+1)^2, far below the node count here.
        for ell in [1usize, 3, 8] {
            let grid = Arc::new(build_grid(3, 40).unwrap());
            assert!(DenseSampler::new(grid, ell).is_ok(), "ell={ell}");
        }
    }

    #[test]
    fn rejects_oversized_grid() {
        let grid = Arc::new(build_grid(3, 80).unwrap());
        assert!(matches!(
            DenseSampler::new(grid, 2),
            Err(Error::GridTooLarge { nodes: 6400, .. })
        ));
    }
}
