//! Realizations of the degree-`ell` Gaussian eigenfunction on a discretized `S^d`.
//!
//! `d = 2` uses exact harmonic synthesis on product grids; `d >= 3` uses a
//! factorized covariance matrix on quasi-uniform grids. Both samplers are
//! immutable after construction and can be shared across threads.

mod dense;
mod dump;
mod grid;
mod harmonic;
pub mod seed;

use std::sync::Arc;

pub use dense::{covariance_matrix, DenseSampler, DENSE_NODE_BUDGET, JITTER};
pub use dump::{read_dump, write_dump, FieldDump, HEADER_LEN};
pub use grid::{build_grid, GridKind, ProductLayout, SphereGrid};
pub use harmonic::{normalized_legendre, HarmonicSynthesizer};

use crate::error::{Error, Result};
use crate::specfun::Multipole;

/// One realization of `T_ell` at the nodes of a grid.
#[derive(Debug, Clone)]
pub struct FieldSample {
    pub grid: Arc<SphereGrid>,
    pub values: Vec<f64>,
    pub ell: Multipole,
    pub seed: u64,
}

/// Degree-`ell` sampler for a grid, dispatching on the grid kind.
#[derive(Debug)]
pub enum FieldSampler {
    Harmonic(HarmonicSynthesizer),
    Dense(DenseSampler),
}

impl FieldSampler {
    /// Harmonic synthesis on product grids, dense factorization otherwise.
    pub fn new(grid: Arc<SphereGrid>, ell: usize) -> Result<Self> {
        match grid.kind() {
            GridKind::Product => Ok(Self::Harmonic(HarmonicSynthesizer::new(grid, ell)?)),
            GridKind::QuasiUniform => Ok(Self::Dense(DenseSampler::new(grid, ell)?)),
        }
    }

    pub fn sample(&self, seed: u64) -> FieldSample {
        match self {
            Self::Harmonic(s) => s.sample(seed),
            Self::Dense(s) => s.sample(seed),
        }
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        match self {
            Self::Harmonic(s) => s.grid(),
            Self::Dense(s) => s.grid(),
        }
    }
}

/// Single draw on a `d = 2` product grid by harmonic synthesis.
pub fn simulate_s2(ell: usize, grid: &Arc<SphereGrid>, seed: u64) -> Result<FieldSample> {
    if grid.d() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: grid.d(),
        });
    }
    Ok(HarmonicSynthesizer::new(Arc::clone(grid), ell)?.sample(seed))
}

/// Single draw by dense covariance factorization, on any grid within the
/// node budget. Builds the factor on every call; hold a [`DenseSampler`] to
/// reuse it.
pub fn simulate_sd(ell: usize, grid: &Arc<SphereGrid>, seed: u64) -> Result<FieldSample> {
    Ok(DenseSampler::new(Arc::clone(grid), ell)?.sample(seed))
}
