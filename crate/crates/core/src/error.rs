use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument {name} = {value} outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("bessel order {0} is not a non-negative half-integer")]
    BesselOrder(f64),

    #[error("variance formula requires even degree, got ell = {0}")]
    OddDegree(usize),

    #[error("asymptotic constant undefined for q = {q}, d = {d}")]
    Undefined { q: usize, d: usize },

    #[error("bessel integral for q = {q}, d = {d} did not converge (tail estimate {estimate:e})")]
    NonConverged { q: usize, d: usize, estimate: f64 },

    #[error("grid resolution {0} is below the minimum of 4")]
    ResolutionTooSmall(usize),

    #[error("dimension mismatch: expected d = {expected}, got d = {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("grid has {nodes} nodes, above the dense factorization budget of {budget}")]
    GridTooLarge { nodes: usize, budget: usize },

    #[error("covariance matrix is not numerically positive semidefinite (ell = {ell}, n = {nodes})")]
    FactorizationFailed { ell: usize, nodes: usize },

    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { got: usize, need: usize },

    #[error("hermite rank undefined: all coefficients J_q with q >= 1 vanish")]
    RankUndefined,

    #[error("rate fit needs positive statistics, got {0}")]
    NonPositiveValues(f64),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            domain,
        }
    }
}
