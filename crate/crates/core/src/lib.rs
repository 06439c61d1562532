//! Gaussian random eigenfunctions on the d-sphere.
//!
//! The crate evaluates Gegenbauer moment integrals and their high-degree
//! constants, simulates the degree-`ell` isotropic Gaussian eigenfunction on
//! discretized spheres, evaluates excursion volumes, the defect and Wiener
//! chaos projections on the samples, and summarizes Monte Carlo ensembles with
//! distance-to-Gaussian diagnostics.

pub mod cli;
pub mod error;
pub mod field;
pub mod functionals;
pub mod moments;
pub mod specfun;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
