//! Monte Carlo ensembles and distance-to-Gaussian diagnostics.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::seed::replicate_seed;
use crate::field::{build_grid, FieldSample, FieldSampler};
use crate::functionals::{defect, excursion_volume, hermite_projection, hermite_projections};
use crate::specfun::{gauss_cdf, gauss_quantile};

/// Replicate count used when none is given.
pub const DEFAULT_REPLICATES: usize = 2000;

/// Minimum sample size for the distance and cumulant diagnostics.
pub const MIN_DIAGNOSTIC_SAMPLES: usize = 100;

/// Scalar statistic evaluated on every replicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Functional {
    Excursion { z: f64 },
    Defect,
    Projection { q: usize },
}

impl Functional {
    pub fn eval(&self, sample: &FieldSample) -> f64 {
        match *self {
            Functional::Excursion { z } => excursion_volume(sample, z).value,
            Functional::Defect => defect(sample).value,
            Functional::Projection { q } => hermite_projection(sample, q).value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Experiment {
    pub d: usize,
    pub ell: usize,
    pub resolution: usize,
    pub functional: Functional,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub replicates: usize,
    pub values: Vec<f64>,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub standardized: Vec<f64>,
    /// `None` below [`MIN_DIAGNOSTIC_SAMPLES`] replicates.
    pub ks_to_normal: Option<f64>,
    pub w1_to_normal: Option<f64>,
    pub cum4: Option<f64>,
    pub seed: u64,
}

impl EnsembleSummary {
    pub fn from_values(values: Vec<f64>, seed: u64) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::TooFewSamples { got: n, need: 2 });
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let standardized: Vec<f64> = if variance > 0.0 {
            let s = variance.sqrt();
            values.iter().map(|v| (v - mean) / s).collect()
        } else {
            vec![0.0; n]
        };
        let diagnostics = n >= MIN_DIAGNOSTIC_SAMPLES;
        Ok(Self {
            replicates: n,
            mean,
            variance,
            ks_to_normal: diagnostics.then(|| ks_distance(&standardized).unwrap()),
            w1_to_normal: diagnostics.then(|| w1_distance(&standardized).unwrap()),
            cum4: diagnostics.then(|| empirical_cum4(&values).unwrap()),
            standardized,
            values,
            seed,
        })
    }

    /// Standard error of the mean.
    pub fn mean_stderr(&self) -> f64 {
        (self.variance / self.replicates as f64).sqrt()
    }

    /// Standard error of the sample variance, `sqrt((m4 - (n-3)/(n-1) s^4) / n)`.
    pub fn variance_stderr(&self) -> f64 {
        let n = self.replicates as f64;
        let m4 = self.values.iter().map(|v| (v - self.mean).powi(4)).sum::<f64>() / n;
        let s4 = self.variance * self.variance;
        ((m4 - (n - 3.0) / (n - 1.0) * s4).max(0.0) / n).sqrt()
    }

    /// `cum4 / variance^2`, the normalized fourth cumulant.
    pub fn excess_kurtosis(&self) -> Option<f64> {
        self.cum4.map(|c| c / (self.variance * self.variance))
    }
}

/// Runs one experiment. Replicate `i` uses seed `replicate_seed(master_seed, i)`.
pub fn run_ensemble(experiment: &Experiment, replicates: usize, master_seed: u64) -> Result<EnsembleSummary> {
    let mut out = run_ensemble_multi(
        experiment.d,
        experiment.ell,
        experiment.resolution,
        &[experiment.functional],
        replicates,
        master_seed,
    )?;
    Ok(out.remove(0))
}

/// Evaluates several functionals on the same replicates.
pub fn run_ensemble_multi(
    d: usize,
    ell: usize,
    resolution: usize,
    functionals: &[Functional],
    replicates: usize,
    master_seed: u64,
) -> Result<Vec<EnsembleSummary>> {
    if replicates < 2 {
        return Err(Error::TooFewSamples { got: replicates, need: 2 });
    }
    let grid = Arc::new(build_grid(d, resolution)?);
    let sampler = FieldSampler::new(grid, ell)?;
    let max_q = functionals
        .iter()
        .filter_map(|f| match f {
            Functional::Projection { q } => Some(*q),
            _ => None,
        })
        .max();
    let rows: Vec<Vec<f64>> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let sample = sampler.sample(replicate_seed(master_seed, i as u64));
            let projections = max_q.map(|q| hermite_projections(&sample, q));
            functionals
                .iter()
                .map(|f| match (f, &projections) {
                    (Functional::Projection { q }, Some(h)) => h[*q],
                    _ => f.eval(&sample),
                })
                .collect()
        })
        .collect();
    functionals
        .iter()
        .enumerate()
        .map(|(k, _)| EnsembleSummary::from_values(rows.iter().map(|r| r[k]).collect(), master_seed))
        .collect()
}

fn require(values: &[f64]) -> Result<()> {
    if values.len() < MIN_DIAGNOSTIC_SAMPLES {
        return Err(Error::TooFewSamples {
            got: values.len(),
            need: MIN_DIAGNOSTIC_SAMPLES,
        });
    }
    Ok(())
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Kolmogorov distance `sup |F_n - Phi|` between the sample and `N(0, 1)`.
pub fn ks_distance(standardized: &[f64]) -> Result<f64> {
    require(standardized)?;
    let x = sorted(standardized);
    let n = x.len() as f64;
    let mut sup = 0.0f64;
    let mut i = 0;
    while i < x.len() {
        // ties form one step of the empirical CDF
        let mut j = i;
        while j + 1 < x.len() && x[j + 1] == x[i] {
            j += 1;
        }
        let phi = gauss_cdf(x[i]);
        sup = sup.max((phi - i as f64 / n).abs()).max(((j + 1) as f64 / n - phi).abs());
        i = j + 1;
    }
    Ok(sup)
}

/// Wasserstein-1 distance to `N(0, 1)` by quantile coupling at `(i - 1/2)/n`.
pub fn w1_distance(standardized: &[f64]) -> Result<f64> {
    require(standardized)?;
    let x = sorted(standardized);
    let n = x.len() as f64;
    let total: f64 = x
        .iter()
        .enumerate()
        .map(|(i, v)| (v - gauss_quantile((i as f64 + 0.5) / n)).abs())
        .sum();
    Ok(total / n)
}

/// `m4 - 3 m2^2` of the centered values, without bias correction.
pub fn empirical_cum4(values: &[f64]) -> Result<f64> {
    require(values)?;
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (m2, m4) = values.iter().fold((0.0, 0.0), |(a, b), v| {
        let c = (v - mean) * (v - mean);
        (a + c, b + c * c)
    });
    let (m2, m4) = (m2 / n, m4 / n);
    Ok(m4 - 3.0 * m2 * m2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Least-squares line through `(log ell, log statistic)`.
pub fn rate_fit(pairs: &[(f64, f64)]) -> Result<RateFit> {
    if pairs.len() < 3 {
        return Err(Error::TooFewSamples { got: pairs.len(), need: 3 });
    }
    if let Some(&(_, bad)) = pairs.iter().find(|(l, s)| !(*s > 0.0) || !(*l > 0.0)) {
        return Err(Error::NonPositiveValues(bad));
    }
    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(RateFit {
        slope,
        intercept: my - slope * mx,
        r2,
    })
}
