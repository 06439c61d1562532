//! Python bindings: special functions, moment integrals, field simulation,
//! functionals and ensemble summaries.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use sphere_chaos::error::Error;
use sphere_chaos::field::{build_grid, FieldSample, FieldSampler, GridKind, SphereGrid};
use sphere_chaos::functionals::{self, ChaosCoefficients};
use sphere_chaos::stats::{self, EnsembleSummary, Functional};
use sphere_chaos::{moments, specfun};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::NonConverged { .. } | Error::FactorizationFailed { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pyfunction]
fn gegenbauer(ell: usize, d: usize, t: f64) -> PyResult<f64> {
    specfun::GegenbauerSpec::new(ell, d).and_then(|s| s.eval(t)).map_err(py_err)
}

#[pyfunction]
fn gegenbauer_batch(ell: usize, d: usize, t: f64) -> PyResult<Vec<f64>> {
    specfun::GegenbauerSpec::new(ell, d).and_then(|s| s.batch(t)).map_err(py_err)
}

#[pyfunction]
fn hermite(q: usize, t: f64) -> f64 {
    specfun::hermite_eval(q, t)
}

#[pyfunction]
fn bessel_j(nu: f64, x: f64) -> PyResult<f64> {
    specfun::bessel_j(nu, x).map_err(py_err)
}

#[pyfunction]
fn gauss_pdf_cdf(z: f64) -> (f64, f64) {
    specfun::gauss_pdf_cdf(z)
}

#[pyfunction]
fn sphere_measure(d: usize) -> f64 {
    specfun::sphere_measure(d)
}

#[pyfunction]
fn moment_integral(ell: usize, q: usize, d: usize) -> PyResult<f64> {
    moments::moment_integral(ell, q, d).map_err(py_err)
}

#[pyfunction]
fn asymptotic_constant(q: usize, d: usize) -> PyResult<f64> {
    moments::asymptotic_constant(q, d).map_err(py_err)
}

#[pyfunction]
fn projection_variance(ell: usize, q: usize, d: usize) -> PyResult<f64> {
    moments::projection_variance(ell, q, d).map_err(py_err)
}

/// `(exponent, log_power, constant)`; `constant` is None when unknown.
#[pyfunction]
fn scaling_law(q: usize, d: usize) -> PyResult<(i32, i32, Option<f64>)> {
    moments::scaling_law(q, d)
        .map(|l| (l.exponent, l.log_power, l.constant))
        .map_err(py_err)
}

/// Quadrature grid on `S^d`.
#[pyclass(name = "SphereGrid", frozen)]
struct PyGrid {
    inner: Arc<SphereGrid>,
}

#[pymethods]
impl PyGrid {
    #[new]
    fn new(d: usize, resolution: usize) -> PyResult<Self> {
        Ok(Self {
            inner: Arc::new(build_grid(d, resolution).map_err(py_err)?),
        })
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        match self.inner.kind() {
            GridKind::Product => "product",
            GridKind::QuasiUniform => "quasi-uniform",
        }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    fn nodes(&self) -> Vec<Vec<f64>> {
        self.inner.nodes().map(<[f64]>::to_vec).collect()
    }
}

/// Degree-`ell` field sampler bound to a grid.
#[pyclass(name = "FieldSampler", frozen)]
struct PySampler {
    inner: FieldSampler,
}

#[pymethods]
impl PySampler {
    #[new]
    fn new(grid: &PyGrid, ell: usize) -> PyResult<Self> {
        Ok(Self {
            inner: FieldSampler::new(Arc::clone(&grid.inner), ell).map_err(py_err)?,
        })
    }

    fn sample(&self, seed: u64) -> PySample {
        PySample {
            inner: self.inner.sample(seed),
        }
    }
}

/// One field realization.
#[pyclass(name = "FieldSample", frozen)]
struct PySample {
    inner: FieldSample,
}

#[pymethods]
impl PySample {
    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values.clone()
    }

    #[getter]
    fn ell(&self) -> usize {
        self.inner.ell.ell
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    fn excursion_volume(&self, z: f64) -> f64 {
        functionals::excursion_volume(&self.inner, z).value
    }

    fn defect(&self) -> f64 {
        functionals::defect(&self.inner).value
    }

    fn hermite_projection(&self, q: usize) -> f64 {
        functionals::hermite_projection(&self.inner, q).value
    }

    /// Truncated chaos expansion `sum_{q>=1} J_q / q! h_q` for `coeffs[q] = J_q`.
    fn generic_functional(&self, coeffs: Vec<f64>) -> PyResult<f64> {
        let c = ChaosCoefficients::new(coeffs).map_err(py_err)?;
        functionals::generic_functional(&self.inner, &c)
            .map(|v| v.value)
            .map_err(py_err)
    }
}

#[pyfunction]
#[pyo3(signature = (d, ell, seed, resolution=None))]
fn simulate(d: usize, ell: usize, seed: u64, resolution: Option<usize>) -> PyResult<PySample> {
    let res = resolution.unwrap_or(if d == 2 { (2 * ell).max(8) } else { 40 });
    let grid = Arc::new(build_grid(d, res).map_err(py_err)?);
    let sampler = FieldSampler::new(grid, ell).map_err(py_err)?;
    Ok(PySample {
        inner: sampler.sample(seed),
    })
}

#[pyfunction]
#[pyo3(signature = (z, truncation=8))]
fn indicator_coeffs(z: f64, truncation: usize) -> PyResult<Vec<f64>> {
    functionals::indicator_coeffs(z, truncation)
        .map(|c| c.coeffs().to_vec())
        .map_err(py_err)
}

#[pyclass(name = "EnsembleSummary", frozen, get_all)]
struct PySummary {
    replicates: usize,
    values: Vec<f64>,
    mean: f64,
    variance: f64,
    standardized: Vec<f64>,
    ks_to_normal: Option<f64>,
    w1_to_normal: Option<f64>,
    cum4: Option<f64>,
    seed: u64,
    mean_stderr: f64,
    variance_stderr: f64,
}

impl From<EnsembleSummary> for PySummary {
    fn from(s: EnsembleSummary) -> Self {
        Self {
            mean_stderr: s.mean_stderr(),
            variance_stderr: s.variance_stderr(),
            replicates: s.replicates,
            mean: s.mean,
            variance: s.variance,
            ks_to_normal: s.ks_to_normal,
            w1_to_normal: s.w1_to_normal,
            cum4: s.cum4,
            seed: s.seed,
            values: s.values,
            standardized: s.standardized,
        }
    }
}

fn parse_functional(kind: &str, z: f64, q: usize) -> PyResult<Functional> {
    match kind {
        "excursion" => Ok(Functional::Excursion { z }),
        "defect" => Ok(Functional::Defect),
        "projection" => Ok(Functional::Projection { q }),
        other => Err(PyValueError::new_err(format!(
            "unknown functional {other:?}; expected excursion, defect or projection"
        ))),
    }
}

/// Monte Carlo ensemble of one functional; `functional` is one of
/// `"excursion"` (level `z`), `"defect"` or `"projection"` (order `q`).
#[pyfunction]
#[pyo3(signature = (d, ell, resolution, functional, replicates=2000, seed=0, z=1.0, q=2))]
#[allow(clippy::too_many_arguments)]
fn run_ensemble(
    py: Python<'_>,
    d: usize,
    ell: usize,
    resolution: usize,
    functional: &str,
    replicates: usize,
    seed: u64,
    z: f64,
    q: usize,
) -> PyResult<PySummary> {
    let experiment = stats::Experiment {
        d,
        ell,
        resolution,
        functional: parse_functional(functional, z, q)?,
    };
    py.detach(|| stats::run_ensemble(&experiment, replicates, seed))
        .map(PySummary::from)
        .map_err(py_err)
}

#[pyfunction]
fn ks_distance(values: Vec<f64>) -> PyResult<f64> {
    stats::ks_distance(&values).map_err(py_err)
}

#[pyfunction]
fn w1_distance(values: Vec<f64>) -> PyResult<f64> {
    stats::w1_distance(&values).map_err(py_err)
}

#[pyfunction]
fn empirical_cum4(values: Vec<f64>) -> PyResult<f64> {
    stats::empirical_cum4(&values).map_err(py_err)
}

/// `(slope, r2)` of the log-log fit.
#[pyfunction]
fn rate_fit(pairs: Vec<(f64, f64)>) -> PyResult<(f64, f64)> {
    stats::rate_fit(&pairs).map(|f| (f.slope, f.r2)).map_err(py_err)
}

#[pymodule]
fn sphere_chaos_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(gegenbauer, m)?)?;
    m.add_function(wrap_pyfunction!(gegenbauer_batch, m)?)?;
    m.add_function(wrap_pyfunction!(hermite, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(gauss_pdf_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(sphere_measure, m)?)?;
    m.add_function(wrap_pyfunction!(moment_integral, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_constant, m)?)?;
    m.add_function(wrap_pyfunction!(projection_variance, m)?)?;
    m.add_function(wrap_pyfunction!(scaling_law, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(indicator_coeffs, m)?)?;
    m.add_function(wrap_pyfunction!(run_ensemble, m)?)?;
    m.add_function(wrap_pyfunction!(ks_distance, m)?)?;
    m.add_function(wrap_pyfunction!(w1_distance, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_cum4, m)?)?;
    m.add_function(wrap_pyfunction!(rate_fit, m)?)?;
    m.add_class::<PyGrid>()?;
    m.add_class::<PySampler>()?;
    m.add_class::<PySample>()?;
    m.add_class::<PySummary>()?;
    Ok(())
}
