//! Python bindings: scenarios, noise draws, the three estimators and the
//! Monte Carlo harness. Positions cross the boundary as `(x, y)` tuples and
//! range matrices as lists of rows, one row per transmitter.

use nalgebra::DMatrix;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use minmax_core::estimators::{self, EstimateError, MinMaxOptions};
use minmax_core::geometry::{self, BoundingBox, MeasurementSet, Point2};
use minmax_core::harness::{self, ExperimentConfig, HarnessError};
use minmax_core::noise;
use minmax_core::sdp_model;

type Xy = (f64, f64);
type Draw = (Vec<Vec<f64>>, Vec<Vec<bool>>, f64);

fn pt((x, y): Xy) -> Point2 {
    Point2::new(x, y)
}

fn xy(p: Point2) -> Xy {
    (p.x, p.y)
}

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn estimate_err(e: EstimateError) -> PyErr {
    match e {
        EstimateError::Geometry(_)
        | EstimateError::Model(_)
        | EstimateError::InvalidOptions(_)
        | EstimateError::Empty => value_err(e),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn harness_err(e: HarnessError) -> PyErr {
    match e {
        HarnessError::Config(_) | HarnessError::Parse(_) => value_err(e),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_matrix(rows: Vec<Vec<f64>>) -> PyResult<DMatrix<f64>> {
    let l = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || l == 0 || rows.iter().any(|r| r.len() != l) {
        return Err(value_err(
            "ranges must be a nonempty rectangular list of rows",
        ));
    }
    Ok(DMatrix::from_fn(rows.len(), l, |i, j| rows[i][j]))
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

/// Transmitter and receiver positions in meters.
#[pyclass(name = "Scenario", module = "minmax_loc")]
struct PyScenario {
    inner: geometry::Scenario,
}

#[pymethods]
impl PyScenario {
    #[new]
    fn new(transmitters: Vec<Xy>, receivers: Vec<Xy>) -> PyResult<Self> {
        let inner = geometry::Scenario::new(
            transmitters.into_iter().map(pt).collect(),
            receivers.into_iter().map(pt).collect(),
        )
        .map_err(value_err)?;
        Ok(Self { inner })
    }

    /// Three transmitters and four receivers around a target at (100, 100).
    #[staticmethod]
    fn reference() -> Self {
        Self {
            inner: geometry::Scenario::reference(),
        }
    }

    #[getter]
    fn transmitters(&self) -> Vec<Xy> {
        self.inner.transmitters.iter().copied().map(xy).collect()
    }

    #[getter]
    fn receivers(&self) -> Vec<Xy> {
        self.inner.receivers.iter().copied().map(xy).collect()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn l(&self) -> usize {
        self.inner.l()
    }

    fn centroid(&self) -> Xy {
        xy(self.inner.centroid())
    }

    /// Noiseless bistatic ranges of a target, one row per transmitter.
    fn ranges_for(&self, target: Xy) -> Vec<Vec<f64>> {
        to_rows(&self.inner.ranges_for(pt(target)))
    }

    fn __repr__(&self) -> String {
        format!("Scenario(m={}, l={})", self.inner.m(), self.inner.l())
    }
}

/// `beta·N(mu, sigma²) + (1 − beta)·N(mu_check, sigma_check²)` range errors.
#[pyclass(name = "GaussianMixtureModel", module = "minmax_loc")]
struct PyMixture {
    inner: noise::GaussianMixtureModel,
}

#[pymethods]
impl PyMixture {
    #[new]
    fn new(beta: f64, mu: f64, sigma: f64, mu_check: f64, sigma_check: f64) -> PyResult<Self> {
        let inner = noise::GaussianMixtureModel::new(beta, mu, sigma, mu_check, sigma_check)
            .map_err(value_err)?;
        Ok(Self { inner })
    }

    fn mean(&self) -> f64 {
        self.inner.mean()
    }

    /// Returns `(errors, nominal_flags, realized_bound)` for an M×L draw.
    fn sample(&self, m: usize, l: usize, seed: u64) -> PyResult<Draw> {
        let r = self.inner.sample(m, l, seed).map_err(value_err)?;
        let flags = (0..m)
            .map(|i| (0..l).map(|j| r.component_flags[(i, j)]).collect())
            .collect();
        Ok((to_rows(&r.errors), flags, r.realized_bound()))
    }

    fn __repr__(&self) -> String {
        let g = &self.inner;
        format!(
            "GaussianMixtureModel(beta={}, mu={}, sigma={}, mu_check={}, sigma_check={})",
            g.beta, g.mu, g.sigma, g.mu_check, g.sigma_check
        )
    }
}

/// A position estimate with solver or iteration diagnostics.
#[pyclass(name = "Estimate", module = "minmax_loc", frozen)]
struct PyEstimate {
    inner: estimators::Estimate,
}

#[pymethods]
impl PyEstimate {
    #[getter]
    fn position(&self) -> Xy {
        xy(self.inner.position)
    }

    #[getter]
    fn method(&self) -> &str {
        &self.inner.method
    }

    #[getter]
    fn diagnostics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = &self.inner.diagnostics;
        let out = PyDict::new(py);
        out.set_item("solver_status", d.solver_status.map(|s| s.to_string()))?;
        out.set_item("iterations", d.iterations)?;
        out.set_item("objective", d.objective)?;
        out.set_item("inflations", d.inflations)?;
        out.set_item("rho_hat", d.rho_hat)?;
        out.set_item("gradient_steps", d.gradient_steps)?;
        out.set_item("converged", d.converged)?;
        if let Some(g) = d.relaxation_gap {
            out.set_item("relaxation_gap", (g.lambda, g.range_square, g.range))?;
        }
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!(
            "Estimate({}, position={})",
            self.inner.method, self.inner.position
        )
    }
}

#[pyfunction]
fn bistatic_range(x: Xy, transmitter: Xy, receiver: Xy) -> f64 {
    geometry::bistatic_range(pt(x), pt(transmitter), pt(receiver))
}

/// Min-max estimate for ranges known to within `rho_hat` meters.
#[pyfunction]
#[pyo3(signature = (scenario, ranges, rho_hat, infeasibility_inflation = 2.0, max_inflations = 6))]
fn estimate_minmax(
    py: Python<'_>,
    scenario: &PyScenario,
    ranges: Vec<Vec<f64>>,
    rho_hat: f64,
    infeasibility_inflation: f64,
    max_inflations: usize,
) -> PyResult<PyEstimate> {
    let ranges = to_matrix(ranges)?;
    let opts = MinMaxOptions {
        rho_hat,
        infeasibility_inflation,
        max_inflations,
        ..MinMaxOptions::default()
    };
    let sc = scenario.inner.clone();
    let inner = py
        .detach(|| estimators::estimate_minmax(&sc, &ranges, &opts))
        .map_err(estimate_err)?;
    Ok(PyEstimate { inner })
}

/// ℓ2 nonlinear least squares; starts from the sensor centroid by default.
#[pyfunction]
#[pyo3(signature = (scenario, ranges, init = None, max_iter = 100, tol = 1e-9))]
fn estimate_gauss_newton(
    scenario: &PyScenario,
    ranges: Vec<Vec<f64>>,
    init: Option<Xy>,
    max_iter: usize,
    tol: f64,
) -> PyResult<PyEstimate> {
    let sc = &scenario.inner;
    let init = init.map(pt).unwrap_or_else(|| sc.centroid());
    let inner = estimators::estimate_gauss_newton(sc, &to_matrix(ranges)?, init, max_iter, tol)
        .map_err(estimate_err)?;
    Ok(PyEstimate { inner })
}

/// ℓp estimate by iteratively reweighted Gauss-Newton, `0 < p ≤ 2`.
#[pyfunction]
#[pyo3(signature = (scenario, ranges, p, init = None, max_iter = 100, tol = 1e-9, epsilon = 1e-6))]
fn estimate_irls_lp(
    scenario: &PyScenario,
    ranges: Vec<Vec<f64>>,
    p: f64,
    init: Option<Xy>,
    max_iter: usize,
    tol: f64,
    epsilon: f64,
) -> PyResult<PyEstimate> {
    let sc = &scenario.inner;
    let init = init.map(pt).unwrap_or_else(|| sc.centroid());
    let inner =
        estimators::estimate_irls_lp(sc, &to_matrix(ranges)?, p, init, max_iter, tol, epsilon)
            .map_err(estimate_err)?;
    Ok(PyEstimate { inner })
}

#[pyfunction]
fn rmse(positions: Vec<Xy>, truth: Xy) -> PyResult<f64> {
    estimators::rmse_of_points(positions.into_iter().map(pt), pt(truth)).map_err(estimate_err)
}

/// Grid Chebyshev center of the exact feasible set inside a square box.
/// Returns `(center, radius, feasible_count)`.
#[pyfunction]
#[pyo3(signature = (scenario, ranges, rho, center, half_width, grid_step = 0.25))]
fn chebyshev_oracle(
    scenario: &PyScenario,
    ranges: Vec<Vec<f64>>,
    rho: f64,
    center: Xy,
    half_width: f64,
    grid_step: f64,
) -> PyResult<(Xy, f64, usize)> {
    let meas = MeasurementSet::new(to_matrix(ranges)?, rho).map_err(value_err)?;
    let r = geometry::chebyshev_oracle(
        &scenario.inner,
        &meas,
        BoundingBox::square(pt(center), half_width),
        grid_step,
    )
    .map_err(value_err)?;
    Ok((xy(r.center), r.radius, r.feasible_count))
}

/// Variable and cone counts of the relaxed program for a scenario.
#[pyfunction]
fn program_stats<'py>(py: Python<'py>, scenario: &PyScenario) -> PyResult<Bound<'py, PyDict>> {
    let s = sdp_model::stats(&scenario.inner).map_err(value_err)?;
    let out = PyDict::new(py);
    out.set_item("n_var", s.n_var)?;
    out.set_item("n_sd_formula", s.n_sd_formula)?;
    out.set_item("n_sd_census", s.n_sd_census)?;
    out.set_item("block_dims", s.block_dims)?;
    Ok(out)
}

/// JSON experiment config for one of `fig2` … `fig6`.
#[pyfunction]
fn preset(name: &str) -> PyResult<String> {
    Ok(harness::preset(name).map_err(harness_err)?.to_json())
}

/// Runs a JSON experiment config and returns the results as CSV text.
#[pyfunction]
fn run_experiment(py: Python<'_>, config_json: &str) -> PyResult<String> {
    let cfg = ExperimentConfig::from_json(config_json).map_err(harness_err)?;
    let res = py
        .detach(|| harness::run_experiment(&cfg))
        .map_err(harness_err)?;
    Ok(harness::to_csv_string(&res))
}

/// Built-in invariant checks as `(name, passed, detail)` tuples.
#[pyfunction]
fn selftest(py: Python<'_>) -> Vec<(String, bool, String)> {
    py.detach(harness::selftest)
        .into_iter()
        .map(|c| (c.name.to_string(), c.passed, c.detail))
        .collect()
}

#[pymodule]
pub fn minmax_loc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PyMixture>()?;
    m.add_class::<PyEstimate>()?;
    m.add_function(wrap_pyfunction!(bistatic_range, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_minmax, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_gauss_newton, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_irls_lp, m)?)?;
    m.add_function(wrap_pyfunction!(rmse, m)?)?;
    m.add_function(wrap_pyfunction!(chebyshev_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(program_stats, m)?)?;
    m.add_function(wrap_pyfunction!(preset, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}
