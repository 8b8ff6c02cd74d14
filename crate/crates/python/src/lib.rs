//! Python bindings for the `spats` crate.
//!
//! Domain and configuration errors surface as `ValueError`, numerical
//! failures as `ArithmeticError`.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use spats::negativity::{self, NegativityResult};
use spats::states::{self, DEFAULT_TAIL_TOL};
use spats::threshold::{self, TheoremConfig, TheoremReport, ThresholdReport};
use spats::wigner::{self, PhasePoint};

fn to_py(err: spats::Error) -> PyErr {
    match err {
        spats::Error::Domain(msg) | spats::Error::Config(msg) => PyValueError::new_err(msg),
        e @ spats::Error::Numerical { .. } => PyArithmeticError::new_err(e.to_string()),
    }
}

/// Mixture of Fock states with non-negative weights.
#[pyclass(name = "FockDiagonalState", module = "pyspats", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyFockDiagonalState {
    inner: states::FockDiagonalState,
}

#[pymethods]
impl PyFockDiagonalState {
    #[new]
    #[pyo3(signature = (weights, tail_tol = DEFAULT_TAIL_TOL))]
    fn new(weights: Vec<f64>, tail_tol: f64) -> PyResult<Self> {
        let inner = states::FockDiagonalState::from_weights(weights, tail_tol).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn fock(l: usize) -> Self {
        Self {
            inner: states::FockDiagonalState::fock(l),
        }
    }

    #[staticmethod]
    fn spats(bar_n: f64) -> PyResult<Self> {
        spats_weights(bar_n, DEFAULT_TAIL_TOL)
    }

    #[staticmethod]
    fn thermal(n_mean: f64) -> PyResult<Self> {
        thermal_weights(n_mean, DEFAULT_TAIL_TOL)
    }

    #[staticmethod]
    fn random_zero_vacuum(seed: u64, cutoff: usize) -> PyResult<Self> {
        let inner = states::random_zero_vacuum_state(seed, cutoff).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    #[getter]
    fn cutoff(&self) -> usize {
        self.inner.cutoff()
    }

    fn mean_photon(&self) -> f64 {
        states::mean_photon(&self.inner)
    }

    fn vacuum_population(&self) -> f64 {
        states::vacuum_population(&self.inner)
    }

    #[pyo3(signature = (channel, step_tol = 1e-10))]
    fn evolve(&self, channel: &PyChannelParams, step_tol: f64) -> PyResult<Self> {
        let inner = states::evolve_fock_diagonal(&self.inner, &channel.inner, step_tol).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn wigner(&self, q: f64, p: f64) -> PyResult<f64> {
        wigner::eval_fock_diagonal_wigner(PhasePoint::new(q, p), &self.inner).map_err(to_py)
    }

    fn q_function(&self, q: f64, p: f64) -> f64 {
        wigner::eval_q_function(PhasePoint::new(q, p), &self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.weights().len()
    }

    fn __repr__(&self) -> String {
        format!(
            "FockDiagonalState(cutoff={}, mean_photon={})",
            self.inner.cutoff(),
            states::mean_photon(&self.inner)
        )
    }
}

/// Thermal bath of mean `n` acting for a dimensionless time `gamma_t`.
#[pyclass(name = "ChannelParams", module = "pyspats", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyChannelParams {
    inner: states::ChannelParams,
}

#[pymethods]
impl PyChannelParams {
    #[new]
    fn new(n: f64, gamma_t: f64) -> PyResult<Self> {
        let inner = states::ChannelParams::new(n, gamma_t).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n(&self) -> f64 {
        self.inner.n()
    }

    #[getter]
    fn gamma_t(&self) -> f64 {
        self.inner.gamma_t()
    }

    fn __repr__(&self) -> String {
        format!("ChannelParams(n={}, gamma_t={})", self.inner.n(), self.inner.gamma_t())
    }
}

#[pyfunction]
#[pyo3(signature = (bar_n, tail_tol = DEFAULT_TAIL_TOL))]
fn spats_weights(bar_n: f64, tail_tol: f64) -> PyResult<PyFockDiagonalState> {
    let inner = states::spats_weights(bar_n, tail_tol).map_err(to_py)?;
    Ok(PyFockDiagonalState { inner })
}

#[pyfunction]
#[pyo3(signature = (n_mean, tail_tol = DEFAULT_TAIL_TOL))]
fn thermal_weights(n_mean: f64, tail_tol: f64) -> PyResult<PyFockDiagonalState> {
    let inner = states::thermal_weights(n_mean, tail_tol).map_err(to_py)?;
    Ok(PyFockDiagonalState { inner })
}

#[pyfunction]
fn eval_thermal_wigner(q: f64, p: f64, n_mean: f64) -> f64 {
    wigner::eval_thermal_wigner(PhasePoint::new(q, p), n_mean)
}

#[pyfunction]
fn eval_spats_wigner_initial(q: f64, p: f64, bar_n: f64) -> f64 {
    wigner::eval_spats_wigner_initial(PhasePoint::new(q, p), bar_n)
}

#[pyfunction]
fn eval_spats_wigner_evolved(q: f64, p: f64, channel: &PyChannelParams, bar_n: f64) -> f64 {
    wigner::eval_spats_wigner_evolved(PhasePoint::new(q, p), &channel.inner, bar_n)
}

#[pyfunction]
fn eval_fock_wigner(q: f64, p: f64, l: usize) -> PyResult<f64> {
    wigner::eval_fock_wigner(PhasePoint::new(q, p), l).map_err(to_py)
}

/// Closed-form Wigner values on a square lattice, row-major in `q`.
#[pyfunction]
#[pyo3(signature = (channel, bar_n, extent, resolution = wigner::DEFAULT_RESOLUTION))]
fn spats_wigner_grid(channel: &PyChannelParams, bar_n: f64, extent: f64, resolution: usize) -> PyResult<Vec<Vec<f64>>> {
    let spec = wigner::GridSpec::square(extent, resolution).map_err(to_py)?;
    let grid =
        wigner::sample_grid(|pt| wigner::eval_spats_wigner_evolved(pt, &channel.inner, bar_n), &spec).map_err(to_py)?;
    Ok(grid.values().chunks(spec.np).map(<[f64]>::to_vec).collect())
}

fn negativity_dict<'py>(py: Python<'py>, r: &NegativityResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("volume", r.volume)?;
    d.set_item("region_radius", r.region_radius)?;
    let method = match r.method {
        negativity::NegativityMethod::Analytic => "analytic",
        negativity::NegativityMethod::Quadrature => "quadrature",
    };
    d.set_item("method", method)?;
    Ok(d)
}

#[pyfunction]
fn pnw_spats_analytic<'py>(py: Python<'py>, channel: &PyChannelParams, bar_n: f64) -> PyResult<Bound<'py, PyDict>> {
    negativity_dict(py, &negativity::pnw_spats_analytic(&channel.inner, bar_n))
}

#[pyfunction]
#[pyo3(signature = (channel, bar_n, abs_tol = 1e-9))]
fn pnw_spats_numeric<'py>(
    py: Python<'py>,
    channel: &PyChannelParams,
    bar_n: f64,
    abs_tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let extent = wigner::default_extent(bar_n, channel.inner.n());
    let f = |pt| wigner::eval_spats_wigner_evolved(pt, &channel.inner, bar_n);
    let r = py
        .detach(|| negativity::pnw_numeric(&f, extent, 64, abs_tol))
        .map_err(to_py)?;
    negativity_dict(py, &r)
}

/// Negative volume of a Fock-diagonal state, integrated numerically.
#[pyfunction]
#[pyo3(signature = (state, extent = 8.0, abs_tol = 1e-9))]
fn pnw_fock_numeric<'py>(
    py: Python<'py>,
    state: &PyFockDiagonalState,
    extent: f64,
    abs_tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let inner = &state.inner;
    if inner.cutoff() > wigner::MAX_LAGUERRE_INDEX {
        return Err(PyValueError::new_err(format!(
            "cutoff {} above the supported {}",
            inner.cutoff(),
            wigner::MAX_LAGUERRE_INDEX
        )));
    }
    let f = |pt| wigner::eval_fock_diagonal_wigner(pt, inner).unwrap_or(f64::NAN);
    let r = py
        .detach(|| negativity::pnw_numeric(&f, extent, 64, abs_tol))
        .map_err(to_py)?;
    negativity_dict(py, &r)
}

#[pyfunction]
fn threshold_spats(n: f64) -> f64 {
    threshold::threshold_spats(n)
}

#[pyfunction]
fn threshold_general(gamma_tc_loss: f64, n: f64) -> f64 {
    threshold::threshold_general(gamma_tc_loss, n)
}

fn threshold_dict<'py>(py: Python<'py>, r: &ThresholdReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("n", r.n)?;
    d.set_item("bar_n", r.bar_n)?;
    d.set_item("gamma_t_c_analytic", r.gamma_t_c_analytic)?;
    d.set_item("gamma_t_c_numeric", r.gamma_t_c_numeric)?;
    d.set_item("residual", r.residual)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (n, bar_n, tol = 1e-12))]
fn threshold_numeric_spats<'py>(py: Python<'py>, n: f64, bar_n: f64, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let r = threshold::threshold_numeric_spats(n, bar_n, tol).map_err(to_py)?;
    threshold_dict(py, &r)
}

fn theorem_dict<'py>(py: Python<'py>, r: &TheoremReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("state_id", &r.state_id)?;
    d.set_item("n", r.n)?;
    d.set_item("gamma_t_c", r.gamma_t_c)?;
    d.set_item("w_origin_at_threshold", r.w_origin_at_threshold)?;
    d.set_item("min_w_at_threshold", r.min_w_at_threshold)?;
    d.set_item("q_identity_residual", r.q_identity_residual)?;
    d.set_item("q_identity_constant", r.q_identity_constant)?;
    d.set_item("passed", r.passed)?;
    d.set_item("scope", &r.scope)?;
    Ok(d)
}

/// Checks that a zero-vacuum state is non-negative at the channel threshold.
#[pyfunction]
#[pyo3(signature = (state, n, state_id = "custom"))]
fn verify_zero_vacuum_theorem<'py>(
    py: Python<'py>,
    state: &PyFockDiagonalState,
    n: f64,
    state_id: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let config = TheoremConfig::default();
    let r = py
        .detach(|| threshold::verify_zero_vacuum_theorem(state_id, &state.inner, n, &config))
        .map_err(to_py)?;
    theorem_dict(py, &r)
}

#[pyfunction]
#[pyo3(signature = (base_seed, count, cutoff = 12, channel_ns = vec![0.0, 0.5, 1.0]))]
fn verify_theorem_batch<'py>(
    py: Python<'py>,
    base_seed: u64,
    count: usize,
    cutoff: usize,
    channel_ns: Vec<f64>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let config = TheoremConfig::default();
    let reports = py
        .detach(|| threshold::verify_theorem_batch(base_seed, count, cutoff, &channel_ns, &config))
        .map_err(to_py)?;
    reports.iter().map(|r| theorem_dict(py, r)).collect()
}

#[pymodule]
pub fn pyspats(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFockDiagonalState>()?;
    m.add_class::<PyChannelParams>()?;
    m.add_function(wrap_pyfunction!(spats_weights, m)?)?;
    m.add_function(wrap_pyfunction!(thermal_weights, m)?)?;
    m.add_function(wrap_pyfunction!(eval_thermal_wigner, m)?)?;
    m.add_function(wrap_pyfunction!(eval_spats_wigner_initial, m)?)?;
    m.add_function(wrap_pyfunction!(eval_spats_wigner_evolved, m)?)?;
    m.add_function(wrap_pyfunction!(eval_fock_wigner, m)?)?;
    m.add_function(wrap_pyfunction!(spats_wigner_grid, m)?)?;
    m.add_function(wrap_pyfunction!(pnw_spats_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(pnw_spats_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(pnw_fock_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_spats, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_general, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_numeric_spats, m)?)?;
    m.add_function(wrap_pyfunction!(verify_zero_vacuum_theorem, m)?)?;
    m.add_function(wrap_pyfunction!(verify_theorem_batch, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
