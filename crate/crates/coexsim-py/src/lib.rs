//! Python bindings for the coexsim simulator.
//!
//! Build the importable module with
//! `cargo build --release -p coexsim-py --features extension-module`
//! and rename `libcoexsim_py.so` to `coexsim_py.so` on the Python path.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use coexsim::array;
use coexsim::coexistence::{self, NullingDecision};
use coexsim::harness;
use coexsim::optimizer;
use coexsim::rate;
use coexsim::scenario;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_policy(s: &str) -> PyResult<rate::Policy> {
    s.parse().map_err(err)
}

/// Radio-layer parameters shared by every component.
#[pyclass(name = "RadioParams", skip_from_py_object)]
#[derive(Clone)]
struct PyRadioParams {
    inner: scenario::RadioParams,
}

#[pymethods]
impl PyRadioParams {
    #[new]
    #[pyo3(signature = (
        p_l_dbm = 17.0, p_w_dbm = 17.0, gamma_w_dbm = -82.0, gamma_l_dbm = -72.0,
        bandwidth_hz = 20e6, pathloss_exp = 3.0, noise_dbm_per_hz = -174.0,
        n_antennas = 4, t_csat_ms = 80.0, dt_down_ms = 5.0,
        t_on_init_ms = 40.0, t_off_init_ms = 40.0
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        p_l_dbm: f64,
        p_w_dbm: f64,
        gamma_w_dbm: f64,
        gamma_l_dbm: f64,
        bandwidth_hz: f64,
        pathloss_exp: f64,
        noise_dbm_per_hz: f64,
        n_antennas: usize,
        t_csat_ms: f64,
        dt_down_ms: f64,
        t_on_init_ms: f64,
        t_off_init_ms: f64,
    ) -> Self {
        Self {
            inner: scenario::RadioParams {
                p_l_dbm,
                p_w_dbm,
                gamma_w_dbm,
                gamma_l_dbm,
                bandwidth_hz,
                pathloss_exp,
                noise_dbm_per_hz,
                n_antennas,
                t_csat_ms,
                dt_down_ms,
                t_on_init_ms,
                t_off_init_ms,
            },
        }
    }

    #[getter]
    fn n_antennas(&self) -> usize {
        self.inner.n_antennas
    }

    #[getter]
    fn pathloss_exp(&self) -> f64 {
        self.inner.pathloss_exp
    }

    #[getter]
    fn t_csat_ms(&self) -> f64 {
        self.inner.t_csat_ms
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.inner).map_err(err)
    }

    fn __repr__(&self) -> PyResult<String> {
        Ok(format!(
            "RadioParams(K={}, gamma={}, B={:.0})",
            self.inner.n_antennas, self.inner.pathloss_exp, self.inner.bandwidth_hz
        ))
    }
}

/// A sampled geometry: BS at the origin, AP at (d_sep, 0), UEs and STAs
/// scattered in their cells.
#[pyclass(name = "Scenario", skip_from_py_object)]
#[derive(Clone)]
struct PyScenario {
    inner: scenario::Scenario,
}

fn node_dict(py: Python<'_>, n: &scenario::Node) -> PyResult<Py<PyAny>> {
    let d = pyo3::types::PyDict::new(py);
    d.set_item("role", format!("{:?}", n.role))?;
    d.set_item("index", n.index)?;
    d.set_item("angle_from_lte", n.angle_from_lte)?;
    d.set_item("dist_from_lte", n.dist_from_lte)?;
    d.set_item("dist_from_wifi", n.dist_from_wifi)?;
    Ok(d.into_any().unbind())
}

#[pymethods]
impl PyScenario {
    #[staticmethod]
    #[pyo3(signature = (params, d_sep, seed, m = 1, n = 8, radius_lte = 50.0, radius_wifi = 50.0))]
    fn sample(
        params: &PyRadioParams,
        d_sep: f64,
        seed: u64,
        m: usize,
        n: usize,
        radius_lte: f64,
        radius_wifi: f64,
    ) -> PyResult<Self> {
        scenario::sample_scenario(params.inner.clone(), d_sep, m, n, radius_lte, radius_wifi, seed)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    #[getter]
    fn d_sep(&self) -> f64 {
        self.inner.d_sep
    }

    #[getter]
    fn n_stas(&self) -> usize {
        self.inner.stas.len()
    }

    #[getter]
    fn n_ues(&self) -> usize {
        self.inner.ues.len()
    }

    fn ues(&self, py: Python<'_>) -> PyResult<Vec<Py<PyAny>>> {
        self.inner.ues.iter().map(|n| node_dict(py, n)).collect()
    }

    fn stas(&self, py: Python<'_>) -> PyResult<Vec<Py<PyAny>>> {
        self.inner.stas.iter().map(|n| node_dict(py, n)).collect()
    }

    fn ap(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        node_dict(py, &self.inner.ap)
    }

    /// BS-side carrier-sense flags for {AP, STA_1..STA_N}.
    fn sensing_flags(&self) -> Vec<bool> {
        coexistence::bs_sensing_flags(&self.inner)
    }

    /// True when the AP senses the BS under the given beam. `nulled[0]`
    /// is the AP; the default is the matched-filter beam toward UE 0.
    #[pyo3(signature = (nulled = None, served_ue = 0))]
    fn ap_senses_bs(&self, nulled: Option<Vec<bool>>, served_ue: usize) -> PyResult<bool> {
        let nulled = nulled.unwrap_or_else(|| vec![false; self.inner.stas.len() + 1]);
        let decision = NullingDecision { nulled, served_ue };
        let ue = self
            .inner
            .ues
            .get(served_ue)
            .ok_or_else(|| PyValueError::new_err("served_ue out of range"))?;
        let null_thetas: Vec<f64> = decision
            .nulled_indices()
            .map(|i| {
                if i == 0 {
                    self.inner.ap.angle_from_lte
                } else {
                    self.inner.stas[i - 1].angle_from_lte
                }
            })
            .collect();
        let w = array::lcmv_weights(self.inner.params.n_antennas, ue.angle_from_lte, &null_thetas)
            .map_err(err)?;
        Ok(coexistence::ap_senses_bs(&self.inner, &w))
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(d_sep={}, M={}, N={}, seed={})",
            self.inner.d_sep,
            self.inner.ues.len(),
            self.inner.stas.len(),
            self.inner.seed
        )
    }
}

/// Throughputs, airtimes, and delays for one nulling decision.
#[pyclass(name = "ThroughputReport", skip_from_py_object)]
#[derive(Clone)]
struct PyThroughputReport {
    inner: rate::ThroughputReport,
}

#[pymethods]
impl PyThroughputReport {
    #[getter]
    fn lte_throughput(&self) -> f64 {
        self.inner.lte_throughput
    }

    #[getter]
    fn wifi_mean_throughput(&self) -> f64 {
        self.inner.wifi_mean_throughput
    }

    #[getter]
    fn wifi_throughput_per_sta(&self) -> Vec<f64> {
        self.inner.wifi_throughput_per_sta.clone()
    }

    #[getter]
    fn objective_value(&self) -> f64 {
        self.inner.objective_value
    }

    #[getter]
    fn feasible(&self) -> bool {
        self.inner.feasible
    }

    #[getter]
    fn alpha_l(&self) -> f64 {
        self.inner.coex.alpha_l
    }

    #[getter]
    fn alpha_w(&self) -> f64 {
        self.inner.coex.alpha_w
    }

    #[getter]
    fn tau_l_ms(&self) -> f64 {
        self.inner.coex.tau_l_ms
    }

    #[getter]
    fn tau_w_ms(&self) -> f64 {
        self.inner.coex.tau_w_ms
    }

    #[getter]
    fn sigma_w(&self) -> bool {
        self.inner.coex.sigma_w
    }

    #[getter]
    fn n_cs(&self) -> usize {
        self.inner.coex.n_cs
    }

    fn __repr__(&self) -> String {
        format!(
            "ThroughputReport(lte={:.4}, wifi_mean={:.4}, objective={:.4}, feasible={})",
            self.inner.lte_throughput,
            self.inner.wifi_mean_throughput,
            self.inner.objective_value,
            self.inner.feasible
        )
    }
}

/// Output of a nulling solver: the chosen decision and its evaluation.
#[pyclass(name = "NullingSolution", skip_from_py_object)]
#[derive(Clone)]
struct PyNullingSolution {
    inner: optimizer::NullingSolution,
}

#[pymethods]
impl PyNullingSolution {
    /// Null flags for {AP, STA_1..STA_N}.
    #[getter]
    fn nulled(&self) -> Vec<bool> {
        self.inner.decision.nulled.clone()
    }

    #[getter]
    fn ap_nulled(&self) -> bool {
        self.inner.decision.ap_nulled()
    }

    #[getter]
    fn evaluations(&self) -> usize {
        self.inner.evaluations
    }

    #[getter]
    fn method(&self) -> String {
        self.inner.method.as_str().to_string()
    }

    #[getter]
    fn report(&self) -> PyThroughputReport {
        PyThroughputReport {
            inner: self.inner.report.clone(),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "NullingSolution(method={}, nulled={:?}, objective={:.4}, evaluations={})",
            self.inner.method.as_str(),
            self.inner.decision.nulled,
            self.inner.report.objective_value,
            self.inner.evaluations
        )
    }
}

/// Evaluate an explicit nulling decision. `nulled[0]` is the AP.
#[pyfunction]
#[pyo3(signature = (scenario, nulled, policy, served_ue = 0, baseline_wifi = None))]
fn evaluate(
    scenario: &PyScenario,
    nulled: Vec<bool>,
    policy: &str,
    served_ue: usize,
    baseline_wifi: Option<f64>,
) -> PyResult<PyThroughputReport> {
    if nulled.len() != scenario.inner.stas.len() + 1 {
        return Err(PyValueError::new_err(format!(
            "expected {} null flags (AP + STAs), got {}",
            scenario.inner.stas.len() + 1,
            nulled.len()
        )));
    }
    let decision = NullingDecision { nulled, served_ue };
    let policy = parse_policy(policy)?;
    Ok(PyThroughputReport {
        inner: rate::evaluate(&scenario.inner, &decision, policy, baseline_wifi),
    })
}

#[pyfunction]
#[pyo3(signature = (scenario, policy, served_ue = 0))]
fn solve_no_null(scenario: &PyScenario, policy: &str, served_ue: usize) -> PyResult<PyNullingSolution> {
    let policy = parse_policy(policy)?;
    Ok(PyNullingSolution {
        inner: optimizer::solve_no_null(&scenario.inner, policy, served_ue),
    })
}

#[pyfunction]
#[pyo3(signature = (scenario, policy, served_ue = 0))]
fn solve_greedy(scenario: &PyScenario, policy: &str, served_ue: usize) -> PyResult<PyNullingSolution> {
    let policy = parse_policy(policy)?;
    Ok(PyNullingSolution {
        inner: optimizer::solve_greedy(&scenario.inner, policy, served_ue),
    })
}

#[pyfunction]
#[pyo3(signature = (scenario, policy, served_ue = 0))]
fn solve_exhaustive(
    scenario: &PyScenario,
    policy: &str,
    served_ue: usize,
) -> PyResult<PyNullingSolution> {
    let policy = parse_policy(policy)?;
    optimizer::solve_exhaustive(&scenario.inner, policy, served_ue)
        .map(|inner| PyNullingSolution { inner })
        .map_err(err)
}

/// Null-steering beamformer weights as (re, im) pairs; unit norm.
#[pyfunction]
fn lcmv_weights(k: usize, served_theta: f64, null_thetas: Vec<f64>) -> PyResult<Vec<(f64, f64)>> {
    let w = array::lcmv_weights(k, served_theta, &null_thetas).map_err(err)?;
    Ok(w.w.iter().map(|c| (c.re, c.im)).collect())
}

/// Array power gain toward `theta` for the given constraint set.
#[pyfunction]
fn array_gain(k: usize, served_theta: f64, null_thetas: Vec<f64>, theta: f64) -> PyResult<f64> {
    let w = array::lcmv_weights(k, served_theta, &null_thetas).map_err(err)?;
    Ok(array::array_gain(&w, theta))
}

/// T_on trace (ms) under backlogged WiFi, including the initial value.
#[pyfunction]
#[pyo3(signature = (n_cs, steps = 40, params = None))]
fn csat_trace(n_cs: usize, steps: usize, params: Option<&PyRadioParams>) -> Vec<f64> {
    let default = scenario::RadioParams::default();
    let p = params.map_or(&default, |p| &p.inner);
    coexistence::csat_trace_backlogged(p, n_cs, steps)
}

/// Converged LTE-U airtime share with `k_null` sensed nodes nulled.
#[pyfunction]
#[pyo3(signature = (n_cs, k_null = 0))]
fn airtime_lte(n_cs: usize, k_null: usize) -> PyResult<f64> {
    coexistence::airtime_lte(n_cs, k_null).map_err(err)
}

/// Expected channel-access delays (tau_l, tau_w) in ms.
#[pyfunction]
#[pyo3(signature = (alpha_l, t_csat_ms = 80.0, ap_defers = true))]
fn access_delay(alpha_l: f64, t_csat_ms: f64, ap_defers: bool) -> (f64, f64) {
    coexistence::access_delay(alpha_l, t_csat_ms, ap_defers)
}

/// Run the Monte Carlo sweep described by a JSON experiment config.
/// Returns (trials, aggregates) as JSON strings.
#[pyfunction]
fn run_sweep(config_json: &str) -> PyResult<(String, String)> {
    let cfg: harness::ExperimentConfig = serde_json::from_str(config_json).map_err(err)?;
    let trials = harness::run_sweep(&cfg).map_err(err)?;
    let aggs = harness::aggregate(&trials);
    Ok((
        serde_json::to_string(&trials).map_err(err)?,
        serde_json::to_string(&aggs).map_err(err)?,
    ))
}

#[pymodule]
fn coexsim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRadioParams>()?;
    m.add_class::<PyScenario>()?;
    m.add_class::<PyThroughputReport>()?;
    m.add_class::<PyNullingSolution>()?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(solve_no_null, m)?)?;
    m.add_function(wrap_pyfunction!(solve_greedy, m)?)?;
    m.add_function(wrap_pyfunction!(solve_exhaustive, m)?)?;
    m.add_function(wrap_pyfunction!(lcmv_weights, m)?)?;
    m.add_function(wrap_pyfunction!(array_gain, m)?)?;
    m.add_function(wrap_pyfunction!(csat_trace, m)?)?;
    m.add_function(wrap_pyfunction!(airtime_lte, m)?)?;
    m.add_function(wrap_pyfunction!(access_delay, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    Ok(())
}
