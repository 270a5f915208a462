//! Python bindings: `aniso_bootstrap` module.

use aniso_core::engine::{closure as core_closure, make_nr_family, DEFAULT_RULE_CAP};
use aniso_core::experiments::{self as exp, FitModel, LcSearch, ScalingPoint};
use aniso_core::families::stable_set_descriptor;
use aniso_core::spanning::{self, WitnessMode};
use aniso_core::{classify_nr, Geometry, StrongGraphParam};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: aniso_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn geometry(name: &str) -> PyResult<Geometry> {
    name.parse().map_err(err)
}

#[pyclass(name = "NeighborhoodSpec", module = "aniso_bootstrap", frozen)]
struct PySpec {
    inner: aniso_core::NeighborhoodSpec,
}

#[pymethods]
impl PySpec {
    #[new]
    fn new(a: Vec<usize>, r: usize) -> PyResult<Self> {
        Ok(Self {
            inner: aniso_core::NeighborhoodSpec::new(a, r).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn exponents(&self) -> Vec<usize> {
        self.inner.exponents().to_vec()
    }

    #[getter]
    fn threshold(&self) -> usize {
        self.inner.threshold()
    }

    #[getter]
    fn neighborhood_size(&self) -> usize {
        self.inner.neighborhood_size()
    }

    /// `"supercritical"`, `"critical"` or `"subcritical"`.
    fn classify(&self) -> String {
        classify_nr(&self.inner).to_string()
    }

    fn stable_set(&self) -> String {
        stable_set_descriptor(&self.inner).to_string()
    }

    fn __repr__(&self) -> String {
        format!("NeighborhoodSpec({})", self.inner)
    }
}

#[pyclass(name = "Configuration", module = "aniso_bootstrap")]
struct PyConfig {
    inner: aniso_core::Configuration,
}

#[pymethods]
impl PyConfig {
    /// Healthy box with sides `dims`; `sites` are 1-based coordinates.
    #[new]
    #[pyo3(signature = (dims, geometry = "cube", sites = None))]
    fn new(dims: Vec<usize>, geometry: &str, sites: Option<Vec<Vec<i64>>>) -> PyResult<Self> {
        let geom = self::geometry(geometry)?;
        let inner = match sites {
            Some(s) => aniso_core::Configuration::from_sites(dims, geom, &s),
            None => aniso_core::Configuration::new(dims, geom),
        }
        .map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.dims().to_vec()
    }

    #[getter]
    fn geometry(&self) -> String {
        self.inner.geometry().to_string()
    }

    fn infect(&mut self, site: Vec<i64>) -> PyResult<bool> {
        self.inner.infect_site(&site).map_err(err)
    }

    fn is_infected(&self, site: Vec<i64>) -> bool {
        self.inner.is_infected_at(&site)
    }

    fn infected_sites(&self) -> Vec<Vec<i64>> {
        self.inner.infected_sites()
    }

    fn infected_count(&self) -> usize {
        self.inner.infected_count()
    }

    fn is_full(&self) -> bool {
        self.inner.is_full()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Configuration(dims={:?}, geometry={}, infected={})",
            self.inner.dims(),
            self.inner.geometry(),
            self.inner.infected_count()
        )
    }
}

#[pyclass(name = "TrialEstimate", module = "aniso_bootstrap", frozen, get_all)]
struct PyEstimate {
    estimate: f64,
    ci_low: f64,
    ci_high: f64,
    successes: u64,
    trials: u64,
    seed: u64,
    stream_rule: String,
}

impl From<exp::TrialEstimate> for PyEstimate {
    fn from(e: exp::TrialEstimate) -> Self {
        Self {
            estimate: e.estimate,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
            successes: e.successes,
            trials: e.trials,
            seed: e.seed,
            stream_rule: e.stream_rule.to_string(),
        }
    }
}

#[pymethods]
impl PyEstimate {
    fn covers(&self, x: f64) -> bool {
        self.ci_low <= x && x <= self.ci_high
    }

    fn __repr__(&self) -> String {
        format!(
            "TrialEstimate(estimate={}, ci=({}, {}), trials={}, seed={})",
            self.estimate, self.ci_low, self.ci_high, self.trials, self.seed
        )
    }
}

/// Least fixed point of the `𝒩ᵣ` dynamics started from `config`.
#[pyfunction]
fn closure(config: &PyConfig, spec: &PySpec) -> PyResult<PyConfig> {
    if config.inner.dim() != spec.inner.dim() {
        return Err(PyValueError::new_err("configuration and spec differ in dimension"));
    }
    let family = make_nr_family(&spec.inner, DEFAULT_RULE_CAP);
    Ok(PyConfig {
        inner: core_closure(&config.inner, &family),
    })
}

#[pyfunction]
fn percolates(config: &PyConfig, spec: &PySpec) -> PyResult<bool> {
    Ok(closure(config, spec)?.inner.is_full())
}

/// Strong components of `sites` under `‖u − v‖∞ ≤ t`.
#[pyfunction]
fn strong_components(sites: Vec<Vec<i64>>, t: usize) -> PyResult<Vec<Vec<Vec<i64>>>> {
    spanning::strong_components(&sites, StrongGraphParam::new(t).map_err(err)?).map_err(err)
}

/// Witness block `(lo, hi, diam)` for scale `k`.
#[pyfunction]
fn al_witness(config: &PyConfig, spec: &PySpec, k: usize) -> PyResult<(Vec<i64>, Vec<i64>, usize)> {
    let family = make_nr_family(&spec.inner, DEFAULT_RULE_CAP);
    let param = StrongGraphParam::for_spec(&spec.inner);
    let w = spanning::al_witness(&config.inner, &family, param, k, WitnessMode::Block).map_err(err)?;
    let b = w.block();
    Ok((b.lo().to_vec(), b.hi().to_vec(), b.long()))
}

#[pyfunction]
#[pyo3(signature = (spec, length, p, trials, seed, geometry = "cube"))]
fn percolation_probability(
    py: Python<'_>,
    spec: &PySpec,
    length: usize,
    p: f64,
    trials: u64,
    seed: u64,
    geometry: &str,
) -> PyResult<PyEstimate> {
    let geom = self::geometry(geometry)?;
    let s = spec.inner.clone();
    py.detach(|| exp::percolation_probability(&s, geom, length, p, trials, seed))
        .map(Into::into)
        .map_err(err)
}

#[pyfunction]
fn seeded_growth(
    py: Python<'_>,
    spec: &PySpec,
    length: usize,
    seed_block: Vec<usize>,
    p: f64,
    trials: u64,
    seed: u64,
) -> PyResult<PyEstimate> {
    let s = spec.inner.clone();
    py.detach(|| exp::seeded_growth(&s, length, &seed_block, p, trials, seed))
        .map(Into::into)
        .map_err(err)
}

/// Critical length search; returns a dict with `lc`, `bracket`,
/// `unresolved`, `nonmonotone` and per-probe `(L, estimate)` pairs.
#[pyfunction]
#[pyo3(signature = (spec, p, trials_per_probe, seed, max_trials = None))]
fn critical_length<'py>(
    py: Python<'py>,
    spec: &PySpec,
    p: f64,
    trials_per_probe: u64,
    seed: u64,
    max_trials: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut search = LcSearch::new(trials_per_probe);
    if let Some(m) = max_trials {
        search.max_trials_per_probe = m;
    }
    let s = spec.inner.clone();
    let res = py.detach(|| exp::critical_length(&s, p, &search, seed)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("lc", res.lc)?;
    d.set_item("bracket", res.bracket)?;
    d.set_item("unresolved", res.unresolved)?;
    d.set_item("nonmonotone", res.nonmonotone)?;
    let probes: Vec<(usize, f64)> = res.probes.iter().map(|pr| (pr.length, pr.estimate.estimate)).collect();
    d.set_item("probes", probes)?;
    Ok(d)
}

#[pyfunction]
fn center_cluster_stats<'py>(
    py: Python<'py>,
    spec: &PySpec,
    n: usize,
    p: f64,
    cutoff: f64,
    trials: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let s = spec.inner.clone();
    let st = py
        .detach(|| exp::center_cluster_stats(&s, n, p, cutoff, trials, seed))
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("mean_size", st.mean_size)?;
    d.set_item("restricted_mean_size", st.restricted_mean_size)?;
    d.set_item("conditional_mean_size", st.conditional_mean_size)?;
    d.set_item("diam_tail", st.diam_tail)?;
    d.set_item("cutoff", st.cutoff)?;
    d.set_item("center_infected", st.center_infected)?;
    d.set_item("trials", st.trials)?;
    d.set_item("seed", st.seed)?;
    Ok(d)
}

/// Fit of `(p, L_c)` pairs; `model` is `"pure_power"` or `"power_log2"`.
#[pyfunction]
fn scaling_fit<'py>(
    py: Python<'py>,
    spec: &PySpec,
    ps: Vec<f64>,
    lcs: Vec<f64>,
    model: &str,
) -> PyResult<Bound<'py, PyDict>> {
    if ps.len() != lcs.len() {
        return Err(PyValueError::new_err("ps and lcs differ in length"));
    }
    let s = &spec.inner;
    if s.dim() < 2 || s.threshold() <= s.max_exponent() {
        return Err(PyValueError::new_err("scaling fit needs d ≥ 2 and r > a_max"));
    }
    let i = (s.threshold() - s.max_exponent()) as u32;
    let (a1, a2) = (s.exponents()[0], s.exponents()[1]);
    let points = ps
        .iter()
        .zip(&lcs)
        .map(|(&p, &lc)| ScalingPoint::new(p, lc, exp::lambda(p, i, a1, a2)?))
        .collect::<aniso_core::Result<Vec<_>>>()
        .map_err(err)?;
    let m: FitModel = model.parse().map_err(err)?;
    let f = exp::scaling_fit(&points, m).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("model", f.model.to_string())?;
    d.set_item("slope", f.slope)?;
    d.set_item("intercept", f.intercept)?;
    d.set_item("residuals", f.residuals)?;
    d.set_item("rss", f.rss)?;
    d.set_item("ratios", f.ratios)?;
    d.set_item("ratio_spread", f.ratio_spread)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (successes, trials, z = exp::WILSON_Z))]
fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    exp::wilson_interval(successes, trials, z)
}

#[pyfunction]
fn lambda_i(p: f64, i: u32, a1: usize, a2: usize) -> PyResult<f64> {
    exp::lambda(p, i, a1, a2).map_err(err)
}

#[pymodule]
fn aniso_bootstrap(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpec>()?;
    m.add_class::<PyConfig>()?;
    m.add_class::<PyEstimate>()?;
    m.add_function(wrap_pyfunction!(closure, m)?)?;
    m.add_function(wrap_pyfunction!(percolates, m)?)?;
    m.add_function(wrap_pyfunction!(strong_components, m)?)?;
    m.add_function(wrap_pyfunction!(al_witness, m)?)?;
    m.add_function(wrap_pyfunction!(percolation_probability, m)?)?;
    m.add_function(wrap_pyfunction!(seeded_growth, m)?)?;
    m.add_function(wrap_pyfunction!(critical_length, m)?)?;
    m.add_function(wrap_pyfunction!(center_cluster_stats, m)?)?;
    m.add_function(wrap_pyfunction!(scaling_fit, m)?)?;
    m.add_function(wrap_pyfunction!(wilson_interval, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_i, m)?)?;
    m.add("STREAM_RULE", exp::STREAM_RULE)?;
    Ok(())
}
