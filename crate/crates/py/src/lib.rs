//! Python bindings. Structured values cross the boundary as plain dicts and
//! lists, converted through the `json` module.

use contam_core::harness::{self, ComponentFile, ExperimentConfig};
use contam_core::sim::{Init, World};
use contam_core::strategies::strategy_by_name;
use contam_core::{bounds, geometry, AgentSnapshot, WorldConfig};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

create_exception!(contam, ContamError, PyValueError);

fn err(e: contam_core::Error) -> PyErr {
    ContamError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| err(e.into()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| err(e.into()))
}

fn world_config(config: Option<&Bound<'_, PyAny>>) -> PyResult<WorldConfig> {
    let cfg = match config {
        Some(c) => from_py(c)?,
        None => WorldConfig::default(),
    };
    cfg.validate().map_err(err)?;
    Ok(cfg)
}

fn initial(n: usize, agents: Option<&Bound<'_, PyAny>>) -> PyResult<Init> {
    Ok(match agents {
        Some(a) => Init::Explicit {
            agents: from_py::<Vec<AgentSnapshot>>(a)?,
        },
        None => Init::Random {
            n_healthy: n,
            n_contaminated: n,
        },
    })
}

/// Derived bounds for the given radii, as a dict.
#[pyfunction]
#[pyo3(signature = (s_min=2.0, s_max=6.0, d_r=0.25))]
fn bounds_report(py: Python<'_>, s_min: f64, s_max: f64, d_r: f64) -> PyResult<Bound<'_, PyAny>> {
    let cfg = WorldConfig::with_radii(s_min, s_max, d_r);
    cfg.validate().map_err(err)?;
    to_py(py, &bounds::report(&cfg).map_err(err)?)
}

#[pyfunction]
fn dense_circle_capacity(radius: f64, d_r: f64) -> PyResult<usize> {
    geometry::dense_circle_capacity(radius, d_r).map_err(err)
}

/// Weak point report of a component given either as `{"adjacency": ...}` or
/// as placed agents.
#[pyfunction]
fn wpc<'py>(py: Python<'py>, component: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let text: String = py.import("json")?.call_method1("dumps", (component,))?.extract()?;
    let file = ComponentFile::from_json(&text).map_err(err)?;
    to_py(py, &harness::wpc_report(&file).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (n=50, healthy="circle", contaminated="circle", seed=0, config=None, agents=None))]
fn run_game<'py>(
    py: Python<'py>,
    n: usize,
    healthy: &str,
    contaminated: &str,
    seed: u64,
    config: Option<&Bound<'py, PyAny>>,
    agents: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    let mut game = Game::new(n, healthy, contaminated, seed, config, agents)?;
    game.run(py)
}

#[pyfunction]
#[pyo3(signature = (config, jobs=None))]
fn run_batch<'py>(py: Python<'py>, config: &Bound<'py, PyAny>, jobs: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let cfg: ExperimentConfig = from_py(config)?;
    let jobs = harness::resolve_jobs(jobs, cfg.jobs).map_err(err)?;
    let out = py.detach(|| harness::run_batch(&cfg, jobs)).map_err(err)?;
    to_py(py, &out)
}

/// Two-sided Welch test; returns `(t, p)`.
#[pyfunction]
fn welch_test(a: Vec<f64>, b: Vec<f64>) -> PyResult<(f64, f64)> {
    harness::welch_test(&a, &b).map_err(err)
}

/// A game that can be stepped from Python.
#[pyclass(module = "contam")]
struct Game {
    world: World,
}

#[pymethods]
impl Game {
    #[new]
    #[pyo3(signature = (n=50, healthy="circle", contaminated="circle", seed=0, config=None, agents=None))]
    fn new(
        n: usize,
        healthy: &str,
        contaminated: &str,
        seed: u64,
        config: Option<&Bound<'_, PyAny>>,
        agents: Option<&Bound<'_, PyAny>>,
    ) -> PyResult<Self> {
        let cfg = world_config(config)?;
        let init = initial(n, agents)?;
        let h = strategy_by_name(healthy, &cfg).map_err(err)?;
        let c = strategy_by_name(contaminated, &cfg).map_err(err)?;
        let world = World::new(cfg, &init, h, c, seed).map_err(err)?;
        Ok(Self { world })
    }

    /// Steps taken so far.
    #[getter]
    fn step_count(&self) -> u64 {
        self.world.step
    }

    /// `(healthy, contaminated)`.
    fn counts(&self) -> (usize, usize) {
        self.world.counts()
    }

    fn step(&mut self) -> PyResult<()> {
        self.world.step().map_err(err)
    }

    /// Current positions, states and formations.
    fn record<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.world.record())
    }

    /// Plays on until a termination condition holds. The history covers only
    /// the steps taken by this call.
    fn run<'py>(&mut self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let world = &mut self.world;
        let res = py.detach(|| world.run(|_| Ok(()))).map_err(err)?;
        to_py(py, &res)
    }
}

#[pymodule]
fn contam(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ContamError", m.py().get_type::<ContamError>())?;
    m.add_class::<Game>()?;
    m.add_function(wrap_pyfunction!(bounds_report, m)?)?;
    m.add_function(wrap_pyfunction!(dense_circle_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(wpc, m)?)?;
    m.add_function(wrap_pyfunction!(run_game, m)?)?;
    m.add_function(wrap_pyfunction!(run_batch, m)?)?;
    m.add_function(wrap_pyfunction!(welch_test, m)?)?;
    Ok(())
}
