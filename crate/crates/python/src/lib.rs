//! Python bindings for the multilayer shallow-water solver.

use std::collections::HashMap;
use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use mlsw_core::harness::{self, ScenarioConfig};
use mlsw_core::steppers::{rk3_time_step, step_imex_ark2, step_rk3, step_theta};
use mlsw_core::{Error, Scheme};

create_exception!(mlsw, ConfigError, PyValueError, "Invalid configuration.");
create_exception!(mlsw, SolverError, PyRuntimeError, "The solver aborted.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Config(c) => ConfigError::new_err(c.to_string()),
        Error::Solver { .. } => SolverError::new_err(e.to_string()),
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
    }
}

fn config_err(e: mlsw_core::ConfigError) -> PyErr {
    ConfigError::new_err(e.to_string())
}

/// Scenario configuration. Start from a named scenario and adjust fields.
#[pyclass(name = "Scenario", module = "mlsw", from_py_object)]
#[derive(Clone)]
struct PyScenario {
    cfg: ScenarioConfig,
}

#[pymethods]
impl PyScenario {
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        let cfg = harness::build_scenario(name).map_err(config_err)?;
        Ok(Self { cfg })
    }

    /// Parses a TOML configuration.
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let cfg = harness::parse_config(text).map_err(config_err)?;
        Ok(Self { cfg })
    }

    fn to_toml(&self) -> PyResult<String> {
        toml::to_string(&self.cfg).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn names() -> Vec<&'static str> {
        harness::SCENARIOS.to_vec()
    }

    #[getter]
    fn name(&self) -> &str {
        &self.cfg.name
    }

    #[getter]
    fn scheme(&self) -> String {
        self.cfg.scheme.to_string()
    }

    #[setter]
    fn set_scheme(&mut self, s: &str) -> PyResult<()> {
        self.cfg.scheme = s.parse().map_err(config_err)?;
        Ok(())
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.cfg.dt
    }

    #[setter]
    fn set_dt(&mut self, v: f64) {
        self.cfg.dt = v;
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.cfg.theta
    }

    #[setter]
    fn set_theta(&mut self, v: f64) {
        self.cfg.theta = v;
    }

    #[getter]
    fn courant(&self) -> f64 {
        self.cfg.courant
    }

    #[setter]
    fn set_courant(&mut self, v: f64) {
        self.cfg.courant = v;
    }

    #[getter]
    fn t_final(&self) -> f64 {
        self.cfg.t_final
    }

    /// Setting the final time drops output times beyond it.
    #[setter]
    fn set_t_final(&mut self, v: f64) {
        self.cfg.t_final = v;
        self.cfg.snapshots.retain(|&s| s <= v);
    }

    #[getter]
    fn snapshots(&self) -> Vec<f64> {
        self.cfg.snapshots.clone()
    }

    #[setter]
    fn set_snapshots(&mut self, v: Vec<f64>) {
        self.cfg.snapshots = v;
    }

    /// Layer count or `x_lo:x_hi:N;...` regions.
    fn set_layers(&mut self, spec: &str) -> PyResult<()> {
        self.cfg.layers = harness::parse_layers(spec, self.cfg.grid.x_start, self.cfg.grid.x_end).map_err(config_err)?;
        Ok(())
    }

    fn validate(&self) -> PyResult<()> {
        self.cfg.validate().map_err(config_err)
    }

    fn model(&self) -> PyResult<PyModel> {
        let model = self.cfg.build_model().map_err(config_err)?;
        Ok(PyModel {
            model,
            cfg: self.cfg.clone(),
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario({:?}, scheme={}, dt={}, t_final={})",
            self.cfg.name, self.cfg.scheme, self.cfg.dt, self.cfg.t_final
        )
    }
}

/// Prognostic fields at one time.
#[pyclass(name = "State", module = "mlsw", from_py_object)]
#[derive(Clone)]
struct PyState {
    state: mlsw_core::State,
}

#[pymethods]
impl PyState {
    #[getter]
    fn time(&self) -> f64 {
        self.state.time
    }

    #[getter]
    fn eta(&self) -> Vec<f64> {
        self.state.eta.clone()
    }

    #[getter]
    fn b(&self) -> Vec<f64> {
        self.state.b.clone()
    }

    /// Edge velocities, flattened edge by edge from the bed up.
    #[getter]
    fn u(&self) -> Vec<f64> {
        self.state.u.clone()
    }

    #[getter]
    fn rho(&self) -> Vec<f64> {
        self.state.rho.clone()
    }

    fn depths(&self) -> Vec<f64> {
        self.state.depths()
    }

    fn __repr__(&self) -> String {
        format!("State(time={}, cells={})", self.state.time, self.state.eta.len())
    }
}

/// Grid, layering, physics and boundary conditions of a scenario.
#[pyclass(name = "Model", module = "mlsw")]
struct PyModel {
    model: mlsw_core::Model,
    cfg: ScenarioConfig,
}

#[pymethods]
impl PyModel {
    #[getter]
    fn n_cells(&self) -> usize {
        self.model.grid.n_cells()
    }

    #[getter]
    fn dof_count(&self) -> usize {
        self.model.layout.dof_count()
    }

    #[getter]
    fn centers(&self) -> Vec<f64> {
        self.model.grid.centers.clone()
    }

    fn edge_layers(&self, e: usize) -> PyResult<usize> {
        if e > self.model.grid.n_cells() {
            return Err(PyValueError::new_err(format!("edge {e} out of range")));
        }
        Ok(self.model.layout.edge_layers(e))
    }

    fn initial_state(&self) -> PyState {
        PyState {
            state: self.cfg.initial_state(&self.model),
        }
    }

    /// One step of `scheme` (the scenario's when omitted). The explicit
    /// scheme picks its own step from the Courant target when `dt` is omitted.
    #[pyo3(signature = (state, dt=None, scheme=None, theta=None))]
    fn step(&self, state: &PyState, dt: Option<f64>, scheme: Option<&str>, theta: Option<f64>) -> PyResult<PyState> {
        let scheme: Scheme = match scheme {
            Some(s) => s.parse().map_err(config_err)?,
            None => self.cfg.scheme,
        };
        let theta = theta.unwrap_or(self.cfg.theta);
        let s = &state.state;
        let result = match scheme {
            Scheme::Theta => step_theta(&self.model, s, theta, dt.unwrap_or(self.cfg.dt)),
            Scheme::Imex => step_imex_ark2(&self.model, s, dt.unwrap_or(self.cfg.dt)),
            Scheme::Rk3 => {
                let dt = dt.unwrap_or_else(|| rk3_time_step(&self.model, s, self.cfg.courant));
                step_rk3(&self.model, s, dt)
            }
        };
        let (next, _) = result.map_err(|e| SolverError::new_err(e.to_string()))?;
        Ok(PyState { state: next })
    }

    fn water_volume(&self, state: &PyState) -> f64 {
        state.state.water_volume(&self.model.grid)
    }

    fn tracer_mass(&self, state: &PyState) -> f64 {
        state.state.tracer_mass(&self.model.grid, &self.model.layout)
    }

    /// Relative l2 and max-norm errors of `solution` against `reference`.
    fn errors(&self, solution: &PyState, reference: &PyState) -> PyResult<HashMap<String, f64>> {
        let e = harness::compute_errors(&self.model.grid, &self.model.layout, &solution.state, &reference.state)
            .map_err(|e| SolverError::new_err(e.to_string()))?;
        Ok(HashMap::from([
            ("eta_l2".to_string(), e.eta_l2),
            ("eta_linf".to_string(), e.eta_linf),
            ("u_l2".to_string(), e.u_l2),
            ("u_linf".to_string(), e.u_linf),
            ("b_l2".to_string(), e.b_l2),
            ("b_linf".to_string(), e.b_linf),
        ]))
    }

    /// Snapshot table in CSV form.
    fn snapshot_csv(&self, state: &PyState) -> String {
        harness::snapshot_csv(&self.model.grid, &self.model.layout, &state.state)
    }
}

/// Outcome of an in-memory run.
#[pyclass(name = "Simulation", module = "mlsw")]
struct PySimulation {
    sim: harness::Simulation,
}

#[pymethods]
impl PySimulation {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.sim.times.clone()
    }

    #[getter]
    fn snapshots(&self) -> Vec<PyState> {
        self.sim.snapshots.iter().map(|s| PyState { state: s.clone() }).collect()
    }

    #[getter]
    fn initial(&self) -> PyState {
        PyState {
            state: self.sim.initial.clone(),
        }
    }

    #[getter]
    fn steps(&self) -> usize {
        self.sim.steps
    }

    #[getter]
    fn max_c_cel(&self) -> f64 {
        self.sim.max_c_cel
    }

    #[getter]
    fn max_c_vel(&self) -> f64 {
        self.sim.max_c_vel
    }

    #[getter]
    fn wall_time(&self) -> f64 {
        self.sim.wall_time
    }

    #[getter]
    fn dof_count(&self) -> usize {
        self.sim.model.layout.dof_count()
    }

    #[getter]
    fn inflow_profile(&self) -> Option<Vec<f64>> {
        self.sim.inflow_profile.clone()
    }
}

/// Integrates the scenario, keeping the state at every output time.
#[pyfunction]
fn simulate(py: Python<'_>, scenario: &PyScenario) -> PyResult<PySimulation> {
    let cfg = scenario.cfg.clone();
    let sim = py.detach(|| harness::simulate(&cfg)).map_err(to_py)?;
    Ok(PySimulation { sim })
}

/// Runs the scenario and writes snapshots and metrics into `out`; returns the
/// metrics.
#[pyfunction]
#[pyo3(signature = (scenario, out, reference=None))]
fn run(py: Python<'_>, scenario: &PyScenario, out: PathBuf, reference: Option<PathBuf>) -> PyResult<Vec<(String, String)>> {
    let cfg = scenario.cfg.clone();
    let result = py
        .detach(|| harness::run(&cfg, &out, reference.as_deref()))
        .map_err(to_py)?;
    Ok(result.metrics.entries().to_vec())
}

/// Least-squares slope of `log(err)` against `log(dt)`.
#[pyfunction]
fn convergence_order(dts: Vec<f64>, errors: Vec<f64>) -> PyResult<f64> {
    if dts.len() != errors.len() || dts.len() < 2 {
        return Err(PyValueError::new_err("need at least two matching step sizes and errors"));
    }
    Ok(harness::convergence_order(&dts, &errors))
}

#[pymodule]
fn mlsw(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PyState>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PySimulation>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_order, m)?)?;
    m.add("ConfigError", m.py().get_type::<ConfigError>())?;
    m.add("SolverError", m.py().get_type::<SolverError>())?;
    Ok(())
}
