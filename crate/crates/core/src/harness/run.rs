use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};

use crate::error::{ConfigError, Error, SolverError};
use crate::harness::diagnostics::{compute_errors, ErrorReport};
use crate::harness::output::{fnv1a, read_profile, write_profile, write_snapshot, Metrics};
use crate::harness::scenario::ScenarioConfig;
use crate::operators::boundary::BoundaryCondition;
use crate::operators::flux::{edge_depths, layer_fluxes};
use crate::state::State;
use crate::steppers::{rk3_time_step, step_imex_ark2, step_rk3, step_theta, Model, Scheme, StepReport};

/// Result of an in-memory run.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub model: Model,
    pub initial: State,
    pub times: Vec<f64>,
    pub snapshots: Vec<State>,
    pub steps: usize,
    pub max_c_vel: f64,
    pub max_c_cel: f64,
    pub max_residual: f64,
    pub wall_time: f64,
    pub inflow_profile: Option<Vec<f64>>,
}

fn one_step(cfg: &ScenarioConfig, model: &Model, state: &State, dt: f64) -> Result<(State, StepReport), SolverError> {
    match cfg.scheme {
        Scheme::Theta => step_theta(model, state, cfg.theta, dt),
        Scheme::Imex => step_imex_ark2(model, state, dt),
        Scheme::Rk3 => step_rk3(model, state, dt),
    }
}

fn abort(step: usize, time: f64, source: SolverError) -> Error {
    Error::Solver { step, time, source }
}

/// Layer shares of the discharge through edge `e`.
pub fn discharge_profile(model: &Model, state: &State, e: usize) -> Vec<f64> {
    let h_edge = edge_depths(state, &model.layout);
    let flux = layer_fluxes(&model.layout, &h_edge, &state.u, &model.bc, state.time);
    let f = &flux[model.layout.edge_range(e)];
    let total: f64 = f.iter().sum();
    f.iter().map(|v| v / total).collect()
}

/// Precursor run over a frozen bed with uniform inflow; returns the layer
/// shares of the discharge through the last interior edge once they settle.
pub fn spin_up_profile(cfg: &ScenarioConfig) -> Result<Vec<f64>, Error> {
    let spin = cfg.spin_up.clone().unwrap_or_default();
    if let Some(file) = &spin.profile_file {
        return read_profile(Path::new(file));
    }
    let mut pre = cfg.clone();
    pre.spin_up = None;
    pre.physics.ag = 0.0;
    pre.initial.q0 = spin.q;
    if let BoundaryCondition::Discharge { q, profile } = &mut pre.boundary.left {
        *q = crate::operators::boundary::Forcing::Constant { value: spin.q };
        *profile = None;
    }
    let model = pre.build_model()?;
    let mut state = pre.initial_state(&model);
    let edge = model.grid.n_cells() - 1;
    let mut history: Vec<Vec<f64>> = vec![discharge_profile(&model, &state, edge)];
    let mut step = 0;
    while state.time < spin.max_time {
        let (next, _) = step_theta(&model, &state, 1.0, spin.dt).map_err(|e| abort(step, state.time, e))?;
        state = next;
        step += 1;
        history.push(discharge_profile(&model, &state, edge));
        if history.len() > spin.window {
            let old = history.remove(0);
            let new = history.last().unwrap();
            let scale = new.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let change = old.iter().zip(new).fold(0.0f64, |a, (o, n)| a.max((o - n).abs())) / scale;
            if change < spin.tolerance {
                info!("spin-up settled after {step} steps (t = {} s)", state.time);
                return Ok(new.clone());
            }
        }
    }
    warn!("spin-up reached t = {} s without settling", spin.max_time);
    Ok(history.pop().unwrap())
}

/// Configuration with the spin-up profile substituted into the left boundary.
pub fn resolve_spin_up(cfg: &ScenarioConfig) -> Result<(ScenarioConfig, Option<Vec<f64>>), Error> {
    if cfg.spin_up.is_none() {
        return Ok((cfg.clone(), None));
    }
    let profile = spin_up_profile(cfg)?;
    let mut out = cfg.clone();
    out.spin_up = None;
    match &mut out.boundary.left {
        BoundaryCondition::Discharge { profile: p, .. } => *p = Some(profile.clone()),
        _ => return Err(ConfigError::Boundary("spin-up needs a discharge on the left".into()).into()),
    }
    Ok((out, Some(profile)))
}

/// Integrates the configured scenario and keeps the state at every output
/// time. `observer` sees every accepted state.
pub fn simulate_with(cfg: &ScenarioConfig, mut observer: impl FnMut(&State)) -> Result<Simulation, Error> {
    cfg.validate()?;
    if cfg.scheme == Scheme::Theta && cfg.theta < 0.5 {
        warn!("theta = {} < 0.5: the scheme is only conditionally stable", cfg.theta);
    }
    let (cfg, inflow_profile) = resolve_spin_up(cfg)?;
    let model = cfg.build_model()?;
    let initial = cfg.initial_state(&model);
    let times = cfg.output_times();
    let start = Instant::now();
    let mut state = initial.clone();
    observer(&state);
    let mut snapshots = Vec::with_capacity(times.len());
    let (mut steps, mut max_c_vel, mut max_c_cel, mut max_residual) = (0usize, 0.0f64, 0.0f64, 0.0f64);
    for &target in &times {
        loop {
            let remaining = target - state.time;
            if remaining <= 1e-9 * target.abs().max(1.0) {
                break;
            }
            let nominal = match cfg.scheme {
                Scheme::Rk3 => rk3_time_step(&model, &state, cfg.courant),
                _ => cfg.dt,
            };
            let mut dt = nominal.min(remaining);
            let landing = remaining - dt <= 1e-9 * nominal;
            if landing {
                dt = remaining;
            }
            let (mut next, rep) = one_step(&cfg, &model, &state, dt).map_err(|e| abort(steps, state.time, e))?;
            if landing {
                next.time = target;
            }
            steps += 1;
            max_c_vel = max_c_vel.max(rep.c_vel);
            max_c_cel = max_c_cel.max(rep.c_cel);
            max_residual = max_residual.max(rep.residual);
            state = next;
            observer(&state);
        }
        snapshots.push(state.clone());
    }
    Ok(Simulation {
        model,
        initial,
        times,
        snapshots,
        steps,
        max_c_vel,
        max_c_cel,
        max_residual,
        wall_time: start.elapsed().as_secs_f64(),
        inflow_profile,
    })
}

pub fn simulate(cfg: &ScenarioConfig) -> Result<Simulation, Error> {
    simulate_with(cfg, |_| {})
}

/// Configuration of the reference run matching `cfg`.
pub fn reference_config(cfg: &ScenarioConfig, courant: f64) -> ScenarioConfig {
    let mut r = cfg.clone();
    r.scheme = Scheme::Rk3;
    r.courant = courant;
    r.dt = 1.0;
    r.theta = 0.5;
    r
}

pub fn config_hash(cfg: &ScenarioConfig) -> u64 {
    fnv1a(serde_json::to_string(cfg).expect("config serializes").as_bytes())
}

/// Reference snapshots for `cfg`, loaded from `dir` when cached there and
/// computed (then stored) otherwise.
pub fn reference_snapshots(cfg: &ScenarioConfig, dir: &Path) -> Result<Vec<State>, Error> {
    let rcfg = reference_config(cfg, 0.1);
    let path = dir.join(format!("reference_{:016x}.json", config_hash(&rcfg)));
    if let Ok(text) = fs::read_to_string(&path) {
        if let Ok(states) = serde_json::from_str::<Vec<State>>(&text) {
            info!("using cached reference {}", path.display());
            return Ok(states);
        }
        warn!("ignoring unreadable reference cache {}", path.display());
    }
    info!("computing reference into {}", path.display());
    let sim = simulate(&rcfg)?;
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    let text = serde_json::to_string(&sim.snapshots).expect("states serialize");
    fs::write(&path, text).map_err(|e| Error::Io {
        path: path.clone(),
        source: e,
    })?;
    Ok(sim.snapshots)
}

pub struct RunOutput {
    pub simulation: Simulation,
    pub errors: Vec<ErrorReport>,
    pub metrics: Metrics,
    pub files: Vec<PathBuf>,
}

/// Runs `cfg`, writes one CSV per output time and `metrics.txt` into `out`,
/// comparing against a cached reference when `reference_dir` is given.
pub fn run(cfg: &ScenarioConfig, out: &Path, reference_dir: Option<&Path>) -> Result<RunOutput, Error> {
    let sim = simulate(cfg)?;
    let errors = match reference_dir {
        Some(dir) => {
            let refs = reference_snapshots(cfg, dir)?;
            sim.snapshots
                .iter()
                .zip(&refs)
                .map(|(s, r)| compute_errors(&sim.model.grid, &sim.model.layout, s, r))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| abort(sim.steps, cfg.t_final, e))?
        }
        None => Vec::new(),
    };
    fs::create_dir_all(out).map_err(|e| Error::Io {
        path: out.to_path_buf(),
        source: e,
    })?;
    let mut files = Vec::new();
    for (k, s) in sim.snapshots.iter().enumerate() {
        let path = out.join(format!("snapshot_{k:03}.csv"));
        write_snapshot(&path, &sim.model.grid, &sim.model.layout, s)?;
        files.push(path);
    }
    if let Some(p) = &sim.inflow_profile {
        let path = out.join("inflow_profile.txt");
        write_profile(&path, p)?;
        files.push(path);
    }

    let mut m = Metrics::default();
    m.push("scenario", &cfg.name);
    m.push("scheme", cfg.scheme);
    match cfg.scheme {
        Scheme::Rk3 => m.push_f64("courant_target", cfg.courant),
        Scheme::Theta => {
            m.push_f64("dt", cfg.dt);
            m.push_f64("theta", cfg.theta);
        }
        Scheme::Imex => m.push_f64("dt", cfg.dt),
    }
    m.push_f64("t_final", cfg.t_final);
    m.push("cells", sim.model.grid.n_cells());
    m.push("dof", sim.model.layout.dof_count());
    m.push("steps", sim.steps);
    m.push_f64("c_vel_max", sim.max_c_vel);
    m.push_f64("c_cel_max", sim.max_c_cel);
    m.push_f64("residual_max", sim.max_residual);
    let last = sim.snapshots.last().unwrap_or(&sim.initial);
    m.push_f64(
        "volume_change",
        last.water_volume(&sim.model.grid) - sim.initial.water_volume(&sim.model.grid),
    );
    m.push_f64("wall_time", sim.wall_time);
    for (k, t) in sim.times.iter().enumerate() {
        m.push_f64(format!("snapshot_{k:03}_time"), *t);
    }
    for (k, e) in errors.iter().enumerate() {
        let p = format!("snapshot_{k:03}_");
        m.push_f64(format!("{p}err_eta_l2"), e.eta_l2);
        m.push_f64(format!("{p}err_eta_linf"), e.eta_linf);
        m.push_f64(format!("{p}err_u_l2"), e.u_l2);
        m.push_f64(format!("{p}err_u_linf"), e.u_linf);
        m.push_f64(format!("{p}err_b_l2"), e.b_l2);
        m.push_f64(format!("{p}err_b_linf"), e.b_linf);
    }
    if let Some(e) = errors.last() {
        m.push_f64("err_eta_l2", e.eta_l2);
        m.push_f64("err_u_l2", e.u_l2);
        m.push_f64("err_b_l2", e.b_l2);
    }
    let path = out.join("metrics.txt");
    m.write(&path)?;
    files.push(path);
    Ok(RunOutput {
        simulation: sim,
        errors,
        metrics: m,
        files,
    })
}
