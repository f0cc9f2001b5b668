use std::time::Instant;

use crate::error::SolverError;
use crate::operators::boundary::apply_boundary_conditions;
use crate::operators::flux::{edge_depths, layer_fluxes};
use crate::operators::momentum::{nonstiff_terms, stiff_terms, FrozenCoefficients};
use crate::state::State;
use crate::steppers::{report, Model, StepReport};
use crate::transport::sediment::{bed_fluxes, bottom_velocities};
use crate::transport::tracer::{concentrations, tracer_masses, tracer_outflow};

/// Prognostic vector of the explicit scheme: tracer masses are evolved
/// instead of concentrations.
#[derive(Clone)]
struct Vars {
    eta: Vec<f64>,
    u: Vec<f64>,
    b: Vec<f64>,
    mass: Vec<f64>,
}

impl Vars {
    fn axpy(&self, a: f64, other: &Vars, bcoef: f64, dir: &Vars, dt: f64) -> Vars {
        let f = |x: &[f64], y: &[f64], d: &[f64]| -> Vec<f64> {
            x.iter()
                .zip(y)
                .zip(d)
                .map(|((x, y), d)| a * x + bcoef * (y + dt * d))
                .collect()
        };
        Vars {
            eta: f(&self.eta, &other.eta, &dir.eta),
            u: f(&self.u, &other.u, &dir.u),
            b: f(&self.b, &other.b, &dir.b),
            mass: f(&self.mass, &other.mass, &dir.mass),
        }
    }
}

fn to_state(model: &Model, v: &Vars, time: f64) -> State {
    let mut s = State {
        eta: v.eta.clone(),
        b: v.b.clone(),
        u: v.u.clone(),
        rho: Vec::new(),
        time,
    };
    apply_boundary_conditions(&model.layout, &model.bc, &mut s, time);
    s.rho = concentrations(&model.grid, &model.layout, &s.depths(), &v.mass);
    s
}

fn to_vars(model: &Model, s: &State) -> Vars {
    Vars {
        eta: s.eta.clone(),
        u: s.u.clone(),
        b: s.b.clone(),
        mass: tracer_masses(&model.grid, &model.layout, &s.depths(), &s.rho),
    }
}

/// Full explicit tendency with every closure evaluated at `s`.
fn tendency(model: &Model, s: &State) -> Result<Vars, SolverError> {
    let grid = &model.grid;
    let layout = &model.layout;
    let params = &model.physics;
    let m = grid.n_cells();
    s.check_depth(params.h_min)?;
    let h_edge = edge_depths(s, layout);
    let coeffs = FrozenCoefficients::compute(layout, params, s, h_edge.clone())?;
    let lh = model.layer_thickness(&h_edge);
    let stiff = stiff_terms(grid, layout, &coeffs, params, &s.eta, &s.u);
    let nonstiff = nonstiff_terms(grid, layout, &h_edge, &s.u);
    let mut du = vec![0.0; s.u.len()];
    for e in 1..m {
        for k in layout.edge_range(e) {
            du[k] = stiff[k] / lh[k] + nonstiff[k];
        }
    }
    let flux = layer_fluxes(layout, &h_edge, &s.u, &model.bc, s.time);
    let mut deta = vec![0.0; m];
    let mut db = vec![0.0; m];
    if params.movable_bed() {
        let qb = bed_fluxes(&bottom_velocities(layout, &s.u), params.ag);
        for i in 0..m {
            db[i] = -params.xi() * (qb[i + 1] - qb[i]) / grid.dx[i];
        }
    }
    for i in 0..m {
        if model.bc.is_dirichlet(m, i) {
            continue;
        }
        let ql: f64 = flux[layout.edge_range(i)].iter().sum();
        let qr: f64 = flux[layout.edge_range(i + 1)].iter().sum();
        deta[i] = -(qr - ql) / grid.dx[i] + db[i];
    }
    let dmass: Vec<f64> = tracer_outflow(grid, layout, &flux, &s.rho)
        .into_iter()
        .map(|p| -p)
        .collect();
    Ok(Vars {
        eta: deta,
        u: du,
        b: db,
        mass: dmass,
    })
}

/// One SSP(3,3) Runge-Kutta step of size `dt` with every term explicit.
pub fn step_rk3(model: &Model, state: &State, dt: f64) -> Result<(State, StepReport), SolverError> {
    let start = Instant::now();
    model.check(state)?;
    let t = state.time;
    let y0 = to_vars(model, state);

    let l0 = tendency(model, state)?;
    let y1 = y0.axpy(0.0, &y0, 1.0, &l0, dt);
    let s1 = to_state(model, &y1, t + dt);

    let l1 = tendency(model, &s1)?;
    let y2 = y0.axpy(0.75, &to_vars_keep_mass(&s1, &y1), 0.25, &l1, dt);
    let s2 = to_state(model, &y2, t + 0.5 * dt);

    let l2 = tendency(model, &s2)?;
    let mut y3 = y0.axpy(1.0 / 3.0, &to_vars_keep_mass(&s2, &y2), 2.0 / 3.0, &l2, dt);
    if !model.physics.movable_bed() {
        y3.b = state.b.clone();
    }
    let next = to_state(model, &y3, t + dt);

    model.check(&next)?;
    let rep = report(model, &next, dt, 0.0, start);
    Ok((next, rep))
}

/// Stage vector after boundary conditions were imposed on the state.
fn to_vars_keep_mass(s: &State, y: &Vars) -> Vars {
    Vars {
        eta: s.eta.clone(),
        u: s.u.clone(),
        b: s.b.clone(),
        mass: y.mass.clone(),
    }
}

/// Step giving celerity Courant number `target` for `state`.
pub fn rk3_time_step(model: &Model, state: &State, target: f64) -> f64 {
    let (_, c) = super::courant_numbers(&model.grid, &model.layout, state, 1.0, model.physics.g);
    if c > 0.0 {
        target / c
    } else {
        f64::INFINITY
    }
}

/// Adaptive explicit step: `dt` is chosen so the celerity Courant number
/// equals `target`, truncated to `max_dt` so that output times are hit
/// exactly.
pub fn step_rk3_explicit(
    model: &Model,
    state: &State,
    target: f64,
    max_dt: f64,
) -> Result<(State, StepReport), SolverError> {
    let dt = rk3_time_step(model, state, target).min(max_dt);
    step_rk3(model, state, dt)
}
