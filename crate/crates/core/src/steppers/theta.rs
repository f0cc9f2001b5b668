use std::time::Instant;

use crate::error::SolverError;
use crate::operators::boundary::apply_boundary_conditions;
use crate::operators::flux::{combine, edge_depths, edge_discharges, flux_differences, layer_fluxes};
use crate::operators::momentum::{nonstiff_terms, stiff_terms, FrozenCoefficients};
use crate::state::State;
use crate::steppers::implicit::solve_implicit;
use crate::steppers::{report, Model, StepReport};
use crate::transport::sediment::{bottom_velocities, exner_step_theta};
use crate::transport::tracer::tracer_step_theta;

/// One step of the semi-implicit θ-method. Depths, viscosities and stress
/// coefficients are frozen at the old level; advection and mass exchange are
/// explicit.
pub fn step_theta(model: &Model, state: &State, theta: f64, dt: f64) -> Result<(State, StepReport), SolverError> {
    let start = Instant::now();
    model.check(state)?;
    let grid = &model.grid;
    let layout = &model.layout;
    let params = &model.physics;
    let t = state.time;
    let t_new = t + dt;

    let h_edge = edge_depths(state, layout);
    let coeffs = FrozenCoefficients::compute(layout, params, state, h_edge.clone())?;
    let lh = model.layer_thickness(&h_edge);

    let flux_old = layer_fluxes(layout, &h_edge, &state.u, &model.bc, t);
    let diff_old = flux_differences(&edge_discharges(layout, &flux_old));
    let stiff = stiff_terms(grid, layout, &coeffs, params, &state.eta, &state.u);
    let nonstiff = nonstiff_terms(grid, layout, &h_edge, &state.u);

    let rhs_u: Vec<f64> = (0..state.u.len())
        .map(|k| lh[k] * state.u[k] + (1.0 - theta) * dt * stiff[k] + dt * lh[k] * nonstiff[k])
        .collect();
    let explicit_eta: Vec<f64> = (0..grid.n_cells())
        .map(|i| grid.dx[i] * state.eta[i] - (1.0 - theta) * dt * diff_old[i])
        .collect();
    let sol = solve_implicit(model, &coeffs, theta * dt, &rhs_u, &explicit_eta, t_new)?;

    let mut next = State {
        eta: sol.eta,
        b: state.b.clone(),
        u: sol.u,
        rho: state.rho.clone(),
        time: t_new,
    };
    apply_boundary_conditions(layout, &model.bc, &mut next, t_new);

    let flux_new = layer_fluxes(layout, &h_edge, &next.u, &model.bc, t_new);
    let theta_flux = combine(&[theta, 1.0 - theta], &[&flux_new, &flux_old]);
    let depth_old = state.depths();
    let depth_new = next.depths();
    next.rho = tracer_step_theta(grid, layout, &depth_old, &depth_new, &state.rho, &theta_flux, dt);

    if params.movable_bed() {
        let b_new = exner_step_theta(
            grid,
            &state.b,
            &bottom_velocities(layout, &state.u),
            &bottom_velocities(layout, &next.u),
            params.ag,
            params.xi(),
            dt,
            theta,
        );
        model.shift_surface(&mut next.eta, &state.b, &b_new);
        next.b = b_new;
    }

    model.check(&next)?;
    let rep = report(model, &next, dt, sol.residual, start);
    Ok((next, rep))
}
