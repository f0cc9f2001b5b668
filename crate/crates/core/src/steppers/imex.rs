use std::time::Instant;

use crate::error::SolverError;
use crate::operators::boundary::apply_boundary_conditions;
use crate::operators::flux::{combine, edge_depths, edge_discharges, flux_differences, layer_fluxes};
use crate::operators::momentum::{nonstiff_terms, stiff_terms, FrozenCoefficients};
use crate::state::State;
use crate::steppers::implicit::solve_implicit;
use crate::steppers::tableau::ButcherTableaux;
use crate::steppers::{report, Model, StepReport};
use crate::transport::sediment::{bed_fluxes, bottom_velocities, exner_update};
use crate::transport::tracer::{advance_masses, concentrations, tracer_masses, tracer_outflow};

struct Stage {
    eta: Vec<f64>,
    u: Vec<f64>,
    /// Stiff tendency times `l h`.
    stiff: Vec<f64>,
    nonstiff: Vec<f64>,
    layer_flux: Vec<f64>,
    flux_diff: Vec<f64>,
    bed_flux: Vec<f64>,
}

/// One step of the IMEX additive Runge-Kutta scheme: advection and mass
/// exchange explicit, surface gradient and vertical stresses implicit with
/// the TR-BDF2 tableau. Closures and depths are frozen at the old level.
pub fn step_imex_ark2(model: &Model, state: &State, dt: f64) -> Result<(State, StepReport), SolverError> {
    let start = Instant::now();
    model.check(state)?;
    let tab = ButcherTableaux::ark2();
    let grid = &model.grid;
    let layout = &model.layout;
    let params = &model.physics;
    let m = grid.n_cells();
    let t = state.time;
    let movable = params.movable_bed();
    let xi = params.xi();

    let h_edge = edge_depths(state, layout);
    let coeffs = FrozenCoefficients::compute(layout, params, state, h_edge.clone())?;
    let lh = model.layer_thickness(&h_edge);
    let depth_old = state.depths();
    let mass_old = tracer_masses(grid, layout, &depth_old, &state.rho);

    let build_stage = |eta: Vec<f64>, u: Vec<f64>, time: f64| -> Stage {
        let stiff = stiff_terms(grid, layout, &coeffs, params, &eta, &u);
        let nonstiff = nonstiff_terms(grid, layout, &h_edge, &u);
        let layer_flux = layer_fluxes(layout, &h_edge, &u, &model.bc, time);
        let flux_diff = flux_differences(&edge_discharges(layout, &layer_flux));
        let bed_flux = if movable {
            bed_fluxes(&bottom_velocities(layout, &u), params.ag)
        } else {
            Vec::new()
        };
        Stage {
            eta,
            u,
            stiff,
            nonstiff,
            layer_flux,
            flux_diff,
            bed_flux,
        }
    };

    let mut stages = vec![build_stage(state.eta.clone(), state.u.clone(), t)];
    let mut rho_stages = vec![state.rho.clone()];
    let mut residual: f64 = 0.0;

    for j in 1..3 {
        let time = t + tab.c[j] * dt;
        let w = tab.a_tilde[j][j] * dt;
        let mut rhs_u: Vec<f64> = (0..lh.len()).map(|k| lh[k] * state.u[k]).collect();
        let mut explicit_eta: Vec<f64> = (0..m).map(|i| grid.dx[i] * state.eta[i]).collect();
        for (mi, st) in stages.iter().enumerate() {
            let (a, at) = (tab.a[j][mi], tab.a_tilde[j][mi]);
            for k in 0..rhs_u.len() {
                rhs_u[k] += dt * (a * lh[k] * st.nonstiff[k] + at * st.stiff[k]);
            }
            for i in 0..m {
                explicit_eta[i] -= dt * at * st.flux_diff[i];
            }
        }
        let sol = solve_implicit(model, &coeffs, w, &rhs_u, &explicit_eta, time)?;
        residual = residual.max(sol.residual);

        let mut tmp = State {
            eta: sol.eta,
            b: state.b.clone(),
            u: sol.u,
            rho: state.rho.clone(),
            time,
        };
        apply_boundary_conditions(layout, &model.bc, &mut tmp, time);
        let depth_stage = tmp.depths();
        let mut stage = build_stage(tmp.eta.clone(), tmp.u, time);

        // tracer: earlier stages use their own concentrations, the current
        // stage reuses the previous one
        let mut phis = Vec::with_capacity(j + 1);
        for (k, st) in stages.iter().enumerate() {
            phis.push(tracer_outflow(grid, layout, &st.layer_flux, &rho_stages[k]));
        }
        phis.push(tracer_outflow(grid, layout, &stage.layer_flux, &rho_stages[j - 1]));
        let terms: Vec<(f64, &[f64])> = phis
            .iter()
            .enumerate()
            .map(|(k, p)| (tab.a_tilde[j][k], p.as_slice()))
            .collect();
        let mass = advance_masses(&mass_old, dt, &terms);
        rho_stages.push(concentrations(grid, layout, &depth_stage, &mass));

        if movable {
            let mut bed_terms: Vec<(f64, &[f64])> = stages
                .iter()
                .enumerate()
                .map(|(k, st)| (tab.a_tilde[j][k], st.bed_flux.as_slice()))
                .collect();
            bed_terms.push((tab.a_tilde[j][j], stage.bed_flux.as_slice()));
            let b_stage = exner_update(grid, &state.b, xi, dt, &bed_terms);
            let mut eta = stage.eta.clone();
            model.shift_surface(&mut eta, &state.b, &b_stage);
            stage.stiff = stiff_terms(grid, layout, &coeffs, params, &eta, &stage.u);
            stage.eta = eta;
        }
        stages.push(stage);
    }

    // final assembly with the shared weights
    let mut u_new = state.u.clone();
    for (j, st) in stages.iter().enumerate() {
        let bj = tab.b[j];
        for k in 0..u_new.len() {
            if lh[k] > 0.0 {
                u_new[k] += dt * bj * (st.stiff[k] / lh[k] + st.nonstiff[k]);
            }
        }
    }
    let diffs: Vec<&[f64]> = stages.iter().map(|s| s.flux_diff.as_slice()).collect();
    let total_diff = combine(&tab.b, &diffs);
    let eta_new: Vec<f64> = (0..m)
        .map(|i| state.eta[i] - dt * total_diff[i] / grid.dx[i])
        .collect();
    let t_new = t + dt;
    let mut next = State {
        eta: eta_new,
        b: state.b.clone(),
        u: u_new,
        rho: state.rho.clone(),
        time: t_new,
    };
    apply_boundary_conditions(layout, &model.bc, &mut next, t_new);

    let phis: Vec<Vec<f64>> = stages
        .iter()
        .zip(&rho_stages)
        .map(|(st, r)| tracer_outflow(grid, layout, &st.layer_flux, r))
        .collect();
    let terms: Vec<(f64, &[f64])> = phis.iter().zip(&tab.b).map(|(p, &w)| (w, p.as_slice())).collect();
    let mass = advance_masses(&mass_old, dt, &terms);
    next.rho = concentrations(grid, layout, &next.depths(), &mass);

    if movable {
        let bed_terms: Vec<(f64, &[f64])> = stages
            .iter()
            .zip(&tab.b)
            .map(|(st, &w)| (w, st.bed_flux.as_slice()))
            .collect();
        let b_new = exner_update(grid, &state.b, xi, dt, &bed_terms);
        model.shift_surface(&mut next.eta, &state.b, &b_new);
        next.b = b_new;
    }

    model.check(&next)?;
    let rep = report(model, &next, dt, residual, start);
    Ok((next, rep))
}
