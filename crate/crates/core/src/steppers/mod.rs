//! Time integrators.

mod implicit;
pub mod imex;
pub mod rk3;
pub mod tableau;
pub mod theta;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, SolverError};
use crate::mesh::{Grid, LayerLayout};
use crate::operators::boundary::{apply_boundary_conditions, BoundaryConditions};
use crate::physics::PhysicsParams;
use crate::state::State;

pub use imex::step_imex_ark2;
pub use rk3::{rk3_time_step, step_rk3, step_rk3_explicit};
pub use tableau::ButcherTableaux;
pub use theta::step_theta;

/// Everything a stepper needs besides the state.
#[derive(Debug, Clone)]
pub struct Model {
    pub grid: Grid,
    pub layout: LayerLayout,
    pub physics: PhysicsParams,
    pub bc: BoundaryConditions,
}

impl Model {
    pub fn new(
        grid: Grid,
        layout: LayerLayout,
        physics: PhysicsParams,
        bc: BoundaryConditions,
    ) -> Result<Self, ConfigError> {
        layout.validate(&grid)?;
        physics.validate()?;
        bc.validate(&grid, &layout)?;
        Ok(Self {
            grid,
            layout,
            physics,
            bc,
        })
    }

    /// Imposes the boundary conditions at the state's own time.
    pub fn prepare(&self, state: &mut State) {
        let t = state.time;
        apply_boundary_conditions(&self.layout, &self.bc, state, t);
    }

    pub(crate) fn check(&self, state: &State) -> Result<(), SolverError> {
        state.check_shape(&self.grid, &self.layout)?;
        state.check_finite()?;
        state.check_depth(self.physics.h_min)
    }

    /// Adds `delta_b` to the free surface of every cell whose surface is not
    /// prescribed, so that the depth is unchanged by a bed update.
    pub(crate) fn shift_surface(&self, eta: &mut [f64], b_old: &[f64], b_new: &[f64]) {
        let m = self.grid.n_cells();
        for i in 0..m {
            if !self.bc.is_dirichlet(m, i) {
                eta[i] += b_new[i] - b_old[i];
            }
        }
    }

    /// `l h_e` for every edge layer.
    pub(crate) fn layer_thickness(&self, h_edge: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.layout.edge_dofs()];
        for e in 0..self.layout.n_edges() {
            for (o, l) in out[self.layout.edge_range(e)].iter_mut().zip(self.layout.edge_fractions(e)) {
                *o = l * h_edge[e];
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Theta,
    Imex,
    Rk3,
}

impl std::str::FromStr for Scheme {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "theta" => Ok(Scheme::Theta),
            "imex" => Ok(Scheme::Imex),
            "rk3" => Ok(Scheme::Rk3),
            other => Err(ConfigError::Parameter {
                name: "scheme".into(),
                reason: format!("unknown scheme `{other}` (expected theta, imex or rk3)"),
            }),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Theta => "theta",
            Scheme::Imex => "imex",
            Scheme::Rk3 => "rk3",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    pub c_vel: f64,
    pub c_cel: f64,
    /// Largest free-surface system residual of the step (zero for explicit steps).
    pub residual: f64,
    pub wall_time: f64,
}

/// Velocity and celerity Courant numbers of `state` for step `dt`.
pub fn courant_numbers(grid: &Grid, layout: &LayerLayout, state: &State, dt: f64, g: f64) -> (f64, f64) {
    let (mut c_vel, mut c_cel) = (0.0f64, 0.0f64);
    for i in 0..grid.n_cells() {
        let umax = state
            .edge_u(layout, i)
            .iter()
            .chain(state.edge_u(layout, i + 1))
            .fold(0.0f64, |a, u| a.max(u.abs()));
        let celerity = (g * state.depth(i).max(0.0)).sqrt();
        c_vel = c_vel.max(umax * dt / grid.dx[i]);
        c_cel = c_cel.max((umax + celerity) * dt / grid.dx[i]);
    }
    (c_vel, c_cel)
}

pub(crate) fn report(model: &Model, state: &State, dt: f64, residual: f64, start: Instant) -> StepReport {
    let (c_vel, c_cel) = courant_numbers(&model.grid, &model.layout, state, dt, model.physics.g);
    StepReport {
        dt,
        c_vel,
        c_cel,
        residual,
        wall_time: start.elapsed().as_secs_f64(),
    }
}
