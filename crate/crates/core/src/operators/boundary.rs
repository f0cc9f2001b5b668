use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::mesh::{Grid, LayerLayout, Side};
use crate::state::State;

/// Time-dependent boundary value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Forcing {
    Constant {
        value: f64,
    },
    /// `mean + amplitude * sin(omega * t + phase)`
    Sinusoid {
        mean: f64,
        amplitude: f64,
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
}

impl Forcing {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Forcing::Constant { value } => value,
            Forcing::Sinusoid {
                mean,
                amplitude,
                omega,
                phase,
            } => mean + amplitude * (omega * t + phase).sin(),
        }
    }

    fn is_finite(&self) -> bool {
        match *self {
            Forcing::Constant { value } => value.is_finite(),
            Forcing::Sinusoid {
                mean,
                amplitude,
                omega,
                phase,
            } => [mean, amplitude, omega, phase].iter().all(|v| v.is_finite()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryCondition {
    /// Closed wall: zero velocity in every layer.
    Wall,
    /// Prescribed discharge per unit width, m²/s. `profile` gives the share
    /// of the discharge carried by each layer (sums to one); by default each
    /// layer carries its thickness fraction, i.e. the velocity is uniform.
    Discharge {
        q: Forcing,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        profile: Option<Vec<f64>>,
    },
    /// Prescribed free-surface elevation in the boundary cell, m.
    SurfaceElevation { eta: Forcing },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConditions {
    pub left: BoundaryCondition,
    pub right: BoundaryCondition,
}

impl BoundaryConditions {
    pub fn closed() -> Self {
        Self {
            left: BoundaryCondition::Wall,
            right: BoundaryCondition::Wall,
        }
    }

    pub fn side(&self, side: Side) -> &BoundaryCondition {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// Checks forcings are finite and discharge profiles match the layering of
    /// the boundary edge.
    pub fn validate(&self, grid: &Grid, layout: &LayerLayout) -> Result<(), ConfigError> {
        if grid.n_cells() < 3 {
            return Err(ConfigError::Boundary("grid too small for boundary treatment".into()));
        }
        for (side, edge) in [(Side::Left, 0), (Side::Right, grid.n_cells())] {
            match self.side(side) {
                BoundaryCondition::Wall => {}
                BoundaryCondition::SurfaceElevation { eta } => {
                    if !eta.is_finite() {
                        return Err(ConfigError::Boundary(format!("{side:?} surface forcing is not finite")));
                    }
                }
                BoundaryCondition::Discharge { q, profile } => {
                    if !q.is_finite() {
                        return Err(ConfigError::Boundary(format!("{side:?} discharge forcing is not finite")));
                    }
                    if let Some(p) = profile {
                        let n = layout.edge_layers(edge);
                        if p.len() != n {
                            return Err(ConfigError::Boundary(format!(
                                "{side:?} discharge profile has {} entries, boundary edge has {n} layers",
                                p.len()
                            )));
                        }
                        let sum: f64 = p.iter().sum();
                        if !p.iter().all(|v| v.is_finite()) || (sum - 1.0).abs() > 1e-8 {
                            return Err(ConfigError::Boundary(format!(
                                "{side:?} discharge profile sums to {sum}, expected 1"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Cells whose free surface is prescribed at time `t`.
    pub fn dirichlet_cells(&self, m: usize, t: f64) -> [Option<(usize, f64)>; 2] {
        let pick = |bc: &BoundaryCondition, cell: usize| match bc {
            BoundaryCondition::SurfaceElevation { eta } => Some((cell, eta.value(t))),
            _ => None,
        };
        [pick(&self.left, 0), pick(&self.right, m - 1)]
    }

    pub fn is_dirichlet(&self, m: usize, cell: usize) -> bool {
        (cell == 0 && matches!(self.left, BoundaryCondition::SurfaceElevation { .. }))
            || (cell == m - 1 && matches!(self.right, BoundaryCondition::SurfaceElevation { .. }))
    }
}

/// Boundary edge index and its adjacent interior edge / cell.
pub(crate) fn boundary_geometry(side: Side, m: usize) -> (usize, usize, usize) {
    match side {
        Side::Left => (0, 1, 0),
        Side::Right => (m, m - 1, m - 1),
    }
}

/// Per-layer discharge shares at the boundary edge on `side`.
pub fn discharge_shares(layout: &LayerLayout, edge: usize, profile: Option<&Vec<f64>>) -> Vec<f64> {
    match profile {
        Some(p) => {
            let sum: f64 = p.iter().sum();
            p.iter().map(|v| v / sum).collect()
        }
        None => layout.edge_fractions(edge).to_vec(),
    }
}

/// Per-layer volume fluxes `q * share` across the boundary edge on `side`
/// when that side prescribes a discharge.
pub fn prescribed_layer_fluxes(
    layout: &LayerLayout,
    bc: &BoundaryConditions,
    side: Side,
    t: f64,
) -> Option<Vec<f64>> {
    let m = layout.n_cells();
    let (edge, _, _) = boundary_geometry(side, m);
    match bc.side(side) {
        BoundaryCondition::Discharge { q, profile } => {
            let q = q.value(t);
            Some(
                discharge_shares(layout, edge, profile.as_ref())
                    .into_iter()
                    .map(|s| q * s)
                    .collect(),
            )
        }
        _ => None,
    }
}

/// Imposes the boundary conditions on `state` at time `t`: boundary edge
/// velocities (zero at walls, discharge divided by the adjacent depth, copied
/// from the interior on a free-surface side) and prescribed free surfaces.
pub fn apply_boundary_conditions(layout: &LayerLayout, bc: &BoundaryConditions, state: &mut State, t: f64) {
    let m = layout.n_cells();
    for side in [Side::Left, Side::Right] {
        let (edge, inner_edge, cell) = boundary_geometry(side, m);
        match bc.side(side) {
            BoundaryCondition::Wall => {
                for u in &mut state.u[layout.edge_range(edge)] {
                    *u = 0.0;
                }
            }
            BoundaryCondition::Discharge { q, profile } => {
                let q = q.value(t);
                let h = state.depth(cell);
                let shares = discharge_shares(layout, edge, profile.as_ref());
                let range = layout.edge_range(edge);
                let fractions = layout.edge_fractions(edge);
                for (k, idx) in range.enumerate() {
                    state.u[idx] = q * shares[k] / (fractions[k] * h);
                }
            }
            BoundaryCondition::SurfaceElevation { eta } => {
                state.eta[cell] = eta.value(t);
                let inner: Vec<f64> = state.u[layout.edge_range(inner_edge)].to_vec();
                let mut out = vec![0.0; layout.edge_layers(edge)];
                layout.edge_to_edge(inner_edge, edge, &inner, &mut out);
                state.u[layout.edge_range(edge)].copy_from_slice(&out);
            }
        }
    }
}
