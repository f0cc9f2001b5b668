//! Momentum tendencies split into the stiff part (surface gradient, vertical
//! viscosity, bottom friction, wind drag) and the non-stiff part (advection and
//! momentum carried by mass exchange).

use crate::error::SolverError;
use crate::mesh::{Grid, LayerLayout};
use crate::operators::advection::advection_terms;
use crate::operators::transfer::mass_transfer_edges;
use crate::physics::{self, PhysicsParams};
use crate::state::State;

/// Closure coefficients evaluated once from a given state and then held fixed
/// over a step (or a stage, for the explicit reference scheme).
#[derive(Debug, Clone, PartialEq)]
pub struct FrozenCoefficients {
    pub h_edge: Vec<f64>,
    /// `nu / (l_{a+1/2} h)` per interface, stored in the slot of the layer
    /// below; the top slot of each edge is zero.
    pub coupling: Vec<f64>,
    /// `C_f |u_1|` per edge.
    pub friction: Vec<f64>,
    /// `Cw |u_wind - u_N|` per edge.
    pub wind: Vec<f64>,
}

impl FrozenCoefficients {
    /// Evaluates the closures at every interior edge. Boundary edges carry no
    /// momentum equation and get zero coefficients.
    pub fn compute(
        layout: &LayerLayout,
        params: &PhysicsParams,
        state: &State,
        h_edge: Vec<f64>,
    ) -> Result<Self, SolverError> {
        let m = layout.n_cells();
        let mut coupling = vec![0.0; layout.edge_dofs()];
        let mut friction = vec![0.0; layout.n_edges()];
        let mut wind = vec![0.0; layout.n_edges()];
        for e in 1..m {
            let h = h_edge[e];
            let l = layout.edge_fractions(e);
            let n = l.len();
            let u = state.edge_u(layout, e);
            let u1 = u[0];
            let closure = |source| SolverError::Closure { edge: e, source };
            let slots = &mut coupling[layout.edge_range(e)];
            let mut below = 0.0;
            for s in 0..n - 1 {
                below += l[s];
                let ustar = physics::friction_velocity_interface(u1, below * h, params).map_err(closure)?;
                let nu = physics::interface_viscosity(s + 1, h, l, ustar, params);
                slots[s] = nu / (0.5 * (l[s] + l[s + 1]) * h);
            }
            let cf = physics::column_friction_coefficient(h, l[0], params).map_err(closure)?;
            friction[e] = cf * u1.abs();
            wind[e] = physics::wind_stress(u[n - 1], params).1;
        }
        Ok(Self {
            h_edge,
            coupling,
            friction,
            wind,
        })
    }
}

/// Stiff momentum tendency multiplied by `l h_e` at every interior edge:
/// surface gradient, vertical viscous exchange, bottom friction on the
/// lowest layer and wind drag on the top layer.
pub fn stiff_terms(
    grid: &Grid,
    layout: &LayerLayout,
    coeffs: &FrozenCoefficients,
    params: &PhysicsParams,
    eta: &[f64],
    u: &[f64],
) -> Vec<f64> {
    let m = layout.n_cells();
    let mut out = vec![0.0; u.len()];
    for e in 1..m {
        let range = layout.edge_range(e);
        let l = layout.edge_fractions(e);
        let n = l.len();
        let h = coeffs.h_edge[e];
        let c = &coeffs.coupling[range.clone()];
        let ue = &u[range.clone()];
        let grad = params.g * (eta[e] - eta[e - 1]) / grid.dx_edge[e];
        for (k, o) in out[range].iter_mut().enumerate() {
            let mut v = -grad * l[k] * h;
            if k + 1 < n {
                v += c[k] * (ue[k + 1] - ue[k]);
            }
            if k > 0 {
                v -= c[k - 1] * (ue[k] - ue[k - 1]);
            }
            if k == 0 {
                v -= coeffs.friction[e] * ue[0];
            }
            if k == n - 1 {
                v += coeffs.wind[e] * (params.u_wind - ue[k]);
            }
            *o = v;
        }
    }
    out
}

/// Non-stiff momentum tendency (per unit layer thickness) at every interior
/// edge: advection plus the momentum exchanged with neighbouring layers.
pub fn nonstiff_terms(grid: &Grid, layout: &LayerLayout, h_edge: &[f64], u: &[f64]) -> Vec<f64> {
    let mut out = advection_terms(grid, layout, u);
    let transfer = mass_transfer_edges(layout, h_edge, u);
    for e in 1..layout.n_cells() {
        let range = layout.edge_range(e);
        let l = layout.edge_fractions(e);
        let n = l.len();
        let ue = &u[range.clone()];
        let g = &transfer[range.clone()];
        for (k, o) in out[range].iter_mut().enumerate() {
            let mut x = 0.0;
            if k + 1 < n {
                x += 0.5 * (ue[k + 1] - ue[k]) * g[k];
            }
            if k > 0 {
                x += 0.5 * (ue[k] - ue[k - 1]) * g[k - 1];
            }
            *o += x / (grid.dx_edge[e] * l[k] * h_edge[e]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::flux::edge_depths;
    use approx::assert_relative_eq;

    #[test]
    fn rest_state_has_no_tendency() {
        let grid = Grid::uniform(0.0, 100.0, 10).unwrap();
        let layout = LayerLayout::uniform(&grid, 5).unwrap();
        let b: Vec<f64> = grid.centers.iter().map(|x| (x / 17.0).sin()).collect();
        let s = State::at_rest(&layout, vec![3.0; 10], b);
        let params = PhysicsParams {
            u_wind: 0.0,
            ..PhysicsParams::default()
        };
        let h = edge_depths(&s, &layout);
        let c = FrozenCoefficients::compute(&layout, &params, &s, h.clone()).unwrap();
        assert!(stiff_terms(&grid, &layout, &c, &params, &s.eta, &s.u).iter().all(|&v| v == 0.0));
        assert!(nonstiff_terms(&grid, &layout, &h, &s.u).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn surface_gradient_scales_with_layer_thickness() {
        let grid = Grid::uniform(0.0, 3.0, 3).unwrap();
        let layout = LayerLayout::uniform(&grid, 2).unwrap();
        let s = State::at_rest(&layout, vec![2.0, 1.0, 1.0], vec![0.0; 3]);
        let params = PhysicsParams {
            cw: 0.0,
            ..PhysicsParams::default()
        };
        let h = edge_depths(&s, &layout);
        let c = FrozenCoefficients::compute(&layout, &params, &s, h).unwrap();
        let i = stiff_terms(&grid, &layout, &c, &params, &s.eta, &s.u);
        let r = layout.edge_range(1);
        // edge depth is the mean 1.5, gradient -1 per metre
        assert_relative_eq!(i[r.start], 9.81 * 0.5 * 1.5, max_relative = 1e-14);
        assert_relative_eq!(i[r.start + 1], 9.81 * 0.5 * 1.5, max_relative = 1e-14);
    }
}
