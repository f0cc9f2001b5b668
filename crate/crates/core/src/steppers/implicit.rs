//! Implicit solve shared by the θ-method and the implicit stages of the IMEX
//! scheme: vertical columns are reduced to scalar coefficients, the free
//! surface is solved, then velocities are recovered by back substitution.

use crate::error::SolverError;
use crate::linalg::{assemble_free_surface_system, assemble_vertical_matrix, EdgeReduction};
use crate::mesh::Side;
use crate::operators::boundary::{boundary_geometry, BoundaryCondition};
use crate::operators::momentum::FrozenCoefficients;
use crate::steppers::Model;

pub(crate) struct ImplicitSolution {
    pub eta: Vec<f64>,
    /// Velocities at interior edges; boundary edges are zero.
    pub u: Vec<f64>,
    pub residual: f64,
}

/// Solves
/// `A U = R - w g lh (eta_R - eta_L) / dx` at every interior edge together with
/// `dx eta + w (Q_R - Q_L) = explicit`, where `Q = (lh)^T U`.
///
/// `rhs_u` is `R` without the implicit wind forcing, which is added here.
/// Boundary discharges and prescribed surfaces are evaluated at `time`.
pub(crate) fn solve_implicit(
    model: &Model,
    coeffs: &FrozenCoefficients,
    w: f64,
    rhs_u: &[f64],
    explicit_eta: &[f64],
    time: f64,
) -> Result<ImplicitSolution, SolverError> {
    let layout = &model.layout;
    let grid = &model.grid;
    let m = grid.n_cells();
    let mut p = vec![0.0; layout.edge_dofs()];
    let mut q = vec![0.0; layout.edge_dofs()];
    let mut red = vec![EdgeReduction { t: 0.0, s: 0.0 }; m + 1];
    for e in 1..m {
        let range = layout.edge_range(e);
        let l = layout.edge_fractions(e);
        let h = coeffs.h_edge[e];
        let a = assemble_vertical_matrix(layout, coeffs, e, w);
        let pe = &mut p[range.clone()];
        for (v, l) in pe.iter_mut().zip(l) {
            *v = l * h;
        }
        let qe = &mut q[range.clone()];
        qe.copy_from_slice(&rhs_u[range.clone()]);
        let top = qe.len() - 1;
        qe[top] += w * coeffs.wind[e] * model.physics.u_wind;
        a.solve_many(&mut [pe, qe])?;
        let (mut t, mut s) = (0.0, 0.0);
        for k in 0..l.len() {
            t += l[k] * h * p[range.start + k];
            s += l[k] * h * q[range.start + k];
        }
        red[e] = EdgeReduction { t, s };
    }
    for side in [Side::Left, Side::Right] {
        let (edge, _, _) = boundary_geometry(side, m);
        if let BoundaryCondition::Discharge { q: forcing, .. } = model.bc.side(side) {
            red[edge].s = forcing.value(time);
        }
    }
    let dirichlet = model.bc.dirichlet_cells(m, time);
    let sys = assemble_free_surface_system(grid, &red, explicit_eta, w, model.physics.g, &dirichlet);
    let eta = sys.solve()?;
    let residual = sys.residual(&eta);

    let mut u = vec![0.0; layout.edge_dofs()];
    for e in 1..m {
        let range = layout.edge_range(e);
        let k = w * model.physics.g * (eta[e] - eta[e - 1]) / grid.dx_edge[e];
        for idx in range {
            u[idx] = q[idx] - k * p[idx];
        }
    }
    Ok(ImplicitSolution { eta, u, residual })
}
