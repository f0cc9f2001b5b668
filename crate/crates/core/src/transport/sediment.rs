use crate::mesh::{Grid, LayerLayout};

/// Grass bedload flux `Ag |u|^2 u`.
pub fn grass_flux(u_bottom: f64, ag: f64) -> f64 {
    ag * u_bottom.abs() * u_bottom.abs() * u_bottom
}

/// Bottom-layer velocity at every edge.
pub fn bottom_velocities(layout: &LayerLayout, u: &[f64]) -> Vec<f64> {
    (0..layout.n_edges()).map(|e| u[layout.edge_offset(e)]).collect()
}

pub fn bed_fluxes(u_bottom: &[f64], ag: f64) -> Vec<f64> {
    u_bottom.iter().map(|&u| grass_flux(u, ag)).collect()
}

/// `b_i - xi dt / dx_i * sum_k w_k (Qb_{k,i+1/2} - Qb_{k,i-1/2})`.
pub fn exner_update(grid: &Grid, bed: &[f64], xi: f64, dt: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    let mut out = bed.to_vec();
    for &(w, qb) in terms {
        if w == 0.0 {
            continue;
        }
        for (i, b) in out.iter_mut().enumerate() {
            *b -= xi * dt * w * (qb[i + 1] - qb[i]) / grid.dx[i];
        }
    }
    out
}

/// θ-weighted Exner update from the bottom velocities at both time levels.
pub fn exner_step_theta(
    grid: &Grid,
    bed: &[f64],
    u_old: &[f64],
    u_new: &[f64],
    ag: f64,
    xi: f64,
    dt: f64,
    theta: f64,
) -> Vec<f64> {
    let q_old = bed_fluxes(u_old, ag);
    let q_new = bed_fluxes(u_new, ag);
    exner_update(grid, bed, xi, dt, &[(theta, &q_new), (1.0 - theta, &q_old)])
}

/// Stage-weighted Exner update: `weights[k]` multiplies the bed flux built
/// from `stage_u[k]`.
pub fn exner_step_imex(
    grid: &Grid,
    bed: &[f64],
    stage_u: &[&[f64]],
    weights: &[f64],
    ag: f64,
    xi: f64,
    dt: f64,
) -> Vec<f64> {
    let fluxes: Vec<Vec<f64>> = stage_u.iter().map(|u| bed_fluxes(u, ag)).collect();
    let terms: Vec<(f64, &[f64])> = weights.iter().zip(&fluxes).map(|(&w, q)| (w, q.as_slice())).collect();
    exner_update(grid, bed, xi, dt, &terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grass_law_values() {
        assert_relative_eq!(grass_flux(1.0, 0.001), 0.001);
        assert_eq!(grass_flux(0.0, 0.001), 0.0);
        assert_relative_eq!(grass_flux(-2.0, 0.001), -0.008);
    }

    #[test]
    fn uniform_velocity_keeps_bed() {
        let grid = Grid::uniform(0.0, 10.0, 5).unwrap();
        let bed = vec![1.0, 2.0, 3.0, 2.0, 1.0];
        let u = vec![0.7; 6];
        assert_eq!(exner_step_theta(&grid, &bed, &u, &u, 0.001, 1.0 / 0.6, 2.0, 0.55), bed);
        assert_eq!(exner_step_imex(&grid, &bed, &[&u, &u, &u], &[0.3, 0.3, 0.4], 0.001, 1.0, 2.0), bed);
    }

    #[test]
    fn bed_volume_change_equals_boundary_flux() {
        let grid = Grid::uniform(0.0, 10.0, 5).unwrap();
        let bed = vec![0.0; 5];
        let u_old = vec![0.5, 0.9, 1.2, 0.8, 0.4, 0.6];
        let u_new = vec![0.6, 1.0, 1.1, 0.7, 0.5, 0.5];
        let (ag, xi, dt, theta) = (0.001, 1.0 / 0.6, 3.0, 0.55);
        let nb = exner_step_theta(&grid, &bed, &u_old, &u_new, ag, xi, dt, theta);
        let dv: f64 = nb.iter().zip(&grid.dx).map(|(b, dx)| b * dx).sum();
        let q = |u: &[f64], e: usize| grass_flux(u[e], ag);
        let boundary = theta * (q(&u_new, 5) - q(&u_new, 0)) + (1.0 - theta) * (q(&u_old, 5) - q(&u_old, 0));
        assert_relative_eq!(dv, -xi * dt * boundary, max_relative = 1e-12);
    }
}
