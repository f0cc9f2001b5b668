use crate::mesh::{Expand, Grid, LayerLayout, Side};
use crate::operators::transfer::mass_transfer_centers;

/// Interface value picked by the direction of the exchange: the upper layer
/// when fluid moves down (`g > 0`), the lower layer when it moves up.
pub fn interface_tracer_value(rho_lo: f64, rho_hi: f64, g: f64) -> f64 {
    let sign = if g > 0.0 {
        1.0
    } else if g < 0.0 {
        -1.0
    } else {
        0.0
    };
    0.5 * (rho_lo + rho_hi) + 0.5 * sign * (rho_hi - rho_lo)
}

/// Tracer mass per cell and layer, `dx l h rho`.
pub fn tracer_masses(grid: &Grid, layout: &LayerLayout, depth: &[f64], rho: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; rho.len()];
    for i in 0..layout.n_cells() {
        let range = layout.cell_range(i);
        for ((o, &l), &r) in out[range.clone()].iter_mut().zip(layout.cell_fractions(i)).zip(&rho[range]) {
            *o = grid.dx[i] * l * depth[i] * r;
        }
    }
    out
}

/// Inverse of [`tracer_masses`].
pub fn concentrations(grid: &Grid, layout: &LayerLayout, depth: &[f64], mass: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; mass.len()];
    for i in 0..layout.n_cells() {
        let range = layout.cell_range(i);
        for ((o, &l), &mm) in out[range.clone()].iter_mut().zip(layout.cell_fractions(i)).zip(&mass[range]) {
            *o = mm / (grid.dx[i] * l * depth[i]);
        }
    }
    out
}

/// Net tracer outflow of every cell and layer for per-layer edge volume
/// fluxes `layer_flux`: horizontal upwind fluxes minus vertical exchange
/// through the layer interfaces. Setting `rho = 1` gives `l_a` times the
/// total flux difference, the continuity equation.
pub fn tracer_outflow(grid: &Grid, layout: &LayerLayout, layer_flux: &[f64], rho: &[f64]) -> Vec<f64> {
    let m = layout.n_cells();
    let nmax = layout.max_layers();
    let mut edge_flux = vec![0.0; layout.edge_dofs()];
    let mut donor_l = vec![0.0; nmax];
    let mut donor_r = vec![0.0; nmax];
    for e in 0..=m {
        let n = layout.edge_layers(e);
        let left = if e == 0 { 0 } else { e - 1 };
        let right = if e == m { m - 1 } else { e };
        layout.cell_to_edge(left, e, &rho[layout.cell_range(left)], &mut donor_l[..n]);
        layout.cell_to_edge(right, e, &rho[layout.cell_range(right)], &mut donor_r[..n]);
        let range = layout.edge_range(e);
        for (k, (f, &v)) in edge_flux[range.clone()].iter_mut().zip(&layer_flux[range]).enumerate() {
            *f = if v > 0.0 { v * donor_l[k] } else { v * donor_r[k] };
        }
    }

    let g = mass_transfer_centers(grid, layout, layer_flux);
    let mut out = vec![0.0; layout.cell_dofs()];
    let mut fl = vec![0.0; nmax];
    let mut fr = vec![0.0; nmax];
    for i in 0..m {
        let n = layout.cell_layers(i);
        let range = layout.cell_range(i);
        layout.edge_to_cell(i, i, &edge_flux[layout.edge_range(i)], &mut fl, Expand::Split);
        layout.edge_to_cell(i, i + 1, &edge_flux[layout.edge_range(i + 1)], &mut fr, Expand::Split);
        let r = &rho[range.clone()];
        if let Some(t) = layout.transition(i) {
            // outflow through the coarse edge leaves each fine layer at its own value
            let (e, f, sign) = match t.fine_side {
                Side::Left => (i + 1, &mut fr, 1.0),
                Side::Right => (i, &mut fl, -1.0),
            };
            let q = &layer_flux[layout.edge_range(e)];
            let coarse = layout.edge_fractions(e);
            let fine = layout.cell_fractions(i);
            for (beta, &(lo, hi)) in t.ranges.iter().enumerate() {
                if sign * q[beta] > 0.0 {
                    for a in lo..=hi {
                        f[a] = q[beta] * fine[a] / coarse[beta] * r[a];
                    }
                }
            }
        }
        let gi = &g[range.clone()];
        let mut below = 0.0;
        for (a, o) in out[range].iter_mut().enumerate() {
            let above = if a + 1 < n {
                interface_tracer_value(r[a], r[a + 1], gi[a]) * gi[a]
            } else {
                0.0
            };
            *o = fr[a] - fl[a] - grid.dx[i] * (above - below);
            below = above;
        }
    }
    out
}

/// `m_new = m_old - dt * sum_k w_k outflow_k`.
pub fn advance_masses(mass: &[f64], dt: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    let mut out = mass.to_vec();
    for &(w, phi) in terms {
        if w == 0.0 {
            continue;
        }
        for (o, p) in out.iter_mut().zip(phi) {
            *o -= dt * w * p;
        }
    }
    out
}

/// One tracer update of the θ-method: fluxes are the θ-weighted volume
/// fluxes used by the continuity equation, concentrations are taken at the
/// old level.
pub fn tracer_step_theta(
    grid: &Grid,
    layout: &LayerLayout,
    depth_old: &[f64],
    depth_new: &[f64],
    rho: &[f64],
    theta_flux: &[f64],
    dt: f64,
) -> Vec<f64> {
    let mass = tracer_masses(grid, layout, depth_old, rho);
    let phi = tracer_outflow(grid, layout, theta_flux, rho);
    let new_mass = advance_masses(&mass, dt, &[(1.0, &phi)]);
    concentrations(grid, layout, depth_new, &new_mass)
}
