//! Mass exchange between layers.
//!
//! Transfer values are stored per interface in the same slots as the layer
//! unknowns: slot `s` of an edge (or cell) holds the interface above layer
//! `s`, so the last slot is the free surface and is always zero.

use crate::mesh::{Expand, Grid, LayerLayout};

/// Depth-mean deviations `h_e (u_b - ubar_e)` at every edge.
fn deviations(layout: &LayerLayout, h_edge: &[f64], u: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; u.len()];
    for e in 0..layout.n_edges() {
        let range = layout.edge_range(e);
        let l = layout.edge_fractions(e);
        let ue = &u[range.clone()];
        let ubar: f64 = l.iter().zip(ue).map(|(l, u)| l * u).sum();
        for (o, &v) in out[range].iter_mut().zip(ue) {
            *o = h_edge[e] * (v - ubar);
        }
    }
    out
}

/// Upwinded deviation of cell `c` expressed on the layering of its edge `e`.
/// The donor edge of each layer follows the sign of the cell-averaged layer
/// velocity.
fn cell_deviation(
    layout: &LayerLayout,
    c: usize,
    e: usize,
    u: &[f64],
    dev: &[f64],
    out: &mut [f64],
    scratch: &mut [Vec<f64>; 2],
) {
    let other = if e == c { c + 1 } else { c };
    let n = layout.edge_layers(e);
    let [u_other, dev_other] = scratch;
    u_other.resize(n, 0.0);
    dev_other.resize(n, 0.0);
    layout.edge_to_edge(other, e, &u[layout.edge_range(other)], &mut u_other[..n]);
    layout.edge_to_edge(other, e, &dev[layout.edge_range(other)], &mut dev_other[..n]);
    let u_e = &u[layout.edge_range(e)];
    let dev_e = &dev[layout.edge_range(e)];
    let (dev_left, dev_right) = if e == c {
        (dev_e, &dev_other[..n])
    } else {
        (&dev_other[..n], dev_e)
    };
    for b in 0..n {
        let avg = 0.5 * (u_e[b] + u_other[b]);
        out[b] = if avg > 0.0 {
            dev_left[b]
        } else if avg < 0.0 {
            dev_right[b]
        } else {
            0.5 * (dev_left[b] + dev_right[b])
        };
    }
}

/// Mass-transfer terms at every edge (without the `1/dx` factor).
/// Boundary edges carry no momentum equation and are left at zero.
pub fn mass_transfer_edges(layout: &LayerLayout, h_edge: &[f64], u: &[f64]) -> Vec<f64> {
    let m = layout.n_cells();
    let dev = deviations(layout, h_edge, u);
    let mut out = vec![0.0; u.len()];
    let nmax = layout.max_layers();
    let mut d_left = vec![0.0; nmax];
    let mut d_right = vec![0.0; nmax];
    let mut scratch = [Vec::with_capacity(nmax), Vec::with_capacity(nmax)];
    for e in 1..m {
        let n = layout.edge_layers(e);
        if n < 2 {
            continue;
        }
        cell_deviation(layout, e - 1, e, u, &dev, &mut d_left, &mut scratch);
        cell_deviation(layout, e, e, u, &dev, &mut d_right, &mut scratch);
        let l = layout.edge_fractions(e);
        let slots = &mut out[layout.edge_range(e)];
        let mut acc = 0.0;
        for a in 0..n - 1 {
            acc += l[a] * (d_right[a] - d_left[a]);
            slots[a] = acc;
        }
    }
    out
}

/// Mass-transfer term at edge `e` for interface `alpha + 1/2`
/// (`1 <= alpha <= N`, one-based; zero at the surface).
pub fn mass_transfer_edge(layout: &LayerLayout, h_edge: &[f64], u: &[f64], e: usize, alpha: usize) -> f64 {
    let all = mass_transfer_edges(layout, h_edge, u);
    all[layout.edge_offset(e) + alpha - 1]
}

/// Per-layer flux differences `F_{right} - F_{left}` of every cell on the cell
/// layering, coarse-side fluxes split among fine layers.
pub fn cell_flux_differences(layout: &LayerLayout, layer_flux: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; layout.cell_dofs()];
    let nmax = layout.max_layers();
    let mut fl = vec![0.0; nmax];
    let mut fr = vec![0.0; nmax];
    for i in 0..layout.n_cells() {
        let n = layout.cell_layers(i);
        layout.edge_to_cell(i, i, &layer_flux[layout.edge_range(i)], &mut fl, Expand::Split);
        layout.edge_to_cell(i, i + 1, &layer_flux[layout.edge_range(i + 1)], &mut fr, Expand::Split);
        for (k, o) in out[layout.cell_range(i)].iter_mut().enumerate().take(n) {
            *o = fr[k] - fl[k];
        }
    }
    out
}

/// Mass-transfer rates at cell centres from per-layer edge volume fluxes.
pub fn mass_transfer_centers(grid: &Grid, layout: &LayerLayout, layer_flux: &[f64]) -> Vec<f64> {
    let diffs = cell_flux_differences(layout, layer_flux);
    let mut out = vec![0.0; layout.cell_dofs()];
    for i in 0..layout.n_cells() {
        let range = layout.cell_range(i);
        let d = &diffs[range.clone()];
        let l = layout.cell_fractions(i);
        let total: f64 = d.iter().sum();
        let n = d.len();
        let slots = &mut out[range];
        let mut acc = 0.0;
        for a in 0..n - 1 {
            acc += d[a] - l[a] * total;
            slots[a] = acc / grid.dx[i];
        }
    }
    out
}

/// Mass-transfer rate at cell `i` for interface `alpha + 1/2` (one-based).
pub fn mass_transfer_center(grid: &Grid, layout: &LayerLayout, layer_flux: &[f64], i: usize, alpha: usize) -> f64 {
    if alpha >= layout.cell_layers(i) {
        return 0.0;
    }
    mass_transfer_centers(grid, layout, layer_flux)[layout.cell_offset(i) + alpha - 1]
}

/// Telescoped closure of the centre transfer at the free surface,
/// `sum_b (d_b - l_b sum d)`, which vanishes up to rounding.
pub fn surface_transfer_residual(grid: &Grid, layout: &LayerLayout, layer_flux: &[f64], i: usize) -> f64 {
    let diffs = cell_flux_differences(layout, layer_flux);
    let d = &diffs[layout.cell_range(i)];
    let l = layout.cell_fractions(i);
    let total: f64 = d.iter().sum();
    d.iter().zip(l).map(|(d, l)| d - l * total).sum::<f64>() / grid.dx[i]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::LayerRegion;
    use approx::assert_abs_diff_eq;

    #[test]
    fn uniform_velocity_has_no_transfer() {
        let grid = Grid::uniform(0.0, 10.0, 10).unwrap();
        let layout = LayerLayout::uniform(&grid, 4).unwrap();
        let h: Vec<f64> = (0..11).map(|e| 1.0 + 0.1 * e as f64).collect();
        let mut u = vec![0.0; layout.edge_dofs()];
        for e in 0..11 {
            for k in layout.edge_range(e) {
                u[k] = 0.3 * e as f64;
            }
        }
        assert!(mass_transfer_edges(&layout, &h, &u).iter().all(|&g| g.abs() < 1e-14));
        let f: Vec<f64> = (0..11)
            .flat_map(|e| layout.edge_fractions(e).iter().map(move |l| l * 0.3 * e as f64))
            .collect();
        assert!(mass_transfer_centers(&grid, &layout, &f).iter().all(|&g| g.abs() < 1e-14));
    }

    #[test]
    fn two_layer_sheared_flow_without_x_variation() {
        let grid = Grid::uniform(0.0, 3.0, 3).unwrap();
        let layout = LayerLayout::uniform(&grid, 2).unwrap();
        let h = vec![1.0; 4];
        let mut u = vec![0.0; layout.edge_dofs()];
        for e in 0..4 {
            let r = layout.edge_range(e);
            u[r.start + 1] = 2.0;
        }
        let g = mass_transfer_edges(&layout, &h, &u);
        for e in 1..3 {
            assert_eq!(g[layout.edge_offset(e)], 0.0);
        }
    }

    #[test]
    fn two_layer_center_transfer() {
        // h u_1 grows by 1 across the cell, h u_2 shrinks by 1, l = 1/2
        let grid = Grid::uniform(0.0, 3.0, 3).unwrap();
        let layout = LayerLayout::uniform(&grid, 2).unwrap();
        let mut f = vec![0.0; layout.edge_dofs()];
        f[layout.edge_offset(2)] = 0.5;
        f[layout.edge_offset(2) + 1] = -0.5;
        assert_abs_diff_eq!(mass_transfer_center(&grid, &layout, &f, 1, 1), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn transition_cell_surface_residual_vanishes() {
        let grid = Grid::uniform(0.0, 10.0, 10).unwrap();
        let layout = LayerLayout::from_regions(
            &grid,
            &[LayerRegion::uniform(0.0, 10.0, 1), LayerRegion::uniform(0.0, 5.0, 4)],
        )
        .unwrap();
        let f: Vec<f64> = (0..layout.edge_dofs()).map(|k| (k as f64 * 0.37).sin()).collect();
        for i in 0..10 {
            assert!(surface_transfer_residual(&grid, &layout, &f, i).abs() < 1e-12);
        }
    }
}
