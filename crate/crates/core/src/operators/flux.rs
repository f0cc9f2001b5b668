use crate::mesh::{Grid, LayerLayout, Side};
use crate::operators::boundary::{prescribed_layer_fluxes, BoundaryConditions};
use crate::state::State;

/// Depth at edge `e`: the depth of the cell upwind with respect to the
/// depth-averaged edge velocity, the mean of both neighbours when that
/// velocity vanishes. Boundary edges use their only neighbour.
pub fn upwind_height(state: &State, layout: &LayerLayout, e: usize) -> f64 {
    let m = layout.n_cells();
    if e == 0 {
        return state.depth(0);
    }
    if e == m {
        return state.depth(m - 1);
    }
    let ubar = state.mean_velocity(layout, e);
    let (hl, hr) = (state.depth(e - 1), state.depth(e));
    if ubar > 0.0 {
        hl
    } else if ubar < 0.0 {
        hr
    } else {
        0.5 * (hl + hr)
    }
}

pub fn edge_depths(state: &State, layout: &LayerLayout) -> Vec<f64> {
    (0..layout.n_edges())
        .map(|e| upwind_height(state, layout, e))
        .collect()
}

/// Per-layer volume fluxes `l h_e u` at every edge. Edges with a prescribed
/// discharge take `q(t)` split by the discharge profile instead.
pub fn layer_fluxes(
    layout: &LayerLayout,
    h_edge: &[f64],
    u: &[f64],
    bc: &BoundaryConditions,
    t: f64,
) -> Vec<f64> {
    let mut flux = vec![0.0; layout.edge_dofs()];
    for e in 0..layout.n_edges() {
        let range = layout.edge_range(e);
        for ((f, &l), &v) in flux[range.clone()]
            .iter_mut()
            .zip(layout.edge_fractions(e))
            .zip(&u[range])
        {
            *f = l * h_edge[e] * v;
        }
    }
    override_boundary_fluxes(layout, bc, t, &mut flux);
    flux
}

pub fn override_boundary_fluxes(layout: &LayerLayout, bc: &BoundaryConditions, t: f64, flux: &mut [f64]) {
    let m = layout.n_cells();
    for (side, e) in [(Side::Left, 0), (Side::Right, m)] {
        if let Some(q) = prescribed_layer_fluxes(layout, bc, side, t) {
            flux[layout.edge_range(e)].copy_from_slice(&q);
        }
    }
}

/// Total discharge through every edge.
pub fn edge_discharges(layout: &LayerLayout, layer_flux: &[f64]) -> Vec<f64> {
    (0..layout.n_edges())
        .map(|e| layer_flux[layout.edge_range(e)].iter().sum())
        .collect()
}

/// `Q_{i+1/2} - Q_{i-1/2}` for every cell.
pub fn flux_differences(discharge: &[f64]) -> Vec<f64> {
    discharge.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Linear combination `sum_k w_k v_k` of equally sized vectors.
pub fn combine(weights: &[f64], vectors: &[&[f64]]) -> Vec<f64> {
    let n = vectors.first().map_or(0, |v| v.len());
    let mut out = vec![0.0; n];
    for (&w, v) in weights.iter().zip(vectors) {
        if w == 0.0 {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o += w * x;
        }
    }
    out
}

/// Explicit continuity tendency `-(Q_{i+1/2} - Q_{i-1/2}) / dx_i`.
pub fn continuity_tendency(grid: &Grid, layout: &LayerLayout, layer_flux: &[f64]) -> Vec<f64> {
    let q = edge_discharges(layout, layer_flux);
    flux_differences(&q)
        .iter()
        .zip(&grid.dx)
        .map(|(d, dx)| -d / dx)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::boundary::{BoundaryCondition, Forcing};

    fn setup() -> (Grid, LayerLayout, State) {
        let grid = Grid::uniform(0.0, 3.0, 3).unwrap();
        let layout = LayerLayout::uniform(&grid, 2).unwrap();
        let s = State::at_rest(&layout, vec![10.0, 12.0, 11.0], vec![0.0; 3]);
        (grid, layout, s)
    }

    #[test]
    fn upwind_height_follows_mean_velocity() {
        let (_, layout, mut s) = setup();
        assert_eq!(upwind_height(&s, &layout, 1), 11.0);
        let r = layout.edge_range(1);
        s.u[r.clone()].copy_from_slice(&[1.0, 0.5]);
        assert_eq!(upwind_height(&s, &layout, 1), 10.0);
        s.u[r].copy_from_slice(&[1.0, -3.0]);
        assert_eq!(upwind_height(&s, &layout, 1), 12.0);
        assert_eq!(upwind_height(&s, &layout, 0), 10.0);
        assert_eq!(upwind_height(&s, &layout, 3), 11.0);
    }

    #[test]
    fn discharge_edges_take_prescribed_flux() {
        let (_, layout, s) = setup();
        let bc = BoundaryConditions {
            left: BoundaryCondition::Discharge {
                q: Forcing::Constant { value: 2.0 },
                profile: Some(vec![0.25, 0.75]),
            },
            right: BoundaryCondition::Wall,
        };
        let h = edge_depths(&s, &layout);
        let f = layer_fluxes(&layout, &h, &s.u, &bc, 0.0);
        assert_eq!(&f[layout.edge_range(0)], &[0.5, 1.5]);
        let q = edge_discharges(&layout, &f);
        assert_eq!(q, vec![2.0, 0.0, 0.0, 0.0]);
        assert_eq!(flux_differences(&q), vec![-2.0, 0.0, 0.0]);
    }
}
