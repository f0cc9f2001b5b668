use crate::mesh::{Grid, LayerLayout};

/// Velocities of edge `from` mapped onto the layering of edge `to` through the
/// intermediate edges (at most two hops are needed here).
fn mapped(layout: &LayerLayout, u: &[f64], from: usize, to: usize, out: &mut Vec<f64>, tmp: &mut Vec<f64>) {
    out.clear();
    out.extend_from_slice(&u[layout.edge_range(from)]);
    let mut e = from;
    while e != to {
        let next = if to > e { e + 1 } else { e - 1 };
        let n = layout.edge_layers(next);
        if n != out.len() {
            tmp.clear();
            tmp.resize(n, 0.0);
            layout.edge_to_edge(e, next, out, tmp);
            std::mem::swap(out, tmp);
        }
        e = next;
    }
}

/// Momentum advection `-u du/dx` at every edge and layer, by second-order
/// linear upwinding. Edges next to a boundary fall back to first order on
/// the side where the two-point stencil would leave the domain. Boundary
/// edges are left at zero.
pub fn advection_terms(grid: &Grid, layout: &LayerLayout, u: &[f64]) -> Vec<f64> {
    let m = layout.n_cells();
    let mut out = vec![0.0; u.len()];
    let (mut l1, mut l2, mut r1, mut r2) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut tmp = Vec::new();
    for e in 1..m {
        let range = layout.edge_range(e);
        let ue = &u[range.clone()];
        mapped(layout, u, e - 1, e, &mut l1, &mut tmp);
        mapped(layout, u, e + 1, e, &mut r1, &mut tmp);
        let has_l2 = e >= 2;
        let has_r2 = e + 2 <= m;
        if has_l2 {
            mapped(layout, u, e - 2, e, &mut l2, &mut tmp);
        }
        if has_r2 {
            mapped(layout, u, e + 2, e, &mut r2, &mut tmp);
        }
        let dxl = grid.edges[e] - grid.edges[e - 1];
        let dxr = grid.edges[e + 1] - grid.edges[e];
        for (k, o) in out[range].iter_mut().enumerate() {
            let v = ue[k];
            let slope = if v > 0.0 {
                if has_l2 {
                    (3.0 * v - 4.0 * l1[k] + l2[k]) / (2.0 * dxl)
                } else {
                    (v - l1[k]) / dxl
                }
            } else if v < 0.0 {
                if has_r2 {
                    -(3.0 * v - 4.0 * r1[k] + r2[k]) / (2.0 * dxr)
                } else {
                    (r1[k] - v) / dxr
                }
            } else {
                0.0
            };
            *o = -v * slope;
        }
    }
    out
}

/// Advection term at edge `e`, layer `alpha` (one-based).
pub fn advection_term(grid: &Grid, layout: &LayerLayout, u: &[f64], e: usize, alpha: usize) -> f64 {
    advection_terms(grid, layout, u)[layout.edge_offset(e) + alpha - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::LayerRegion;
    use approx::assert_relative_eq;

    #[test]
    fn exact_on_linear_fields() {
        let grid = Grid::uniform(0.0, 10.0, 10).unwrap();
        let layout = LayerLayout::uniform(&grid, 3).unwrap();
        let c = 0.2;
        let mut u = vec![0.0; layout.edge_dofs()];
        for e in 0..11 {
            for k in layout.edge_range(e) {
                u[k] = 1.0 + c * grid.edges[e];
            }
        }
        let a = advection_terms(&grid, &layout, &u);
        for e in 1..10 {
            let v = 1.0 + c * grid.edges[e];
            for k in layout.edge_range(e) {
                assert_relative_eq!(a[k], -v * c, max_relative = 1e-12);
            }
        }
        // negative flow
        for v in &mut u {
            *v = -*v;
        }
        let a = advection_terms(&grid, &layout, &u);
        for e in 1..10 {
            let v = -(1.0 + c * grid.edges[e]);
            assert_relative_eq!(a[layout.edge_offset(e)], -v * (-c), max_relative = 1e-12);
        }
    }

    #[test]
    fn constant_field_across_transition() {
        let grid = Grid::uniform(0.0, 10.0, 10).unwrap();
        let layout = LayerLayout::from_regions(
            &grid,
            &[LayerRegion::uniform(0.0, 10.0, 1), LayerRegion::uniform(0.0, 5.0, 10)],
        )
        .unwrap();
        let u = vec![0.7; layout.edge_dofs()];
        assert!(advection_terms(&grid, &layout, &u).iter().all(|a| a.abs() < 1e-14));
    }
}
