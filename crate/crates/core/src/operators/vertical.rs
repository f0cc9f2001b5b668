use crate::mesh::{Expand, Grid, LayerLayout};
use crate::state::State;

/// Vertical velocity of one column at the layer interfaces. Index `k` is the
/// interface below layer `k` (`k = N` is the free surface). `minus` is the
/// limit from below, `plus` from above.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnVelocity {
    pub minus: Vec<f64>,
    pub plus: Vec<f64>,
}

impl ColumnVelocity {
    /// Single value per interface: the mean of both one-sided limits.
    pub fn averaged(&self) -> Vec<f64> {
        self.minus
            .iter()
            .zip(&self.plus)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }
}

fn central(values: &[f64], x: &[f64], i: usize) -> f64 {
    let n = values.len();
    let (lo, hi) = if i == 0 {
        (0, 1)
    } else if i == n - 1 {
        (n - 2, n - 1)
    } else {
        (i - 1, i + 1)
    };
    (values[hi] - values[lo]) / (x[hi] - x[lo])
}

/// Recovers `w` in every cell from the horizontal velocities by integrating
/// the incompressibility condition upwards from the kinematic bottom
/// condition. `transfer_bottom` is the exchange through the bed (zero for an
/// impermeable bottom).
pub fn recover_vertical_velocity(
    grid: &Grid,
    layout: &LayerLayout,
    state: &State,
    transfer_bottom: f64,
) -> Vec<ColumnVelocity> {
    let m = grid.n_cells();
    let h = state.depths();
    let nmax = layout.max_layers();
    let mut ul = vec![0.0; nmax];
    let mut ur = vec![0.0; nmax];
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let n = layout.cell_layers(i);
        let l = layout.cell_fractions(i);
        layout.edge_to_cell(i, i, state.edge_u(layout, i), &mut ul, Expand::Replicate);
        layout.edge_to_cell(i, i + 1, state.edge_u(layout, i + 1), &mut ur, Expand::Replicate);
        let db = central(&state.b, &grid.centers, i);
        let dh = central(&h, &grid.centers, i);
        let mut minus = vec![0.0; n + 1];
        let mut plus = vec![0.0; n + 1];
        let u1 = 0.5 * (ul[0] + ur[0]);
        plus[0] = u1 * db - transfer_bottom;
        minus[0] = plus[0];
        let mut below = 0.0;
        for a in 0..n {
            let div = (ur[a] - ul[a]) / grid.dx[i];
            minus[a + 1] = plus[a] - l[a] * h[i] * div;
            below += l[a];
            if a + 1 < n {
                let jump = 0.5 * (ur[a + 1] + ul[a + 1]) - 0.5 * (ur[a] + ul[a]);
                let slope = db + below * dh;
                plus[a + 1] = minus[a + 1] + jump * slope;
            } else {
                plus[a + 1] = minus[a + 1];
            }
        }
        out.push(ColumnVelocity { minus, plus });
    }
    out
}

/// Interface slope `d z_{a+1/2} / dx` used by the jump relation, for
/// interface `k` (counted from the bed) of cell `i`.
pub fn interface_slope(grid: &Grid, layout: &LayerLayout, state: &State, i: usize, k: usize) -> f64 {
    let h = state.depths();
    let below: f64 = layout.cell_fractions(i)[..k].iter().sum();
    central(&state.b, &grid.centers, i) + below * central(&h, &grid.centers, i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn uniform_flow_over_flat_bed_is_horizontal() {
        let grid = Grid::uniform(0.0, 10.0, 10).unwrap();
        let layout = LayerLayout::uniform(&grid, 3).unwrap();
        let mut s = State::at_rest(&layout, vec![2.0; 10], vec![0.0; 10]);
        s.u.iter_mut().for_each(|u| *u = 0.4);
        for col in recover_vertical_velocity(&grid, &layout, &s, 0.0) {
            assert!(col.averaged().iter().all(|&w| w == 0.0));
        }
    }

    #[test]
    fn kinematic_bottom_condition_on_slope() {
        let grid = Grid::uniform(0.0, 10.0, 10).unwrap();
        let layout = LayerLayout::uniform(&grid, 2).unwrap();
        let slope = 0.05;
        let b: Vec<f64> = grid.centers.iter().map(|x| slope * x).collect();
        let eta: Vec<f64> = b.iter().map(|b| b + 3.0).collect();
        let mut s = State::at_rest(&layout, eta, b);
        s.u.iter_mut().for_each(|u| *u = 0.8);
        let w = recover_vertical_velocity(&grid, &layout, &s, 0.0);
        assert_relative_eq!(w[4].plus[0], 0.8 * slope, max_relative = 1e-12);
    }

    #[test]
    fn single_layer_divergence() {
        let grid = Grid::uniform(0.0, 4.0, 4).unwrap();
        let layout = LayerLayout::uniform(&grid, 1).unwrap();
        let mut s = State::at_rest(&layout, vec![2.0; 4], vec![0.0; 4]);
        for e in 0..5 {
            s.u[e] = 0.1 * e as f64;
        }
        let w = recover_vertical_velocity(&grid, &layout, &s, 0.0);
        // du/dx = 0.1 over a 2 m column
        assert_relative_eq!(w[2].minus[1], -0.2, max_relative = 1e-12);
    }
}
