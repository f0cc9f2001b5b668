//! Staggered 1D grid and variable vertical layer layouts.
//!
//! Free-surface unknowns live at cell centres `i = 0..M`, velocities at the
//! `M + 1` cell edges. Edge `e` separates cells `e - 1` and `e`. Each edge
//! carries its own layer count and fractions; a cell takes the layering of
//! whichever of its two edges has more layers.

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, LayoutError};

/// Tolerance used for fraction sums and the nesting condition between
/// coarse and fine layers.
pub const FRACTION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub x_start: f64,
    pub x_end: f64,
    /// Cell centres, length `M`.
    pub centers: Vec<f64>,
    /// Cell edges, length `M + 1`.
    pub edges: Vec<f64>,
    /// Cell widths, length `M`.
    pub dx: Vec<f64>,
    /// Centre-to-centre spacing at each edge, length `M + 1`. The two boundary
    /// entries hold the width of the adjacent cell.
    pub dx_edge: Vec<f64>,
}

impl Grid {
    /// Uniform partition of `[x_start, x_end]` into `cells` control volumes.
    pub fn uniform(x_start: f64, x_end: f64, cells: usize) -> Result<Self, ConfigError> {
        if !(x_start.is_finite() && x_end.is_finite()) || x_end <= x_start {
            return Err(ConfigError::Grid(format!(
                "extent [{x_start}, {x_end}] is empty or not finite"
            )));
        }
        if cells < 3 {
            return Err(ConfigError::Grid(format!("need at least 3 cells, got {cells}")));
        }
        let width = (x_end - x_start) / cells as f64;
        let edges: Vec<f64> = (0..=cells)
            .map(|e| {
                if e == cells {
                    x_end
                } else {
                    x_start + e as f64 * width
                }
            })
            .collect();
        let centers: Vec<f64> = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let dx: Vec<f64> = edges.windows(2).map(|w| w[1] - w[0]).collect();
        let mut dx_edge = vec![0.0; cells + 1];
        dx_edge[0] = dx[0];
        dx_edge[cells] = dx[cells - 1];
        for e in 1..cells {
            dx_edge[e] = centers[e] - centers[e - 1];
        }
        Ok(Self {
            x_start,
            x_end,
            centers,
            edges,
            dx,
            dx_edge,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.centers.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }
}

/// A block of edges sharing one vertical layering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerRegion {
    pub x_lo: f64,
    pub x_hi: f64,
    pub layers: usize,
    /// Layer fractions bottom to top; equal fractions when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fractions: Option<Vec<f64>>,
}

impl LayerRegion {
    pub fn uniform(x_lo: f64, x_hi: f64, layers: usize) -> Self {
        Self {
            x_lo,
            x_hi,
            layers,
            fractions: None,
        }
    }

    pub fn with_fractions(x_lo: f64, x_hi: f64, fractions: Vec<f64>) -> Self {
        Self {
            x_lo,
            x_hi,
            layers: fractions.len(),
            fractions: Some(fractions),
        }
    }

    pub fn resolved_fractions(&self) -> Vec<f64> {
        match &self.fractions {
            Some(f) => f.clone(),
            None => vec![1.0 / self.layers as f64; self.layers],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Nesting of coarse layers into fine layers across a transition cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    /// Which edge of the cell carries the finer layering.
    pub fine_side: Side,
    /// For each coarse layer, the inclusive range of fine layers it covers.
    pub ranges: Vec<(usize, usize)>,
}

impl Transition {
    /// Index of the coarse layer containing fine layer `alpha`.
    pub fn coarse_of(&self, alpha: usize) -> usize {
        self.ranges
            .iter()
            .position(|&(lo, hi)| lo <= alpha && alpha <= hi)
            .expect("fine layer outside transition map")
    }
}

/// How coarse-layer values are expanded onto fine layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expand {
    /// Intensive quantities (velocities): every fine layer takes the coarse value.
    Replicate,
    /// Extensive quantities (fluxes): apportioned by fine fraction.
    Split,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerLayout {
    edge_n: Vec<usize>,
    edge_off: Vec<usize>,
    edge_l: Vec<f64>,
    cell_n: Vec<usize>,
    cell_off: Vec<usize>,
    cell_l: Vec<f64>,
    transitions: Vec<Option<Transition>>,
    edge_x: Vec<f64>,
}

impl LayerLayout {
    /// Assigns a layering to every edge from `regions` (closed intervals, the
    /// last matching region wins) and validates the result.
    pub fn from_regions(grid: &Grid, regions: &[LayerRegion]) -> Result<Self, LayoutError> {
        let tol = 1e-9 * (grid.x_end - grid.x_start);
        let mut per_edge = Vec::with_capacity(grid.n_edges());
        for (e, &x) in grid.edges.iter().enumerate() {
            let region = regions
                .iter()
                .rev()
                .find(|r| x >= r.x_lo - tol && x <= r.x_hi + tol)
                .ok_or(LayoutError::Uncovered { edge: e, x })?;
            per_edge.push(region.resolved_fractions());
        }
        Self::from_edge_fractions(grid, per_edge)
    }

    pub fn uniform(grid: &Grid, layers: usize) -> Result<Self, LayoutError> {
        Self::from_regions(
            grid,
            &[LayerRegion::uniform(grid.x_start, grid.x_end, layers)],
        )
    }

    pub fn from_edge_fractions(grid: &Grid, per_edge: Vec<Vec<f64>>) -> Result<Self, LayoutError> {
        if per_edge.len() != grid.n_edges() {
            return Err(LayoutError::Shape {
                layout: per_edge.len(),
                grid: grid.n_edges(),
            });
        }
        for (e, fr) in per_edge.iter().enumerate() {
            check_fractions(e, grid.edges[e], fr)?;
        }

        let m = grid.n_cells();
        let edge_n: Vec<usize> = per_edge.iter().map(Vec::len).collect();
        let edge_off = offsets(&edge_n);
        let edge_l: Vec<f64> = per_edge.iter().flatten().copied().collect();

        let mut cell_n = Vec::with_capacity(m);
        let mut cell_l = Vec::new();
        let mut transitions = Vec::with_capacity(m);
        for i in 0..m {
            let (left, right) = (&per_edge[i], &per_edge[i + 1]);
            if left.len() == right.len() {
                let same = left
                    .iter()
                    .zip(right)
                    .all(|(a, b)| (a - b).abs() <= FRACTION_TOL);
                if !same {
                    return Err(LayoutError::Incompatible {
                        cell: i,
                        coarse_edge: i,
                        fine_edge: i + 1,
                    });
                }
                cell_n.push(left.len());
                cell_l.extend_from_slice(left);
                transitions.push(None);
                continue;
            }
            let (fine_side, fine, coarse, fine_edge, coarse_edge) = if left.len() > right.len() {
                (Side::Left, left, right, i, i + 1)
            } else {
                (Side::Right, right, left, i + 1, i)
            };
            let ranges = nest(fine, coarse).ok_or(LayoutError::Incompatible {
                cell: i,
                coarse_edge,
                fine_edge,
            })?;
            if i >= 1 && edge_n[i - 1] != edge_n[i] {
                return Err(LayoutError::Adjacency { cell: i, edge: i - 1 });
            }
            if i + 2 < edge_n.len() && edge_n[i + 2] != edge_n[i + 1] {
                return Err(LayoutError::Adjacency { cell: i, edge: i + 2 });
            }
            cell_n.push(fine.len());
            cell_l.extend_from_slice(fine);
            transitions.push(Some(Transition { fine_side, ranges }));
        }
        let cell_off = offsets(&cell_n);
        Ok(Self {
            edge_n,
            edge_off,
            edge_l,
            cell_n,
            cell_off,
            cell_l,
            transitions,
            edge_x: grid.edges.clone(),
        })
    }

    /// Re-runs every layout check.
    pub fn validate(&self, grid: &Grid) -> Result<(), LayoutError> {
        let per_edge: Vec<Vec<f64>> = (0..self.n_edges())
            .map(|e| self.edge_fractions(e).to_vec())
            .collect();
        let rebuilt = Self::from_edge_fractions(grid, per_edge)?;
        debug_assert_eq!(&rebuilt, self);
        Ok(())
    }

    pub fn n_edges(&self) -> usize {
        self.edge_n.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cell_n.len()
    }

    pub fn edge_layers(&self, e: usize) -> usize {
        self.edge_n[e]
    }

    pub fn edge_offset(&self, e: usize) -> usize {
        self.edge_off[e]
    }

    pub fn edge_fractions(&self, e: usize) -> &[f64] {
        &self.edge_l[self.edge_off[e]..self.edge_off[e] + self.edge_n[e]]
    }

    pub fn edge_range(&self, e: usize) -> std::ops::Range<usize> {
        self.edge_off[e]..self.edge_off[e] + self.edge_n[e]
    }

    pub fn cell_layers(&self, i: usize) -> usize {
        self.cell_n[i]
    }

    pub fn cell_offset(&self, i: usize) -> usize {
        self.cell_off[i]
    }

    pub fn cell_fractions(&self, i: usize) -> &[f64] {
        &self.cell_l[self.cell_off[i]..self.cell_off[i] + self.cell_n[i]]
    }

    pub fn cell_range(&self, i: usize) -> std::ops::Range<usize> {
        self.cell_off[i]..self.cell_off[i] + self.cell_n[i]
    }

    pub fn transition(&self, i: usize) -> Option<&Transition> {
        self.transitions[i].as_ref()
    }

    pub fn transition_cells(&self) -> impl Iterator<Item = (usize, &Transition)> {
        self.transitions
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.as_ref().map(|t| (i, t)))
    }

    /// Total number of per-layer edge velocities.
    pub fn edge_dofs(&self) -> usize {
        self.edge_l.len()
    }

    /// Total number of per-layer cell values (tracer unknowns).
    pub fn cell_dofs(&self) -> usize {
        self.cell_l.len()
    }

    /// Free-surface values plus per-layer velocities.
    pub fn dof_count(&self) -> usize {
        self.n_cells() + self.edge_dofs()
    }

    pub fn max_layers(&self) -> usize {
        self.edge_n.iter().copied().max().unwrap_or(0)
    }

    pub fn edge_x(&self, e: usize) -> f64 {
        self.edge_x[e]
    }

    /// Expands values given on edge `e` (a boundary of cell `i`) onto the
    /// layering of cell `i`.
    pub fn edge_to_cell(&self, i: usize, e: usize, src: &[f64], dst: &mut [f64], mode: Expand) {
        debug_assert!(e == i || e == i + 1);
        let cell_n = self.cell_n[i];
        if self.edge_n[e] == cell_n {
            dst[..cell_n].copy_from_slice(&src[..cell_n]);
            return;
        }
        let t = self.transitions[i].as_ref().expect("transition map");
        let fine = self.cell_fractions(i);
        let coarse = self.edge_fractions(e);
        for (beta, &(lo, hi)) in t.ranges.iter().enumerate() {
            for alpha in lo..=hi {
                dst[alpha] = match mode {
                    Expand::Replicate => src[beta],
                    Expand::Split => src[beta] * fine[alpha] / coarse[beta],
                };
            }
        }
    }

    /// Collapses values on the layering of cell `i` onto the layering of its
    /// edge `e` by fraction-weighted averaging.
    pub fn cell_to_edge(&self, i: usize, e: usize, src: &[f64], dst: &mut [f64]) {
        debug_assert!(e == i || e == i + 1);
        let edge_n = self.edge_n[e];
        if self.cell_n[i] == edge_n {
            dst[..edge_n].copy_from_slice(&src[..edge_n]);
            return;
        }
        let t = self.transitions[i].as_ref().expect("transition map");
        let fine = self.cell_fractions(i);
        for (beta, &range) in t.ranges.iter().enumerate() {
            dst[beta] = aggregate_velocity(src, fine, range).expect("valid transition range");
        }
    }

    /// Maps per-layer values from edge `from` onto the layering of the
    /// adjacent edge `to` (`|from - to| == 1`).
    pub fn edge_to_edge(&self, from: usize, to: usize, src: &[f64], dst: &mut [f64]) {
        let n_to = self.edge_n[to];
        let n_from = self.edge_n[from];
        if n_from == n_to {
            dst[..n_to].copy_from_slice(&src[..n_to]);
            return;
        }
        let cell = from.min(to);
        let t = self.transitions[cell].as_ref().expect("transition map");
        if n_from > n_to {
            let fine = self.edge_fractions(from);
            for (beta, &range) in t.ranges.iter().enumerate() {
                dst[beta] = aggregate_velocity(src, fine, range).expect("valid transition range");
            }
        } else {
            for (beta, &(lo, hi)) in t.ranges.iter().enumerate() {
                for d in &mut dst[lo..=hi] {
                    *d = src[beta];
                }
            }
        }
    }
}

/// Fraction-weighted mean of `fine_values` over the inclusive layer range.
///
/// Under the nesting condition the summed fine fractions equal the coarse
/// fraction, so this is the coarse-layer velocity that carries the same flux.
pub fn aggregate_velocity(
    fine_values: &[f64],
    fine_fractions: &[f64],
    range: (usize, usize),
) -> Result<f64, crate::error::SolverError> {
    let (lo, hi) = range;
    if lo > hi || hi >= fine_values.len() || hi >= fine_fractions.len() {
        return Err(crate::error::SolverError::Shape(format!(
            "aggregation range [{lo}, {hi}] outside {} fine layers",
            fine_values.len().min(fine_fractions.len())
        )));
    }
    let mut weight = 0.0;
    let mut sum = 0.0;
    for a in lo..=hi {
        weight += fine_fractions[a];
        sum += fine_fractions[a] * fine_values[a];
    }
    if weight <= 0.0 {
        return Err(crate::error::SolverError::Shape(
            "aggregation over zero total fraction".into(),
        ));
    }
    Ok(sum / weight)
}

fn offsets(counts: &[usize]) -> Vec<usize> {
    let mut acc = 0;
    counts
        .iter()
        .map(|&n| {
            let o = acc;
            acc += n;
            o
        })
        .collect()
}

fn check_fractions(edge: usize, x: f64, fractions: &[f64]) -> Result<(), LayoutError> {
    if let Some(&bad) = fractions.iter().find(|&&l| !(l > 0.0)) {
        return Err(LayoutError::NonPositiveFraction { edge, x, value: bad });
    }
    let sum: f64 = fractions.iter().sum();
    if fractions.is_empty() || (sum - 1.0).abs() > FRACTION_TOL {
        return Err(LayoutError::FractionSum { edge, x, sum });
    }
    Ok(())
}

/// Greedy nesting of `coarse` fractions into consecutive runs of `fine`.
fn nest(fine: &[f64], coarse: &[f64]) -> Option<Vec<(usize, usize)>> {
    let mut ranges = Vec::with_capacity(coarse.len());
    let mut cursor = 0;
    for &target in coarse {
        let start = cursor;
        let mut acc = 0.0;
        loop {
            if cursor >= fine.len() {
                return None;
            }
            acc += fine[cursor];
            cursor += 1;
            if (acc - target).abs() <= FRACTION_TOL {
                break;
            }
            if acc > target + FRACTION_TOL {
                return None;
            }
        }
        ranges.push((start, cursor - 1));
    }
    (cursor == fine.len()).then_some(ranges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn nvar_layout(grid: &Grid) -> LayerLayout {
        LayerLayout::from_regions(
            grid,
            &[
                LayerRegion::uniform(5000.0, 10000.0, 1),
                LayerRegion::uniform(0.0, 5000.0, 10),
            ],
        )
        .unwrap()
    }

    #[test]
    fn uniform_grid_spacing() {
        let g = Grid::uniform(0.0, 10000.0, 200).unwrap();
        assert_eq!(g.n_edges(), 201);
        assert!(g.dx.iter().all(|&d| (d - 50.0).abs() < 1e-9));
        let g = Grid::uniform(-25.0, 25.0, 200).unwrap();
        assert!(g.dx.iter().all(|&d| (d - 0.25).abs() < 1e-12));
        let g = Grid::uniform(0.0, 1.0, 3).unwrap();
        assert_relative_eq!(g.edges[1], 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(g.edges[2], 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(g.edges[3], 1.0);
        for e in 1..3 {
            assert!(g.dx_edge[e] > 0.0);
        }
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(Grid::uniform(1.0, 1.0, 10).is_err());
        assert!(Grid::uniform(0.0, 1.0, 2).is_err());
        assert!(Grid::uniform(0.0, f64::NAN, 10).is_err());
    }

    #[test]
    fn dof_counts_for_free_oscillation_layouts() {
        let g = Grid::uniform(0.0, 10000.0, 200).unwrap();
        assert_eq!(LayerLayout::uniform(&g, 10).unwrap().dof_count(), 2210);
        let nvar = nvar_layout(&g);
        assert_eq!(nvar.dof_count(), 1310);
        let trans: Vec<_> = nvar.transition_cells().collect();
        assert_eq!(trans.len(), 1);
        assert_eq!(trans[0].0, 100);
        assert_eq!(trans[0].1.fine_side, Side::Left);
        assert_eq!(trans[0].1.ranges, vec![(0, 9)]);
        assert_eq!(nvar.cell_layers(100), 10);
        assert_eq!(nvar.cell_layers(101), 1);
    }

    #[test]
    fn halves_nest_into_quarters() {
        let g = Grid::uniform(0.0, 4.0, 4).unwrap();
        let layout = LayerLayout::from_regions(
            &g,
            &[
                LayerRegion::uniform(0.0, 4.0, 4),
                LayerRegion::uniform(2.0, 4.0, 2),
            ],
        )
        .unwrap();
        let t = layout.transition(1).unwrap();
        assert_eq!(t.ranges, vec![(0, 1), (2, 3)]);
        assert_eq!(t.fine_side, Side::Left);
    }

    #[test]
    fn rejects_incompatible_fractions() {
        let g = Grid::uniform(0.0, 4.0, 4).unwrap();
        let err = LayerLayout::from_regions(
            &g,
            &[
                LayerRegion::uniform(0.0, 4.0, 3),
                LayerRegion::uniform(2.0, 4.0, 2),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, LayoutError::Incompatible { cell: 1, .. }));
    }

    #[test]
    fn rejects_adjacent_transitions() {
        let g = Grid::uniform(0.0, 6.0, 6).unwrap();
        // edges 0..=2 four layers, edge 3 two layers, edges 4..=6 one layer
        let mut per_edge = vec![vec![0.25; 4]; 3];
        per_edge.push(vec![0.5, 0.5]);
        per_edge.extend(vec![vec![1.0]; 3]);
        let err = LayerLayout::from_edge_fractions(&g, per_edge).unwrap_err();
        assert!(matches!(err, LayoutError::Adjacency { .. }));
    }

    #[test]
    fn rejects_bad_fraction_sum_and_uncovered_edges() {
        let g = Grid::uniform(0.0, 3.0, 3).unwrap();
        let err = LayerLayout::from_regions(
            &g,
            &[LayerRegion::with_fractions(0.0, 3.0, vec![0.5, 0.4])],
        )
        .unwrap_err();
        assert!(matches!(err, LayoutError::FractionSum { .. }));
        let err =
            LayerLayout::from_regions(&g, &[LayerRegion::uniform(0.0, 2.0, 2)]).unwrap_err();
        assert!(matches!(err, LayoutError::Uncovered { edge: 3, .. }));
    }

    #[test]
    fn revalidation_is_idempotent() {
        let g = Grid::uniform(0.0, 10000.0, 200).unwrap();
        let nvar = nvar_layout(&g);
        nvar.validate(&g).unwrap();
        nvar.validate(&g).unwrap();
    }

    #[test]
    fn aggregation_examples() {
        assert_relative_eq!(
            aggregate_velocity(&[1.0, 2.0], &[0.3, 0.2], (0, 1)).unwrap(),
            1.4,
            epsilon = 1e-15
        );
        assert_eq!(aggregate_velocity(&[5.0], &[0.1], (0, 0)).unwrap(), 5.0);
        let c = 0.731;
        assert_relative_eq!(
            aggregate_velocity(&[c; 4], &[0.1, 0.2, 0.3, 0.4], (1, 3)).unwrap(),
            c,
            epsilon = 1e-15
        );
        assert!(aggregate_velocity(&[1.0], &[1.0], (1, 0)).is_err());
        assert!(aggregate_velocity(&[1.0], &[1.0], (0, 1)).is_err());
    }

    #[test]
    fn edge_conversions_through_transition() {
        let g = Grid::uniform(0.0, 4.0, 4).unwrap();
        let layout = LayerLayout::from_regions(
            &g,
            &[
                LayerRegion::uniform(0.0, 4.0, 4),
                LayerRegion::uniform(2.0, 4.0, 2),
            ],
        )
        .unwrap();
        // edge 1 fine, edge 2 coarse, transition in cell 1
        let fine = [1.0, 3.0, 5.0, 7.0];
        let mut coarse = [0.0; 2];
        layout.edge_to_edge(1, 2, &fine, &mut coarse);
        assert_eq!(coarse, [2.0, 6.0]);
        let mut back = [0.0; 4];
        layout.edge_to_edge(2, 1, &coarse, &mut back);
        assert_eq!(back, [2.0, 2.0, 6.0, 6.0]);
        let mut split = [0.0; 4];
        layout.edge_to_cell(1, 2, &[1.0, 3.0], &mut split, Expand::Split);
        assert_eq!(split, [0.5, 0.5, 1.5, 1.5]);
    }
}
