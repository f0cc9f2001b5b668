use serde::{Deserialize, Serialize};

use crate::error::SolverError;
use crate::mesh::{Grid, LayerLayout};

/// Prognostic variables on the staggered grid.
///
/// `u` is flattened over edges using [`LayerLayout::edge_range`], `rho` over
/// cells using [`LayerLayout::cell_range`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub eta: Vec<f64>,
    pub b: Vec<f64>,
    pub u: Vec<f64>,
    pub rho: Vec<f64>,
    pub time: f64,
}

impl State {
    /// Fluid at rest with free surface `eta` over bed `b`, unit tracer.
    pub fn at_rest(layout: &LayerLayout, eta: Vec<f64>, b: Vec<f64>) -> Self {
        Self {
            eta,
            b,
            u: vec![0.0; layout.edge_dofs()],
            rho: vec![1.0; layout.cell_dofs()],
            time: 0.0,
        }
    }

    pub fn depth(&self, i: usize) -> f64 {
        self.eta[i] - self.b[i]
    }

    pub fn depths(&self) -> Vec<f64> {
        self.eta.iter().zip(&self.b).map(|(e, b)| e - b).collect()
    }

    pub fn edge_u<'a>(&'a self, layout: &LayerLayout, e: usize) -> &'a [f64] {
        &self.u[layout.edge_range(e)]
    }

    pub fn cell_rho<'a>(&'a self, layout: &LayerLayout, i: usize) -> &'a [f64] {
        &self.rho[layout.cell_range(i)]
    }

    /// Depth-averaged velocity at edge `e`.
    pub fn mean_velocity(&self, layout: &LayerLayout, e: usize) -> f64 {
        layout
            .edge_fractions(e)
            .iter()
            .zip(self.edge_u(layout, e))
            .map(|(l, u)| l * u)
            .sum()
    }

    pub fn check_shape(&self, grid: &Grid, layout: &LayerLayout) -> Result<(), SolverError> {
        let m = grid.n_cells();
        if self.eta.len() != m
            || self.b.len() != m
            || self.u.len() != layout.edge_dofs()
            || self.rho.len() != layout.cell_dofs()
            || layout.n_cells() != m
        {
            return Err(SolverError::Shape(format!(
                "state has eta {}, b {}, u {}, rho {} entries; grid/layout expect {m}, {m}, {}, {}",
                self.eta.len(),
                self.b.len(),
                self.u.len(),
                self.rho.len(),
                layout.edge_dofs(),
                layout.cell_dofs()
            )));
        }
        Ok(())
    }

    pub fn check_depth(&self, h_min: f64) -> Result<(), SolverError> {
        for i in 0..self.eta.len() {
            let h = self.depth(i);
            if !(h >= h_min) {
                return Err(SolverError::Drying { cell: i, depth: h });
            }
        }
        Ok(())
    }

    pub fn check_finite(&self) -> Result<(), SolverError> {
        if !self.eta.iter().all(|v| v.is_finite()) {
            return Err(SolverError::NonFinite("free surface"));
        }
        if !self.u.iter().all(|v| v.is_finite()) {
            return Err(SolverError::NonFinite("velocity"));
        }
        if !self.b.iter().all(|v| v.is_finite()) {
            return Err(SolverError::NonFinite("bed"));
        }
        if !self.rho.iter().all(|v| v.is_finite()) {
            return Err(SolverError::NonFinite("tracer"));
        }
        Ok(())
    }

    /// Water volume per unit width, `sum dx_i h_i`.
    pub fn water_volume(&self, grid: &Grid) -> f64 {
        grid.dx
            .iter()
            .enumerate()
            .map(|(i, dx)| dx * self.depth(i))
            .sum()
    }

    /// `sum dx_i eta_i`.
    pub fn surface_integral(&self, grid: &Grid) -> f64 {
        grid.dx.iter().zip(&self.eta).map(|(dx, e)| dx * e).sum()
    }

    /// `sum dx_i l_{a,i} h_i rho_{a,i}` over all cells and layers.
    pub fn tracer_mass(&self, grid: &Grid, layout: &LayerLayout) -> f64 {
        let mut total = 0.0;
        for i in 0..grid.n_cells() {
            let h = self.depth(i);
            for (l, r) in layout.cell_fractions(i).iter().zip(self.cell_rho(layout, i)) {
                total += grid.dx[i] * l * h * r;
            }
        }
        total
    }
}
