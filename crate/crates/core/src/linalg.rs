//! Tridiagonal systems for the vertical momentum columns and the free surface.

use crate::error::SolverError;
use crate::mesh::{Grid, LayerLayout};
use crate::operators::momentum::FrozenCoefficients;

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    /// Sub-diagonal; `lower[0]` is unused.
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    /// Super-diagonal; `upper[n - 1]` is unused.
    pub upper: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
            rhs: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `A x` for the stored bands.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|k| {
                let mut v = self.diag[k] * x[k];
                if k > 0 {
                    v += self.lower[k] * x[k - 1];
                }
                if k + 1 < n {
                    v += self.upper[k] * x[k + 1];
                }
                v
            })
            .collect()
    }

    /// `max_k |(A x - rhs)_k|`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.apply(x)
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn solve(&self) -> Result<Vec<f64>, SolverError> {
        let mut x = self.rhs.clone();
        self.solve_many(&mut [&mut x])?;
        Ok(x)
    }

    /// Solves `A x = b` for every right-hand side in place, with a single
    /// elimination pass.
    pub fn solve_many(&self, rhs: &mut [&mut [f64]]) -> Result<(), SolverError> {
        let n = self.len();
        if n == 0 {
            return Ok(());
        }
        let mut cp = vec![0.0; n];
        let mut inv = vec![0.0; n];
        for k in 0..n {
            let pivot = if k == 0 {
                self.diag[0]
            } else {
                self.diag[k] - self.lower[k] * cp[k - 1]
            };
            let scale = self.diag[k].abs() + self.lower[k].abs() + self.upper[k].abs();
            if !(pivot.abs() > 1e-14 * scale) || !pivot.is_finite() {
                return Err(SolverError::Singular { row: k, pivot });
            }
            inv[k] = 1.0 / pivot;
            cp[k] = if k + 1 < n { self.upper[k] * inv[k] } else { 0.0 };
        }
        for b in rhs.iter_mut() {
            b[0] *= inv[0];
            for k in 1..n {
                b[k] = (b[k] - self.lower[k] * b[k - 1]) * inv[k];
            }
            for k in (0..n - 1).rev() {
                b[k] -= cp[k] * b[k + 1];
            }
        }
        Ok(())
    }
}

/// Solves the system by the Thomas algorithm.
pub fn thomas_solve(sys: &TridiagonalSystem) -> Result<Vec<f64>, SolverError> {
    sys.solve()
}

/// Vertical momentum matrix of edge `e` (rows rescaled by `l h`) for implicit
/// weight `w` (the implicit coefficient times the step).
pub fn assemble_vertical_matrix(
    layout: &LayerLayout,
    coeffs: &FrozenCoefficients,
    e: usize,
    w: f64,
) -> TridiagonalSystem {
    let l = layout.edge_fractions(e);
    let n = l.len();
    let h = coeffs.h_edge[e];
    let c = &coeffs.coupling[layout.edge_range(e)];
    let mut sys = TridiagonalSystem::zeros(n);
    for k in 0..n {
        let mut d = l[k] * h;
        if k + 1 < n {
            d += w * c[k];
            sys.upper[k] = -w * c[k];
        }
        if k > 0 {
            d += w * c[k - 1];
            sys.lower[k] = -w * c[k - 1];
        }
        if k == 0 {
            d += w * coeffs.friction[e];
        }
        if k == n - 1 {
            d += w * coeffs.wind[e];
        }
        sys.diag[k] = d;
    }
    sys
}

/// Reduced column quantities of an interior edge: `T = H^T A^-1 H` and
/// `S = H^T A^-1 R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeReduction {
    pub t: f64,
    pub s: f64,
}

/// Free-surface system
/// `dx_i eta_i + w^2 g [T_R (eta_i - eta_{i+1}) / dx_R + T_L (eta_i - eta_{i-1}) / dx_L]
///  = explicit_i - w (S_R - S_L)`.
///
/// `reductions` holds one entry per edge; boundary edges must carry `t = 0`
/// and their prescribed (already time-weighted) flux in `s`. Cells listed in
/// `dirichlet` get an identity row and their coupling is moved to the
/// neighbour's right-hand side, which keeps the matrix symmetric.
pub fn assemble_free_surface_system(
    grid: &Grid,
    reductions: &[EdgeReduction],
    explicit: &[f64],
    w: f64,
    g: f64,
    dirichlet: &[Option<(usize, f64)>],
) -> TridiagonalSystem {
    let m = grid.n_cells();
    let mut sys = TridiagonalSystem::zeros(m);
    let k: Vec<f64> = (0..=m)
        .map(|e| w * w * g * reductions[e].t / grid.dx_edge[e])
        .collect();
    for i in 0..m {
        sys.diag[i] = grid.dx[i] + k[i] + k[i + 1];
        if i > 0 {
            sys.lower[i] = -k[i];
        }
        if i + 1 < m {
            sys.upper[i] = -k[i + 1];
        }
        sys.rhs[i] = explicit[i] - w * (reductions[i + 1].s - reductions[i].s);
    }
    for &(cell, value) in dirichlet.iter().flatten() {
        sys.diag[cell] = 1.0;
        sys.rhs[cell] = value;
        if cell > 0 {
            sys.rhs[cell - 1] -= sys.upper[cell - 1] * value;
            sys.upper[cell - 1] = 0.0;
            sys.lower[cell] = 0.0;
        }
        if cell + 1 < m {
            sys.rhs[cell + 1] -= sys.lower[cell + 1] * value;
            sys.lower[cell + 1] = 0.0;
            sys.upper[cell] = 0.0;
        }
    }
    sys
}
