#![allow(dead_code)]

use proptest::prelude::*;

use mlsw_core::linalg::{assemble_free_surface_system, EdgeReduction, TridiagonalSystem};
use mlsw_core::operators::boundary::BoundaryConditions;
use mlsw_core::operators::flux::{edge_depths, layer_fluxes};
use mlsw_core::operators::transfer::surface_transfer_residual;
use mlsw_core::steppers::{rk3_time_step, step_imex_ark2, step_rk3, step_theta};
use mlsw_core::{Grid, LayerLayout, Model, PhysicsParams, Scheme, State};

/// Random basin: bed, layering with at most one refined block, and a
/// free-surface perturbation.
#[derive(Debug, Clone)]
pub struct Basin {
    pub cells: usize,
    pub bed: Vec<f64>,
    pub base: Vec<f64>,
    pub refine: usize,
    pub block: (usize, usize),
    pub bump: f64,
}

fn normalized(w: Vec<f64>) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

pub fn basin() -> impl Strategy<Value = Basin> {
    (6usize..24)
        .prop_flat_map(|m| {
            (
                Just(m),
                prop::collection::vec(-2.0f64..1.0, m),
                prop::collection::vec(0.2f64..1.0, 1..4),
                1usize..4,
                2usize..m - 3,
                2usize..6,
                -0.05f64..0.05,
            )
        })
        .prop_map(|(m, bed, base, refine, lo, width, bump)| Basin {
            cells: m,
            bed,
            base: normalized(base),
            refine,
            block: (lo, (lo + width).min(m - 2)),
            bump,
        })
}

impl Basin {
    pub fn grid(&self) -> Grid {
        Grid::uniform(0.0, 100.0 * self.cells as f64, self.cells).unwrap()
    }

    pub fn layout(&self, grid: &Grid) -> LayerLayout {
        let fine: Vec<f64> = self
            .base
            .iter()
            .flat_map(|&l| std::iter::repeat(l / self.refine as f64).take(self.refine))
            .collect();
        let per_edge = (0..grid.n_edges())
            .map(|e| {
                if e >= self.block.0 && e <= self.block.1 {
                    fine.clone()
                } else {
                    self.base.clone()
                }
            })
            .collect();
        LayerLayout::from_edge_fractions(grid, per_edge).unwrap()
    }

    pub fn model(&self, physics: PhysicsParams) -> Model {
        let grid = self.grid();
        let layout = self.layout(&grid);
        Model::new(grid, layout, physics, BoundaryConditions::closed()).unwrap()
    }

    /// Fluid at rest over the random bed with surface `level` plus a cosine
    /// of amplitude `bump`.
    pub fn state(&self, model: &Model, level: f64, bump: f64) -> State {
        let len = 100.0 * self.cells as f64;
        let eta = model
            .grid
            .centers
            .iter()
            .map(|&x| level + bump * (std::f64::consts::PI * x / len).cos())
            .collect();
        State::at_rest(&model.layout, eta, self.bed.clone())
    }
}

pub const SCHEMES: [Scheme; 3] = [Scheme::Theta, Scheme::Imex, Scheme::Rk3];

/// Advances `state` by `steps` steps of `scheme`; implicit schemes take 60 s
/// steps, the explicit one runs at celerity Courant number 0.5.
pub fn advance(model: &Model, state: &State, scheme: Scheme, steps: usize) -> State {
    advance_with(model, state, scheme, steps, 60.0)
}

pub fn advance_with(model: &Model, state: &State, scheme: Scheme, steps: usize, dt: f64) -> State {
    let mut s = state.clone();
    for _ in 0..steps {
        s = match scheme {
            Scheme::Theta => step_theta(model, &s, 0.55, dt),
            Scheme::Imex => step_imex_ark2(model, &s, dt),
            Scheme::Rk3 => {
                let dt = rk3_time_step(model, &s, 0.5).min(dt);
                step_rk3(model, &s, dt)
            }
        }
        .unwrap()
        .0;
    }
    s
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Largest change of the surface and largest velocity after `steps` steps
/// from rest with a flat surface and no wind.
pub fn rest_state_deviation(b: &Basin, scheme: Scheme, steps: usize) -> f64 {
    let model = b.model(PhysicsParams {
        cw: 0.0,
        ..PhysicsParams::default()
    });
    let s0 = b.state(&model, 3.0, 0.0);
    let s = advance(&model, &s0, scheme, steps);
    max_diff(&s.eta, &s0.eta).max(max_abs(&s.u))
}

/// Relative change of the water volume in a closed basin.
pub fn closed_basin_mass_drift(b: &Basin, scheme: Scheme, steps: usize) -> f64 {
    let model = b.model(PhysicsParams::default());
    let s0 = b.state(&model, 3.0, b.bump);
    let s = advance(&model, &s0, scheme, steps);
    let v0: f64 = s0.eta.iter().zip(&model.grid.dx).map(|(e, d)| e * d).sum();
    let v1: f64 = s.eta.iter().zip(&model.grid.dx).map(|(e, d)| e * d).sum();
    (v1 - v0).abs() / v0.abs()
}

/// Largest departure of a unit tracer from one after `steps` steps of a
/// sloshing basin.
pub fn unit_tracer_deviation(b: &Basin, scheme: Scheme, steps: usize) -> f64 {
    let model = b.model(PhysicsParams::default());
    let s0 = b.state(&model, 3.0, b.bump);
    let s = advance(&model, &s0, scheme, steps);
    s.rho.iter().fold(0.0f64, |a, r| a.max((r - 1.0).abs()))
}

/// Largest surface closure of the centre mass transfer for a random flow.
pub fn surface_transfer_defect(b: &Basin, velocities: &[f64]) -> f64 {
    let model = b.model(PhysicsParams::default());
    let mut s = b.state(&model, 3.0, b.bump);
    for (k, u) in s.u.iter_mut().enumerate() {
        *u = velocities[k % velocities.len()];
    }
    let h = edge_depths(&s, &model.layout);
    let flux = layer_fluxes(&model.layout, &h, &s.u, &model.bc, 0.0);
    (0..model.grid.n_cells())
        .map(|i| surface_transfer_residual(&model.grid, &model.layout, &flux, i).abs())
        .fold(0.0, f64::max)
}

/// Largest asymmetry of the assembled free-surface matrix.
pub fn free_surface_asymmetry(t: &[f64], dirichlet_left: bool, dirichlet_right: bool) -> f64 {
    let m = t.len() - 1;
    let grid = Grid::uniform(0.0, 10.0 * m as f64, m).unwrap();
    let red: Vec<EdgeReduction> = t
        .iter()
        .enumerate()
        .map(|(e, &t)| EdgeReduction {
            t: if e == 0 || e == m { 0.0 } else { t },
            s: 0.1 * e as f64,
        })
        .collect();
    let dir = [
        dirichlet_left.then_some((0, 1.0)),
        dirichlet_right.then_some((m - 1, 2.0)),
    ];
    let sys = assemble_free_surface_system(&grid, &red, &vec![1.0; m], 30.0, 9.81, &dir);
    (0..m - 1)
        .map(|i| (sys.upper[i] - sys.lower[i + 1]).abs())
        .fold(0.0, f64::max)
}

/// Gaussian elimination with partial pivoting on the dense form.
pub fn dense_solve(sys: &TridiagonalSystem) -> Vec<f64> {
    let n = sys.len();
    let mut a = vec![vec![0.0; n + 1]; n];
    for k in 0..n {
        a[k][k] = sys.diag[k];
        if k > 0 {
            a[k][k - 1] = sys.lower[k];
        }
        if k + 1 < n {
            a[k][k + 1] = sys.upper[k];
        }
        a[k][n] = sys.rhs[k];
    }
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..=n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (a[r][n] - s) / a[r][r];
    }
    x
}

/// Diagonally dominant random tridiagonal system.
pub fn tridiagonal(n: usize) -> impl Strategy<Value = TridiagonalSystem> {
    (
        prop::collection::vec(-1.0f64..1.0, n),
        prop::collection::vec(-1.0f64..1.0, n),
        prop::collection::vec(0.1f64..2.0, n),
        prop::collection::vec(-10.0f64..10.0, n),
    )
        .prop_map(move |(lower, upper, extra, rhs)| {
            let mut sys = TridiagonalSystem::zeros(n);
            for k in 0..n {
                sys.lower[k] = if k > 0 { lower[k] } else { 0.0 };
                sys.upper[k] = if k + 1 < n { upper[k] } else { 0.0 };
                sys.diag[k] = sys.lower[k].abs() + sys.upper[k].abs() + extra[k];
                sys.rhs[k] = rhs[k];
            }
            sys
        })
}

/// Overshoot of a random tracer field beyond its initial range, and the
/// relative change of its total mass, after `steps` steps of length `dt` of a
/// sloshing basin.
pub fn tracer_bounds_and_mass(b: &Basin, rho: &[f64], scheme: Scheme, steps: usize, dt: f64) -> (f64, f64) {
    let model = b.model(PhysicsParams::default());
    let mut s0 = b.state(&model, 3.0, b.bump);
    for (k, r) in s0.rho.iter_mut().enumerate() {
        *r = rho[k % rho.len()];
    }
    let s = advance_with(&model, &s0, scheme, steps, dt);
    let lo = s0.rho.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = s0.rho.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let overshoot = s.rho.iter().fold(0.0f64, |a, &r| a.max(lo - r).max(r - hi));
    let m0 = s0.tracer_mass(&model.grid, &model.layout);
    let m1 = s.tracer_mass(&model.grid, &model.layout);
    (overshoot, (m1 - m0).abs() / m0.abs())
}
