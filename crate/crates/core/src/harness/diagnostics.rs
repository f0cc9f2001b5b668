use serde::{Deserialize, Serialize};

use crate::error::SolverError;
use crate::mesh::{Grid, LayerLayout};
use crate::state::State;

/// Relative errors of a solution against a reference on the same grid.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorReport {
    pub eta_l2: f64,
    pub eta_linf: f64,
    pub u_l2: f64,
    pub u_linf: f64,
    pub b_l2: f64,
    pub b_linf: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Cell-weighted relative l2 and max-norm errors.
fn cell_errors(dx: &[f64], sol: &[f64], reference: &[f64]) -> (f64, f64) {
    let (mut num, mut den, mut max_d, mut max_r) = (0.0, 0.0, 0.0f64, 0.0f64);
    for ((d, s), r) in dx.iter().zip(sol).zip(reference) {
        num += d * (s - r).powi(2);
        den += d * r * r;
        max_d = max_d.max((s - r).abs());
        max_r = max_r.max(r.abs());
    }
    (ratio(num.sqrt(), den.sqrt()), ratio(max_d, max_r))
}

/// Velocity errors pair edge `i + 1` with cell `i` and weight each layer by
/// `dx_i l h_i` of the reference.
pub fn compute_errors(
    grid: &Grid,
    layout: &LayerLayout,
    solution: &State,
    reference: &State,
) -> Result<ErrorReport, SolverError> {
    solution.check_shape(grid, layout)?;
    reference.check_shape(grid, layout)?;
    let (eta_l2, eta_linf) = cell_errors(&grid.dx, &solution.eta, &reference.eta);
    let (b_l2, b_linf) = cell_errors(&grid.dx, &solution.b, &reference.b);
    let h = reference.depths();
    let (mut num, mut den, mut max_d, mut max_r) = (0.0, 0.0, 0.0f64, 0.0f64);
    for i in 0..grid.n_cells() {
        let e = i + 1;
        let l = layout.edge_fractions(e);
        let us = solution.edge_u(layout, e);
        let ur = reference.edge_u(layout, e);
        for k in 0..l.len() {
            let w = grid.dx[i] * l[k] * h[i];
            num += w * (us[k] - ur[k]).powi(2);
            den += w * ur[k] * ur[k];
            max_d = max_d.max((us[k] - ur[k]).abs());
            max_r = max_r.max(ur[k].abs());
        }
    }
    Ok(ErrorReport {
        eta_l2,
        eta_linf,
        u_l2: ratio(num.sqrt(), den.sqrt()),
        u_linf: ratio(max_d, max_r),
        b_l2,
        b_linf,
    })
}

/// Least-squares slope of `log(err)` against `log(dt)`.
pub fn convergence_order(dts: &[f64], errors: &[f64]) -> f64 {
    let n = dts.len().min(errors.len()) as f64;
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Location of the highest bed point.
pub fn crest_position(grid: &Grid, b: &[f64]) -> f64 {
    let (imax, _) = b
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    grid.centers[imax]
}
