//! Dense phase-1 simplex on an explicit vertex list.
//!
//! Feasibility of `{V w = point, 1^T w = 1, w >= 0}` with Bland's rule.
//! Infeasibility is certified by the phase-1 dual: `y` with `y^T [v; 1] <= 0`
//! for every vertex and `y^T [point; 1] > 0`.

use super::{dot, norm, MembershipVerdict, Witness};
use crate::{Error, Result};

pub const MAX_BRUTE_FORCE_VERTICES: usize = 10_000;

const PIVOT_TOL: f64 = 1e-12;
const FEAS_TOL: f64 = 1e-9;

/// Exact membership of `point` in the hull of `vertices`; vertices are reported by index.
pub fn brute_force_membership(point: &[f64], vertices: &[Vec<f64>]) -> Result<MembershipVerdict<usize>> {
    let n_v = vertices.len();
    if n_v == 0 || n_v > MAX_BRUTE_FORCE_VERTICES {
        return Err(Error::BudgetExceeded { required: n_v as f64, budget: MAX_BRUTE_FORCE_VERTICES as u64 });
    }
    let dim = point.len();
    if vertices.iter().any(|v| v.len() != dim) {
        return Err(Error::Shape("vertex and point dimensions differ".into()));
    }

    // Rows: one per coordinate plus the weight-sum row. Columns: vertices, then artificials.
    let rows = dim + 1;
    let cols = n_v + rows;
    let mut sign = vec![1.0; rows];
    let mut tab = vec![vec![0.0; cols + 1]; rows];
    for r in 0..rows {
        let rhs = if r < dim { point[r] } else { 1.0 };
        sign[r] = if rhs < 0.0 { -1.0 } else { 1.0 };
        for (j, v) in vertices.iter().enumerate() {
            tab[r][j] = sign[r] * if r < dim { v[r] } else { 1.0 };
        }
        tab[r][n_v + r] = 1.0;
        tab[r][cols] = sign[r] * rhs;
    }
    let mut basis: Vec<usize> = (n_v..cols).collect();

    // Reduced costs of the phase-1 objective `min sum(artificials)`.
    let mut reduced = vec![0.0; cols + 1];
    for j in 0..n_v {
        reduced[j] = -(0..rows).map(|r| tab[r][j]).sum::<f64>();
    }
    reduced[cols] = -(0..rows).map(|r| tab[r][cols]).sum::<f64>();

    while let Some(enter) = (0..cols).find(|&j| reduced[j] < -PIVOT_TOL) {
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for r in 0..rows {
            let a = tab[r][enter];
            if a > PIVOT_TOL {
                let ratio = tab[r][cols] / a;
                let better = match leave {
                    None => true,
                    Some(l) => ratio < best_ratio - 1e-15 || (ratio <= best_ratio + 1e-15 && basis[r] < basis[l]),
                };
                if better {
                    best_ratio = ratio;
                    leave = Some(r);
                }
            }
        }
        let Some(pr) = leave else {
            return Err(Error::Internal("phase-1 simplex is unbounded".into()));
        };
        let piv = tab[pr][enter];
        tab[pr].iter_mut().for_each(|v| *v /= piv);
        let pivot_row = tab[pr].clone();
        for (r, row) in tab.iter_mut().enumerate() {
            if r != pr {
                let f = row[enter];
                if f != 0.0 {
                    row.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= f * p);
                }
            }
        }
        let f = reduced[enter];
        reduced.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= f * p);
        basis[pr] = enter;
    }

    let infeasibility = -reduced[cols];
    if infeasibility <= FEAS_TOL {
        let mut weights = vec![0.0; n_v];
        for (r, &b) in basis.iter().enumerate() {
            if b < n_v {
                weights[b] = tab[r][cols].max(0.0);
            }
        }
        let total: f64 = weights.iter().sum();
        let mut recon = vec![0.0; dim];
        for (w, v) in weights.iter().zip(vertices) {
            recon.iter_mut().zip(v).for_each(|(r, c)| *r += w / total * c);
        }
        let reconstruction_error = norm(&recon.iter().zip(point).map(|(a, b)| a - b).collect::<Vec<_>>());
        let (vertices, weights): (Vec<usize>, Vec<f64>) =
            weights.iter().enumerate().filter(|(_, &w)| w > 0.0).map(|(i, &w)| (i, w / total)).unzip();
        return Ok(MembershipVerdict::Inside { vertices, weights, reconstruction_error });
    }

    // Dual of the (sign-flipped) rows from the artificial reduced costs.
    let y: Vec<f64> = (0..rows).map(|r| sign[r] * (1.0 - reduced[n_v + r])).collect();
    let scale = norm(&y[..dim]);
    if scale == 0.0 {
        return Err(Error::Internal("degenerate infeasibility certificate".into()));
    }
    let m: Vec<f64> = y[..dim].iter().map(|v| v / scale).collect();
    let l = vertices.iter().map(|v| dot(&m, v)).fold(f64::NEG_INFINITY, f64::max);
    let q = dot(&m, point);
    Ok(MembershipVerdict::Outside { witness: Witness { m, l, q } })
}
