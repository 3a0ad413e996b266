//! Fully-corrective Frank-Wolfe for polytope membership.
//!
//! Minimises `|q - point|^2` over `q` in the convex hull of the oracle's
//! vertices. The active set ("corral") is re-optimised exactly after every
//! oracle call: the affine minimiser of the corral is computed from its Gram
//! matrix and, when it leaves the simplex, a line search back to the boundary
//! drops vertices (minimum-norm-point scheme). Each major iteration adds the
//! vertex returned for the direction `point - q`, so the oracle value gives
//! both the duality gap and a candidate separating hyperplane.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{dot, norm, MembershipVerdict, VertexOracle, Witness};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FwOptions {
    /// Inside when the distance to the hull drops below this.
    pub eps_in: f64,
    /// Outside when the unit-norm witness separates by more than this.
    pub eps_out: f64,
    pub max_iter: usize,
    /// Relative duality-gap tolerance (`gap <= gap_tol * |point - q|^2`).
    pub gap_tol: f64,
}

impl Default for FwOptions {
    fn default() -> Self {
        Self { eps_in: 1e-7, eps_out: 1e-7, max_iter: 20_000, gap_tol: 1e-13 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FwStats {
    pub iterations: usize,
    pub oracle_calls: usize,
    /// Distance from the point to the final iterate.
    pub distance: f64,
}

// Weights at or below this are treated as leaving the simplex.
const MIN_WEIGHT: f64 = 1e-14;

struct Corral<V> {
    vertices: Vec<V>,
    // Shifted coordinates `vertex - point`.
    shifted: Vec<Vec<f64>>,
    gram: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl<V> Corral<V> {
    fn push(&mut self, vertex: V, y: Vec<f64>) {
        let row: Vec<f64> = self.shifted.iter().map(|z| dot(z, &y)).collect();
        for (g, &r) in self.gram.iter_mut().zip(&row) {
            g.push(r);
        }
        let mut row = row;
        row.push(dot(&y, &y));
        self.gram.push(row);
        self.shifted.push(y);
        self.vertices.push(vertex);
        self.weights.push(0.0);
    }

    fn remove(&mut self, i: usize) {
        self.vertices.remove(i);
        self.shifted.remove(i);
        self.weights.remove(i);
        self.gram.remove(i);
        for g in &mut self.gram {
            g.remove(i);
        }
    }

    fn len(&self) -> usize {
        self.weights.len()
    }

    fn iterate(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (w, y) in self.weights.iter().zip(&self.shifted) {
            for (xi, yi) in x.iter_mut().zip(y) {
                *xi += w * yi;
            }
        }
        x
    }

    /// Minimiser of `|sum a_i y_i|` subject to `sum a_i = 1` (no sign constraint).
    fn affine_minimizer(&self) -> Option<Vec<f64>> {
        let k = self.len();
        let mut a = DMatrix::<f64>::zeros(k + 1, k + 1);
        for i in 0..k {
            for j in 0..k {
                a[(i, j)] = self.gram[i][j];
            }
            a[(i, k)] = 1.0;
            a[(k, i)] = 1.0;
        }
        let mut rhs = DVector::<f64>::zeros(k + 1);
        rhs[k] = 1.0;
        let sol = a.lu().solve(&rhs)?;
        let alpha: Vec<f64> = sol.iter().take(k).copied().collect();
        alpha.iter().all(|v| v.is_finite()).then_some(alpha)
    }

    /// Re-optimise weights over the corral. Returns false when the newest
    /// vertex is immediately dropped again (no progress possible).
    fn minor_cycles(&mut self) -> bool {
        let newest = self.len() - 1;
        let mut first = true;
        loop {
            let Some(alpha) = self.affine_minimizer() else {
                return false;
            };
            if alpha.iter().all(|&a| a > MIN_WEIGHT) {
                self.weights = alpha;
                return true;
            }
            // Step from the current weights towards alpha until one weight hits zero.
            let mut theta = f64::INFINITY;
            let mut blocking = None;
            for (i, (&w, &a)) in self.weights.iter().zip(&alpha).enumerate() {
                if a <= MIN_WEIGHT && w > a {
                    let t = w / (w - a);
                    if t < theta {
                        theta = t;
                        blocking = Some(i);
                    }
                }
            }
            let theta = if theta.is_finite() { theta.clamp(0.0, 1.0) } else { 1.0 };
            for (w, &a) in self.weights.iter_mut().zip(&alpha) {
                *w = (1.0 - theta) * *w + theta * a;
            }
            if first && self.weights[newest] <= MIN_WEIGHT {
                return false;
            }
            first = false;
            let mut drop: Vec<usize> = (0..self.len()).filter(|&i| self.weights[i] <= MIN_WEIGHT).collect();
            if drop.is_empty() {
                drop.extend(blocking);
            }
            for &i in drop.iter().rev() {
                self.remove(i);
            }
            if self.len() == 0 {
                return false;
            }
            let total: f64 = self.weights.iter().sum();
            self.weights.iter_mut().for_each(|w| *w /= total);
        }
    }
}

/// Decide whether `point` lies in the convex hull of the oracle's vertices.
///
/// Inside: the final corral, its weights and the reconstruction error
/// (`< eps_in`). Outside: the unit-norm direction `point - q` from the
/// converged iterate, with `L` from a final oracle call and `Q - L > eps_out`.
/// Otherwise Undecided with `Q - L <= distance <= |point - q|`.
pub fn fw_membership<O: VertexOracle>(
    point: &[f64],
    oracle: &O,
    opts: &FwOptions,
) -> Result<(MembershipVerdict<O::Vertex>, FwStats)> {
    let n = oracle.dim();
    if point.len() != n {
        return Err(Error::Shape(format!("point has {} coordinates, oracle expects {n}", point.len())));
    }
    let mut stats = FwStats::default();

    let (v0, _) = oracle.maximize(point)?;
    stats.oracle_calls += 1;
    let mut corral = Corral { vertices: vec![], shifted: vec![], gram: vec![], weights: vec![] };
    let y0 = shift(&oracle.embed(&v0), point);
    corral.push(v0, y0);
    corral.weights[0] = 1.0;

    let mut x = corral.iterate(n);
    while stats.iterations < opts.max_iter {
        stats.iterations += 1;
        let xx = dot(&x, &x);
        if xx.sqrt() < opts.eps_in {
            break;
        }
        let direction: Vec<f64> = x.iter().map(|v| -v).collect();
        let (vertex, _) = oracle.maximize(&direction)?;
        stats.oracle_calls += 1;
        let y = shift(&oracle.embed(&vertex), point);
        let gap = xx - dot(&x, &y);
        if gap <= opts.gap_tol * xx || gap <= 1e-15 * xx.sqrt() * norm(&y) {
            break;
        }
        if corral.shifted.iter().any(|z| z.iter().zip(&y).all(|(a, b)| a == b)) {
            break;
        }
        corral.push(vertex, y);
        if !corral.minor_cycles() {
            let last = corral.len() - 1;
            if corral.weights.get(last).is_some_and(|&w| w <= MIN_WEIGHT) {
                corral.remove(last);
            }
            if corral.len() == 0 {
                return Err(Error::Internal("Frank-Wolfe corral collapsed".into()));
            }
            let total: f64 = corral.weights.iter().sum();
            corral.weights.iter_mut().for_each(|w| *w /= total);
            x = corral.iterate(n);
            break;
        }
        x = corral.iterate(n);
    }

    let distance = norm(&x);
    stats.distance = distance;
    if distance < opts.eps_in {
        let Corral { vertices, weights, .. } = corral;
        let mut recon = vec![0.0; n];
        for (v, w) in vertices.iter().zip(&weights) {
            for (r, c) in recon.iter_mut().zip(oracle.embed(v)) {
                *r += w * c;
            }
        }
        let reconstruction_error = norm(&shift(&recon, point));
        return Ok((MembershipVerdict::Inside { vertices, weights, reconstruction_error }, stats));
    }

    let m: Vec<f64> = x.iter().map(|v| -v / distance).collect();
    let (_, l) = oracle.maximize(&m)?;
    stats.oracle_calls += 1;
    let q = dot(&m, point);
    if q - l > opts.eps_out {
        return Ok((MembershipVerdict::Outside { witness: Witness { m, l, q } }, stats));
    }
    Ok((
        MembershipVerdict::Undecided { distance_lower: (q - l).max(0.0), distance_upper: distance },
        stats,
    ))
}

fn shift(v: &[f64], point: &[f64]) -> Vec<f64> {
    v.iter().zip(point).map(|(a, b)| a - b).collect()
}
