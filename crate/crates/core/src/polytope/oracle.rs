//! Exact linear maximisation oracles.

use rayon::prelude::*;

use super::{PmStrategy, SignAssignment, VertexOracle};
use crate::{Error, Result};

/// Default enumeration budget for both oracles.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Index sets of a PM scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PmShape {
    pub n_x: usize,
    pub n_y: usize,
    pub n_b: usize,
}

impl PmShape {
    pub fn dichotomic(n_x: usize, n_y: usize) -> Self {
        Self { n_x, n_y, n_b: 2 }
    }

    pub fn len(&self) -> usize {
        self.n_x * self.n_y * self.n_b
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn check_budget(base: usize, exp: usize, budget: u64) -> Result<()> {
    let required = (base as f64).powi(exp as i32);
    if required > budget as f64 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}

/// Maximise `sum_{x,y} M[x, y, g(f(x), y)]` over all PM_d strategies.
///
/// Message assignments `f` are enumerated as restricted growth strings (the
/// lexicographically smallest member of each relabelling class), and for a
/// fixed `f` the best decoder picks, per `(a, y)`, the outcome with the
/// largest accumulated coefficient. Ties go to the lowest outcome and then to
/// the lexicographically first `f`. Unused messages decode to outcome 0.
pub fn pm_lmo(m: &[f64], d: usize, shape: PmShape, budget: u64) -> Result<(PmStrategy, f64)> {
    if m.len() != shape.len() {
        return Err(Error::Shape(format!("coefficients have {} entries, scenario needs {}", m.len(), shape.len())));
    }
    if d == 0 || shape.n_b == 0 {
        return Err(Error::Shape("message and outcome alphabets must be nonempty".into()));
    }
    let labels = d.min(shape.n_x.max(1));
    check_budget(labels, shape.n_x, budget)?;

    let (best_f, best_used, best_value) = if (labels as f64).powi(shape.n_x as i32) < PARALLEL_THRESHOLD {
        let mut search = RgsSearch::new(m, labels, shape);
        search.run(0, 0);
        (search.best_f, search.best_used, search.best_value)
    } else {
        // Subtrees below lexicographically ordered prefixes, reduced in that
        // order with a strict comparison: same winner as the sequential walk.
        let depth = prefix_depth(labels, shape.n_x);
        let prefixes = rgs_prefixes(depth, labels);
        let results: Vec<(Vec<usize>, usize, f64)> = prefixes
            .par_iter()
            .map(|prefix| {
                let mut search = RgsSearch::new(m, labels, shape);
                let used = search.seed(prefix);
                search.run(prefix.len(), used);
                (search.best_f, search.best_used, search.best_value)
            })
            .collect();
        let mut best = (vec![0; shape.n_x], 0, f64::NEG_INFINITY);
        for r in results {
            if r.2 > best.2 {
                best = r;
            }
        }
        best
    };

    // Rebuild the decoder from scratch for the winning assignment.
    let block = shape.n_y * shape.n_b;
    let mut acc = vec![0.0; d * block];
    for (x, &a) in best_f.iter().enumerate() {
        for k in 0..block {
            acc[a * block + k] += m[x * block + k];
        }
    }
    let g = (0..d)
        .map(|a| {
            (0..shape.n_y)
                .map(|y| if a < best_used { argmax(&acc[a * block + y * shape.n_b..][..shape.n_b]) } else { 0 })
                .collect()
        })
        .collect();
    Ok((PmStrategy { f: best_f, g }, best_value))
}

/// Searches smaller than this (in `labels^n_x`) stay on one thread.
const PARALLEL_THRESHOLD: f64 = 65_536.0;

/// Shallowest prefix depth giving at least 256 subtrees (or the full depth).
fn prefix_depth(labels: usize, n_x: usize) -> usize {
    let mut depth = 0;
    while depth < n_x && rgs_prefixes(depth, labels).len() < 256 {
        depth += 1;
    }
    depth
}

/// All restricted growth strings of length `len` over `labels` symbols, in lexicographic order.
fn rgs_prefixes(len: usize, labels: usize) -> Vec<Vec<usize>> {
    let mut out = vec![(Vec::new(), 0usize)];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * 2);
        for (p, used) in out {
            for a in 0..(used + 1).min(labels) {
                let mut q = p.clone();
                q.push(a);
                next.push((q, used.max(a + 1)));
            }
        }
        out = next;
    }
    out.into_iter().map(|(p, _)| p).collect()
}

struct RgsSearch<'a> {
    m: &'a [f64],
    labels: usize,
    shape: PmShape,
    // One accumulator block per depth: levels[x] holds the sums after assigning 0..x.
    levels: Vec<Vec<f64>>,
    f: Vec<usize>,
    best_f: Vec<usize>,
    best_used: usize,
    best_value: f64,
}

impl<'a> RgsSearch<'a> {
    fn new(m: &'a [f64], labels: usize, shape: PmShape) -> Self {
        let width = labels * shape.n_y * shape.n_b;
        Self {
            m,
            labels,
            shape,
            levels: vec![vec![0.0; width]; shape.n_x + 1],
            f: vec![0; shape.n_x],
            best_f: vec![0; shape.n_x],
            best_used: 0,
            best_value: f64::NEG_INFINITY,
        }
    }

    /// Fix the first messages; returns how many labels they use.
    fn seed(&mut self, prefix: &[usize]) -> usize {
        let mut used = 0;
        for (x, &a) in prefix.iter().enumerate() {
            self.push(x, a);
            used = used.max(a + 1);
        }
        used
    }

    fn push(&mut self, x: usize, a: usize) {
        let block = self.shape.n_y * self.shape.n_b;
        let (head, tail) = self.levels.split_at_mut(x + 1);
        let next = &mut tail[0];
        next.copy_from_slice(&head[x]);
        let row = &self.m[x * block..(x + 1) * block];
        for (slot, c) in next[a * block..(a + 1) * block].iter_mut().zip(row) {
            *slot += c;
        }
        self.f[x] = a;
    }

    fn run(&mut self, x: usize, used: usize) {
        let PmShape { n_x, n_y, n_b } = self.shape;
        let block = n_y * n_b;
        if x == n_x {
            let acc = &self.levels[n_x];
            let mut value = 0.0;
            for chunk in acc[..used * block].chunks(n_b) {
                value += chunk.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            }
            if value > self.best_value {
                self.best_value = value;
                self.best_f.copy_from_slice(&self.f);
                self.best_used = used;
            }
            return;
        }
        let choices = (used + 1).min(self.labels);
        for a in 0..choices {
            self.push(x, a);
            self.run(x + 1, used.max(a + 1));
        }
    }
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in xs.iter().enumerate().skip(1) {
        if v > xs[best] {
            best = i;
        }
    }
    best
}

/// Maximise `sum_{x,y} M_xy alpha_x beta_y` over sign vectors.
///
/// Signs on the smaller side are enumerated (the first sign fixed to `+1`,
/// which loses nothing by the global sign symmetry); the other side is set
/// to the sign of its aggregated coefficient, ties to `+1`.
pub fn bell_lmo(m: &[f64], rows: usize, cols: usize, budget: u64) -> Result<(SignAssignment, f64)> {
    if m.len() != rows * cols || rows == 0 || cols == 0 {
        return Err(Error::Shape(format!("{} coefficients for a {rows}x{cols} table", m.len())));
    }
    let transpose = rows > cols;
    let (outer, inner) = if transpose { (cols, rows) } else { (rows, cols) };
    check_budget(2, outer, budget)?;
    let coef = |o: usize, i: usize| if transpose { m[i * cols + o] } else { m[o * cols + i] };

    let value_of = |mask: u64, agg: &mut [f64]| -> f64 {
        agg.iter_mut().for_each(|a| *a = 0.0);
        for o in 0..outer {
            let sign = if o > 0 && mask >> (o - 1) & 1 == 1 { -1.0 } else { 1.0 };
            for (i, slot) in agg.iter_mut().enumerate() {
                *slot += sign * coef(o, i);
            }
        }
        agg.iter().map(|a| a.abs()).sum()
    };
    let best_in = |range: std::ops::Range<u64>| -> (u64, f64) {
        let mut agg = vec![0.0; inner];
        let mut best = (range.start, f64::NEG_INFINITY);
        for mask in range {
            let value = value_of(mask, &mut agg);
            if value > best.1 {
                best = (mask, value);
            }
        }
        best
    };
    let masks = 1_u64 << (outer - 1);
    let (best_mask, _) = if (masks as f64) < PARALLEL_THRESHOLD {
        best_in(0..masks)
    } else {
        // Contiguous chunks reduced in mask order keep the first maximum.
        let chunk = masks / 256;
        let results: Vec<(u64, f64)> =
            (0..256).into_par_iter().map(|k| best_in(k * chunk..(k + 1) * chunk)).collect();
        results.into_iter().fold((0, f64::NEG_INFINITY), |b, r| if r.1 > b.1 { r } else { b })
    };

    let outer_signs: Vec<i8> = (0..outer)
        .map(|o| if o > 0 && best_mask >> (o - 1) & 1 == 1 { -1 } else { 1 })
        .collect();
    let inner_signs: Vec<i8> = (0..inner)
        .map(|i| {
            let s: f64 = (0..outer).map(|o| f64::from(outer_signs[o]) * coef(o, i)).sum();
            if s < 0.0 {
                -1
            } else {
                1
            }
        })
        .collect();
    let (alpha, beta) = if transpose { (inner_signs, outer_signs) } else { (outer_signs, inner_signs) };
    let assignment = SignAssignment { alpha, beta };
    // Report the value of the returned assignment itself.
    let value = super::dot(m, &assignment.embed());
    Ok((assignment, value))
}

/// Oracle over the PM_d polytope of a fixed scenario.
#[derive(Debug, Clone, Copy)]
pub struct PmOracle {
    pub d: usize,
    pub shape: PmShape,
    pub budget: u64,
}

impl PmOracle {
    pub fn new(d: usize, shape: PmShape) -> Self {
        Self { d, shape, budget: DEFAULT_BUDGET }
    }
}

impl VertexOracle for PmOracle {
    type Vertex = PmStrategy;

    fn dim(&self) -> usize {
        self.shape.len()
    }

    fn maximize(&self, direction: &[f64]) -> Result<(PmStrategy, f64)> {
        pm_lmo(direction, self.d, self.shape, self.budget)
    }

    fn embed(&self, vertex: &PmStrategy) -> Vec<f64> {
        vertex.embed(self.shape.n_b)
    }
}

/// Oracle over the Bell-local full-correlator polytope.
#[derive(Debug, Clone, Copy)]
pub struct BellOracle {
    pub rows: usize,
    pub cols: usize,
    pub budget: u64,
}

impl BellOracle {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols, budget: DEFAULT_BUDGET }
    }
}

impl VertexOracle for BellOracle {
    type Vertex = SignAssignment;

    fn dim(&self) -> usize {
        self.rows * self.cols
    }

    fn maximize(&self, direction: &[f64]) -> Result<(SignAssignment, f64)> {
        bell_lmo(direction, self.rows, self.cols, self.budget)
    }

    fn embed(&self, vertex: &SignAssignment) -> Vec<f64> {
        vertex.embed()
    }
}

/// Every distinct PM_d vertex of a small scenario (for explicit-vertex solvers).
pub fn enumerate_pm_vertices(d: usize, shape: PmShape) -> Vec<Vec<f64>> {
    let PmShape { n_x, n_y, n_b } = shape;
    let mut seen = std::collections::BTreeSet::new();
    let mut f = vec![0usize; n_x];
    loop {
        let mut g = vec![0usize; d * n_y];
        loop {
            let mut v = vec![0u8; n_x * n_y * n_b];
            for (x, &a) in f.iter().enumerate() {
                for y in 0..n_y {
                    v[(x * n_y + y) * n_b + g[a * n_y + y]] = 1;
                }
            }
            seen.insert(v);
            if !increment(&mut g, n_b) {
                break;
            }
        }
        if !increment(&mut f, d) {
            break;
        }
    }
    seen.into_iter().map(|v| v.into_iter().map(f64::from).collect()).collect()
}

/// Odometer increment in base `base`; false once it wraps around.
fn increment(digits: &mut [usize], base: usize) -> bool {
    for digit in digits.iter_mut() {
        *digit += 1;
        if *digit < base {
            return true;
        }
        *digit = 0;
    }
    false
}
