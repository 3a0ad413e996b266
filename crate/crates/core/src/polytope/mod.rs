//! Membership in the classical polytopes.
//!
//! Two point spaces are handled:
//!
//! - PM_d: full probability arrays `p(b|x,y)` flattened as `(x, y, b)`; the
//!   extremal points are deterministic strategies `x -> a`, `(a, y) -> b`.
//! - Bell-local full correlators: `C_xy` flattened row-major; the extremal
//!   points are sign products `alpha_x beta_y`.
//!
//! [`fw_membership`] decides membership with a fully-corrective Frank-Wolfe
//! loop driven by an exact linear maximisation oracle, and emits either a
//! sparse convex decomposition or a separating witness. [`brute_force_membership`]
//! is an independent reference for small explicit vertex lists.

mod fw;
mod oracle;
mod simplex;

use serde::{Deserialize, Serialize};

pub use fw::{fw_membership, FwOptions, FwStats};
pub use oracle::{
    bell_lmo, enumerate_pm_vertices, pm_lmo, BellOracle, PmOracle, PmShape, DEFAULT_BUDGET,
};
pub use simplex::{brute_force_membership, MAX_BRUTE_FORCE_VERTICES};

use crate::Result;

/// Linear maximisation over the vertices of a polytope.
pub trait VertexOracle {
    type Vertex: Clone;

    /// Dimension of the ambient point space.
    fn dim(&self) -> usize;

    /// Vertex maximising `<direction, v>` together with the maximum.
    fn maximize(&self, direction: &[f64]) -> Result<(Self::Vertex, f64)>;

    /// Coordinates of a vertex in the point space.
    fn embed(&self, vertex: &Self::Vertex) -> Vec<f64>;
}

/// Deterministic PM_d strategy: `f: x -> a`, `g: (a, y) -> b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PmStrategy {
    pub f: Vec<usize>,
    /// `g[a][y]`.
    pub g: Vec<Vec<usize>>,
}

impl PmStrategy {
    /// Vertex vector `v[x, y, b] = [g(f(x), y) = b]`.
    pub fn embed(&self, n_b: usize) -> Vec<f64> {
        let n_y = self.g.first().map_or(0, Vec::len);
        let mut v = vec![0.0; self.f.len() * n_y * n_b];
        for (x, &a) in self.f.iter().enumerate() {
            for y in 0..n_y {
                v[(x * n_y + y) * n_b + self.g[a][y]] = 1.0;
            }
        }
        v
    }
}

/// Deterministic local correlator strategy, `V_xy = alpha_x beta_y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignAssignment {
    pub alpha: Vec<i8>,
    pub beta: Vec<i8>,
}

impl SignAssignment {
    pub fn embed(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.alpha.len() * self.beta.len());
        for &a in &self.alpha {
            for &b in &self.beta {
                v.push(f64::from(a * b));
            }
        }
        v
    }
}

/// Separating hyperplane `<M, point> = Q > L = max_v <M, v>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(rename = "M")]
    pub m: Vec<f64>,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "Q")]
    pub q: f64,
}

impl Witness {
    pub fn gap(&self) -> f64 {
        self.q - self.l
    }

    /// Recompute `Q` and `L` from scratch; returns the larger deviation from the stored values.
    pub fn reverify<O: VertexOracle>(&self, point: &[f64], oracle: &O) -> Result<f64> {
        let (_, l) = oracle.maximize(&self.m)?;
        let q = dot(&self.m, point);
        Ok((l - self.l).abs().max((q - self.q).abs()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum MembershipVerdict<V> {
    Inside {
        vertices: Vec<V>,
        weights: Vec<f64>,
        reconstruction_error: f64,
    },
    Outside {
        witness: Witness,
    },
    /// Neither certificate could be produced; the distance to the polytope is bracketed.
    Undecided {
        distance_lower: f64,
        distance_upper: f64,
    },
}

impl<V> MembershipVerdict<V> {
    pub fn is_inside(&self) -> bool {
        matches!(self, Self::Inside { .. })
    }

    pub fn is_outside(&self) -> bool {
        matches!(self, Self::Outside { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Self::Outside { witness } => Some(witness),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Inside { .. } => "inside",
            Self::Outside { .. } => "outside",
            Self::Undecided { .. } => "undecided",
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
