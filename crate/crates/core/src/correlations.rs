//! Behaviour tables `p(b|x,y)` / `p(a,b|x,y)` and their correlator reductions.

use serde::{Deserialize, Serialize};

use crate::qcore::{born_bell_phi_plus, born_pm, transpose, Assemblage, Ensemble, QubitOperator, IDENTITY_TOL};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BehaviorKind {
    Pm,
    Bell,
}

/// Dense conditional probability table.
///
/// PM tables have shape `[n_x, n_y, n_b]` and index `(x, y, b)`; Bell tables
/// have shape `[n_x, n_y, n_a, n_b]` and index `(x, y, a, b)`. Data is row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorTable {
    pub kind: BehaviorKind,
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl BehaviorTable {
    pub fn new(kind: BehaviorKind, shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let t = Self { kind, shape, data };
        t.check()?;
        Ok(t)
    }

    /// Shape, length, nonnegativity and per-cell normalisation.
    pub fn check(&self) -> Result<()> {
        let rank = match self.kind {
            BehaviorKind::Pm => 3,
            BehaviorKind::Bell => 4,
        };
        if self.shape.len() != rank {
            return Err(Error::Shape(format!("{:?} table needs rank {rank}, got {:?}", self.kind, self.shape)));
        }
        let len: usize = self.shape.iter().product();
        if len != self.data.len() || len == 0 {
            return Err(Error::Shape(format!("shape {:?} vs {} entries", self.shape, self.data.len())));
        }
        let cell = self.outcomes_per_cell();
        for (c, chunk) in self.data.chunks(cell).enumerate() {
            if chunk.iter().any(|p| !p.is_finite() || *p < -IDENTITY_TOL) {
                return Err(Error::Shape(format!("negative or non-finite probability in cell {c}")));
            }
            let total: f64 = chunk.iter().sum();
            if (total - 1.0).abs() > IDENTITY_TOL {
                return Err(Error::Shape(format!("cell {c} sums to {total}")));
            }
        }
        Ok(())
    }

    pub fn n_x(&self) -> usize {
        self.shape[0]
    }

    pub fn n_y(&self) -> usize {
        self.shape[1]
    }

    fn outcomes_per_cell(&self) -> usize {
        self.shape[2..].iter().product()
    }

    fn is_dichotomic(&self) -> bool {
        self.shape[2..].iter().all(|&n| n == 2)
    }

    /// `p(b|x,y)` of a PM table.
    pub fn pm(&self, x: usize, y: usize, b: usize) -> f64 {
        let nb = self.shape[2];
        self.data[(x * self.n_y() + y) * nb + b]
    }

    /// `p(a,b|x,y)` of a dichotomic Bell table.
    pub fn bell(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.data[(x * self.n_y() + y) * 4 + 2 * a + b]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelatorKind {
    /// `P_xy = p(0|x,y) - p(1|x,y)`.
    Single,
    /// `C_xy = p(a = b|x,y) - p(a != b|x,y)`.
    Full,
}

/// Matrix of correlators indexed `(x, y)`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorTable {
    pub kind: CorrelatorKind,
    pub shape: [usize; 2],
    pub data: Vec<f64>,
}

impl CorrelatorTable {
    pub fn new(kind: CorrelatorKind, shape: [usize; 2], data: Vec<f64>) -> Result<Self> {
        let t = Self { kind, shape, data };
        t.check()?;
        Ok(t)
    }

    pub fn check(&self) -> Result<()> {
        if self.shape[0] * self.shape[1] != self.data.len() || self.data.is_empty() {
            return Err(Error::Shape(format!("shape {:?} vs {} entries", self.shape, self.data.len())));
        }
        for (index, &value) in self.data.iter().enumerate() {
            if !value.is_finite() || value.abs() > 1.0 + IDENTITY_TOL {
                return Err(Error::CorrelatorOutOfRange { index, value });
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.shape[0]
    }

    pub fn cols(&self) -> usize {
        self.shape[1]
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.shape[1] + y]
    }
}

/// `p(b|x,y) = tr(rho_x B_{b|y})`.
pub fn pm_behavior(e: &Ensemble, a: &Assemblage) -> BehaviorTable {
    let mut data = Vec::with_capacity(e.len() * a.len() * 2);
    for rho in e.iter() {
        for m in a.iter() {
            data.extend_from_slice(&born_pm(rho, m));
        }
    }
    BehaviorTable { kind: BehaviorKind::Pm, shape: vec![e.len(), a.len(), 2], data }
}

/// `p(a,b|x,y) = tr(phi+ A_{a|x} (x) B_{b|y})`.
pub fn bell_behavior_phi_plus(alice: &Assemblage, bob: &Assemblage) -> BehaviorTable {
    let mut data = Vec::with_capacity(alice.len() * bob.len() * 4);
    for ma in alice.iter() {
        for mb in bob.iter() {
            let t = born_bell_phi_plus(ma, mb);
            data.extend_from_slice(&[t[0][0], t[0][1], t[1][0], t[1][1]]);
        }
    }
    BehaviorTable { kind: BehaviorKind::Bell, shape: vec![alice.len(), bob.len(), 2, 2], data }
}

pub fn to_correlators(t: &BehaviorTable) -> Result<CorrelatorTable> {
    if !t.is_dichotomic() {
        return Err(Error::NotDichotomic(t.outcomes_per_cell()));
    }
    let (nx, ny) = (t.n_x(), t.n_y());
    let mut data = Vec::with_capacity(nx * ny);
    let kind = match t.kind {
        BehaviorKind::Pm => {
            for x in 0..nx {
                for y in 0..ny {
                    data.push(t.pm(x, y, 0) - t.pm(x, y, 1));
                }
            }
            CorrelatorKind::Single
        }
        BehaviorKind::Bell => {
            for x in 0..nx {
                for y in 0..ny {
                    let same = t.bell(x, y, 0, 0) + t.bell(x, y, 1, 1);
                    let diff = t.bell(x, y, 0, 1) + t.bell(x, y, 1, 0);
                    data.push(same - diff);
                }
            }
            CorrelatorKind::Full
        }
    };
    Ok(CorrelatorTable { kind, shape: [nx, ny], data })
}

/// Inverse of [`to_correlators`] on its image.
///
/// Full correlators are expanded as `p(a,b) = (1 + (-1)^(a xor b) C) / 4`,
/// i.e. with uniform marginals. That is exact for traceless observables on
/// `phi+`, the only Bell tables this crate produces from correlators.
pub fn from_correlators(c: &CorrelatorTable) -> Result<BehaviorTable> {
    c.check()?;
    let [nx, ny] = c.shape;
    let mut data = Vec::new();
    let (kind, shape) = match c.kind {
        CorrelatorKind::Single => {
            for &p in &c.data {
                let p0 = (p + 1.0) / 2.0;
                data.extend_from_slice(&[p0, 1.0 - p0]);
            }
            (BehaviorKind::Pm, vec![nx, ny, 2])
        }
        CorrelatorKind::Full => {
            for &v in &c.data {
                let same = (1.0 + v) / 4.0;
                let diff = (1.0 - v) / 4.0;
                data.extend_from_slice(&[same, diff, diff, same]);
            }
            (BehaviorKind::Bell, vec![nx, ny, 2, 2])
        }
    };
    Ok(BehaviorTable { kind, shape, data })
}

/// `C^{phi+} = tr(A^T B) / 2` for qubit observables.
pub fn phi_plus_correlator(a_obs: &QubitOperator, b_obs: &QubitOperator) -> f64 {
    0.5 * transpose(a_obs).trace_product(b_obs)
}
