//! Bloch-form qubit algebra.
//!
//! Every 2x2 Hermitian operator is stored as `s * I + v . sigma` with real `s`
//! and `v`, so Hermiticity is structural and the spectrum is `s +/- |v|`.
//! Products that leave the single-qubit space (tensor products, the CHSH
//! operator, the maximally entangled projector) go through the dense
//! [`TwoQubitOperator`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Tolerance for validity checks (positivity, normalisation).
pub const VALIDITY_TOL: f64 = 1e-10;

/// Tolerance for closed-form algebraic identities.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Hermitian 2x2 operator `s * I + v . sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitOperator {
    pub s: f64,
    pub v: [f64; 3],
}

impl QubitOperator {
    pub const fn new(s: f64, v: [f64; 3]) -> Self {
        Self { s, v }
    }

    pub const fn zero() -> Self {
        Self::new(0.0, [0.0; 3])
    }

    pub const fn identity() -> Self {
        Self::new(1.0, [0.0; 3])
    }

    pub const fn pauli_x() -> Self {
        Self::new(0.0, [1.0, 0.0, 0.0])
    }

    pub const fn pauli_y() -> Self {
        Self::new(0.0, [0.0, 1.0, 0.0])
    }

    pub const fn pauli_z() -> Self {
        Self::new(0.0, [0.0, 0.0, 1.0])
    }

    pub fn bloch_norm(&self) -> f64 {
        norm3(&self.v)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let r = self.bloch_norm();
        [self.s - r, self.s + r]
    }

    pub fn trace(&self) -> f64 {
        2.0 * self.s
    }

    /// `tr(self * other)`.
    pub fn trace_product(&self, other: &QubitOperator) -> f64 {
        2.0 * (self.s * other.s + dot3(&self.v, &other.v))
    }

    /// Complex entries `[[s + vz, vx - i vy], [vx + i vy, s - vz]]`.
    pub fn to_matrix(&self) -> [[Complex64; 2]; 2] {
        let [x, y, z] = self.v;
        [
            [Complex64::new(self.s + z, 0.0), Complex64::new(x, -y)],
            [Complex64::new(x, y), Complex64::new(self.s - z, 0.0)],
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.s.is_finite() && self.v.iter().all(|c| c.is_finite())
    }
}

impl Add for QubitOperator {
    type Output = QubitOperator;
    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.s + rhs.s,
            [self.v[0] + rhs.v[0], self.v[1] + rhs.v[1], self.v[2] + rhs.v[2]],
        )
    }
}

impl Sub for QubitOperator {
    type Output = QubitOperator;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for QubitOperator {
    type Output = QubitOperator;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Mul<f64> for QubitOperator {
    type Output = QubitOperator;
    fn mul(self, k: f64) -> Self {
        Self::new(self.s * k, [self.v[0] * k, self.v[1] * k, self.v[2] * k])
    }
}

/// Largest absolute eigenvalue, `max(|s + |v||, |s - |v||)`.
pub fn operator_norm(op: &QubitOperator) -> f64 {
    let [lo, hi] = op.eigenvalues();
    lo.abs().max(hi.abs())
}

/// Complex-conjugation transpose; only the `sigma_y` coefficient changes sign.
pub fn transpose(op: &QubitOperator) -> QubitOperator {
    QubitOperator::new(op.s, [op.v[0], -op.v[1], op.v[2]])
}

/// Normalised qubit density operator (`s = 1/2`, `|v| <= 1/2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitState(pub QubitOperator);

impl QubitState {
    /// State with Bloch vector `r` (`|r| <= 1`).
    pub fn from_bloch(r: [f64; 3]) -> Self {
        Self(QubitOperator::new(0.5, [r[0] / 2.0, r[1] / 2.0, r[2] / 2.0]))
    }

    pub fn maximally_mixed() -> Self {
        Self::from_bloch([0.0; 3])
    }

    pub fn bloch(&self) -> [f64; 3] {
        let v = self.0.v;
        [2.0 * v[0], 2.0 * v[1], 2.0 * v[2]]
    }

    pub fn op(&self) -> &QubitOperator {
        &self.0
    }

    /// `I - rho`; flips the Bloch vector.
    pub fn complement(&self) -> Self {
        Self(QubitOperator::identity() - self.0)
    }

    pub fn check(&self) -> Option<ViolationKind> {
        let op = &self.0;
        if !op.is_finite() {
            return Some(ViolationKind::NonFinite);
        }
        if (op.s - 0.5).abs() > VALIDITY_TOL {
            return Some(ViolationKind::TraceNotOne);
        }
        if op.bloch_norm() > op.s + VALIDITY_TOL {
            return Some(ViolationKind::NotPsd);
        }
        None
    }
}

/// Two-outcome POVM `{B_0, I - B_0}` stored through `B_0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DichotomicMeasurement {
    pub effect0: QubitOperator,
}

impl DichotomicMeasurement {
    pub fn new(effect0: QubitOperator) -> Self {
        Self { effect0 }
    }

    /// Unbiased effect `B_0 = (I + b . sigma) / 2`.
    pub fn from_bloch(b: [f64; 3]) -> Self {
        Self::new(QubitOperator::new(0.5, [b[0] / 2.0, b[1] / 2.0, b[2] / 2.0]))
    }

    /// Noisy projective measurement along the unit direction `dir` with visibility `eta`.
    pub fn noisy_projective(dir: [f64; 3], eta: f64) -> Self {
        let n = norm3(&dir);
        Self::from_bloch([eta * dir[0] / n, eta * dir[1] / n, eta * dir[2] / n])
    }

    /// `B_0 = I / 2`; outcomes are fair coin flips.
    pub fn trivial() -> Self {
        Self::from_bloch([0.0; 3])
    }

    pub fn effect(&self, b: usize) -> QubitOperator {
        match b {
            0 => self.effect0,
            _ => QubitOperator::identity() - self.effect0,
        }
    }

    /// `B = B_0 - B_1 = (2s - 1) I + 2 v . sigma`.
    pub fn observable(&self) -> QubitOperator {
        self.effect0 * 2.0 - QubitOperator::identity()
    }

    /// Visibility `eta = 2|v|`, meaningful for unbiased effects.
    pub fn visibility(&self) -> f64 {
        2.0 * self.effect0.bloch_norm()
    }

    pub fn is_unbiased(&self) -> bool {
        (self.effect0.s - 0.5).abs() <= VALIDITY_TOL
    }

    pub fn check(&self) -> Option<ViolationKind> {
        let op = &self.effect0;
        if !op.is_finite() {
            return Some(ViolationKind::NonFinite);
        }
        let r = op.bloch_norm();
        if r > op.s + VALIDITY_TOL {
            return Some(ViolationKind::NotPsd);
        }
        if r > 1.0 - op.s + VALIDITY_TOL {
            return Some(ViolationKind::ExceedsIdentity);
        }
        None
    }
}

/// White noise `B^eta_b = eta B_b + (1 - eta) tr(B_b) I / 2`.
///
/// In Bloch form the scalar part is untouched and `v` scales by `eta`.
pub fn apply_white_noise(m: &DichotomicMeasurement, eta: f64) -> crate::Result<DichotomicMeasurement> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(crate::Error::NoiseOutOfRange(eta));
    }
    let e = m.effect0;
    Ok(DichotomicMeasurement::new(QubitOperator::new(
        e.s,
        [eta * e.v[0], eta * e.v[1], eta * e.v[2]],
    )))
}

/// `(tr(rho B_0), tr(rho B_1))`.
pub fn born_pm(rho: &QubitState, m: &DichotomicMeasurement) -> [f64; 2] {
    let p0 = rho.0.trace_product(&m.effect0);
    [p0, 1.0 - p0]
}

/// Joint table `p(a, b) = tr(phi+ A_a (x) B_b) = tr(A_a^T B_b) / 2`.
pub fn born_bell_phi_plus(a: &DichotomicMeasurement, b: &DichotomicMeasurement) -> [[f64; 2]; 2] {
    let mut table = [[0.0; 2]; 2];
    for (ai, row) in table.iter_mut().enumerate() {
        let at = transpose(&a.effect(ai));
        for (bi, cell) in row.iter_mut().enumerate() {
            *cell = 0.5 * at.trace_product(&b.effect(bi));
        }
    }
    table
}

/// Ordered family of qubit states `rho_x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ensemble(pub Vec<QubitState>);

/// Ordered family of dichotomic measurements `B_{b|y}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assemblage(pub Vec<DichotomicMeasurement>);

impl Ensemble {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, QubitState> {
        self.0.iter()
    }
}

impl Assemblage {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, DichotomicMeasurement> {
        self.0.iter()
    }

    /// First biased measurement, if any.
    pub fn first_biased(&self) -> Option<(usize, f64)> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, m)| !m.is_unbiased())
            .map(|(i, m)| (i, m.effect0.trace()))
    }

    pub fn require_unbiased(&self) -> crate::Result<()> {
        match self.first_biased() {
            Some((index, trace)) => Err(crate::Error::Biased { index, trace }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Empty,
    NonFinite,
    TraceNotOne,
    /// Negative eigenvalue (`|v| > s`).
    NotPsd,
    /// Effect not below the identity (`|v| > 1 - s`).
    ExceedsIdentity,
}

/// First invariant violation found by [`validate_ensemble`] / [`validate_assemblage`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, thiserror::Error)]
pub struct Violation {
    pub index: usize,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at index {}", self.kind, self.index)
    }
}

pub fn validate_ensemble(e: &Ensemble) -> Result<(), Violation> {
    if e.is_empty() {
        return Err(Violation { index: 0, kind: ViolationKind::Empty });
    }
    for (index, rho) in e.iter().enumerate() {
        if let Some(kind) = rho.check() {
            return Err(Violation { index, kind });
        }
    }
    Ok(())
}

pub fn validate_assemblage(a: &Assemblage) -> Result<(), Violation> {
    if a.is_empty() {
        return Err(Violation { index: 0, kind: ViolationKind::Empty });
    }
    for (index, m) in a.iter().enumerate() {
        if let Some(kind) = m.check() {
            return Err(Violation { index, kind });
        }
    }
    Ok(())
}

/// Dense 4x4 complex operator on `C^2 (x) C^2`, basis `|00>, |01>, |10>, |11>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitOperator {
    pub re: [[f64; 4]; 4],
    pub im: [[f64; 4]; 4],
}

impl TwoQubitOperator {
    pub fn zero() -> Self {
        Self { re: [[0.0; 4]; 4], im: [[0.0; 4]; 4] }
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.re[i][j], self.im[i][j])
    }

    fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.re[i][j] = z.re;
        self.im[i][j] = z.im;
    }

    /// `a (x) b`, with `a` acting on the first factor.
    #[allow(clippy::needless_range_loop)]
    pub fn kron(a: &QubitOperator, b: &QubitOperator) -> Self {
        let (ma, mb) = (a.to_matrix(), b.to_matrix());
        let mut out = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out.set(2 * i + k, 2 * j + l, ma[i][j] * mb[k][l]);
                    }
                }
            }
        }
        out
    }

    /// Projector `|psi><psi|`.
    pub fn projector(psi: &[Complex64; 4]) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.set(i, j, psi[i] * psi[j].conj());
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.entry(i, i)).sum()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                let z: Complex64 = (0..4).map(|k| self.entry(i, k) * other.entry(k, j)).sum();
                out.set(i, j, z);
            }
        }
        out
    }

    /// `tr(self * other)`.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            for k in 0..4 {
                acc += self.entry(i, k) * other.entry(k, i);
            }
        }
        acc
    }

    /// `<psi| self |psi>`.
    pub fn expectation(&self, psi: &[Complex64; 4]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                acc += psi[i].conj() * self.entry(i, j) * psi[j];
            }
        }
        acc
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                err = err.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        err
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_error() <= IDENTITY_TOL
    }

    pub fn to_nalgebra(&self) -> Matrix4<Complex64> {
        Matrix4::from_fn(|i, j| self.entry(i, j))
    }

    /// Real eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let eig = SymmetricEigen::new(self.to_nalgebra());
        let mut vals = [0.0; 4];
        for (slot, v) in vals.iter_mut().zip(eig.eigenvalues.iter()) {
            *slot = *v;
        }
        vals.sort_by(|a, b| a.total_cmp(b));
        vals
    }

    /// Spectral norm of a Hermitian operator.
    pub fn operator_norm(&self) -> f64 {
        self.eigenvalues().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl Add for TwoQubitOperator {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..4 {
            for j in 0..4 {
                out.re[i][j] += rhs.re[i][j];
                out.im[i][j] += rhs.im[i][j];
            }
        }
        out
    }
}

impl Sub for TwoQubitOperator {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs * -1.0
    }
}

impl Mul<f64> for TwoQubitOperator {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        let mut out = self;
        for i in 0..4 {
            for j in 0..4 {
                out.re[i][j] *= k;
                out.im[i][j] *= k;
            }
        }
        out
    }
}

// Row-major list of 16 `[re, im]` pairs.
impl Serialize for TwoQubitOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = (0..16).map(|k| [self.re[k / 4][k % 4], self.im[k / 4][k % 4]]).collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TwoQubitOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(deserializer)?;
        if pairs.len() != 16 {
            return Err(serde::de::Error::invalid_length(pairs.len(), &"16 [re, im] pairs"));
        }
        let mut out = Self::zero();
        for (k, [re, im]) in pairs.into_iter().enumerate() {
            out.re[k / 4][k % 4] = re;
            out.im[k / 4][k % 4] = im;
        }
        Ok(out)
    }
}

/// `|phi+> = (|00> + |11>) / sqrt(2)`.
pub fn phi_plus_vector() -> [Complex64; 4] {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    [h, z, z, h]
}

/// `|phi+><phi+|` for two qubits.
pub fn max_entangled_2() -> TwoQubitOperator {
    TwoQubitOperator::projector(&phi_plus_vector())
}

pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}
