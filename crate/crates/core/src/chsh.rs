//! CHSH operator on two qubits, its norm bound, and settings attaining it on phi+.

use serde::{Deserialize, Serialize};

use crate::qcore::{
    max_entangled_2, operator_norm, transpose, QubitOperator, TwoQubitOperator, IDENTITY_TOL, VALIDITY_TOL,
};
use crate::{Error, Result};

/// Agreement required between the phi+ value and the norm bound.
pub const ATTAINMENT_TOL: f64 = 1e-9;

fn check_norm(op: &QubitOperator) -> Result<()> {
    let norm = operator_norm(op);
    if !op.is_finite() || norm > 1.0 + VALIDITY_TOL {
        return Err(Error::ObservableNorm { norm });
    }
    Ok(())
}

/// `A0 B0 + A1 B0 + A0 B1 - A1 B1` (tensor products) as a dense 4x4 matrix.
pub fn chsh_operator(
    a0: &QubitOperator,
    a1: &QubitOperator,
    b0: &QubitOperator,
    b1: &QubitOperator,
) -> Result<TwoQubitOperator> {
    for op in [a0, a1, b0, b1] {
        check_norm(op)?;
    }
    Ok(TwoQubitOperator::kron(a0, b0) + TwoQubitOperator::kron(a1, b0) + TwoQubitOperator::kron(a0, b1)
        - TwoQubitOperator::kron(a1, b1))
}

/// `|B0 + B1| + |B0 - B1|`.
///
/// Upper-bounds the CHSH value for any Alice observables and any shared
/// state; a value of at most 2 means the pair never violates CHSH.
pub fn chsh_norm_bound(b0: &QubitOperator, b1: &QubitOperator) -> f64 {
    operator_norm(&(*b0 + *b1)) + operator_norm(&(*b0 - *b1))
}

/// Alice's observables attaining the norm bound on phi+.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AliceSettings {
    pub a0: QubitOperator,
    pub a1: QubitOperator,
    /// `<phi+| CHSH |phi+>` with these settings.
    pub value: f64,
    pub bound: f64,
    /// Whether the orthogonal complement replaced the chosen eigenvector.
    pub complemented: [bool; 2],
}

/// Pure state (Bloch vector) with the largest `|<psi|K|psi>|` for `K = s + v.sigma`,
/// flipped to its complement when that expectation is negative.
///
/// Returns the Bloch vector and whether the flip happened.
fn aligned_eigenstate(k: &QubitOperator) -> ([f64; 3], bool) {
    let r = k.bloch_norm();
    if r <= IDENTITY_TOL {
        // Any state attains |K| = |s|; take |0>.
        return ([0.0, 0.0, 1.0], false);
    }
    let n = [k.v[0] / r, k.v[1] / r, k.v[2] / r];
    // Eigenvalues in ascending order, first maximum of |lambda| wins.
    let bloch = if (k.s - r).abs() >= (k.s + r).abs() { [-n[0], -n[1], -n[2]] } else { n };
    let expectation = k.s + crate::qcore::dot3(&k.v, &bloch);
    if expectation < 0.0 {
        ([-bloch[0], -bloch[1], -bloch[2]], true)
    } else {
        (bloch, false)
    }
}

/// Construct `A0, A1` with `<phi+|CHSH|phi+> = |B0 + B1| + |B0 - B1|` for traceless `B0, B1`.
///
/// `A_x = 2 |psi_x><psi_x|^T - 1` with `psi_0`, `psi_1` the aligned
/// eigenstates of `B0 + B1` and `B0 - B1`.
pub fn optimal_alice_settings(b0: &QubitOperator, b1: &QubitOperator) -> Result<AliceSettings> {
    for (index, b) in [b0, b1].into_iter().enumerate() {
        check_norm(b)?;
        if b.trace().abs() > VALIDITY_TOL {
            return Err(Error::Biased { index, trace: b.trace() });
        }
    }
    let (r0, c0) = aligned_eigenstate(&(*b0 + *b1));
    let (r1, c1) = aligned_eigenstate(&(*b0 - *b1));
    let observable = |r: [f64; 3]| transpose(&QubitOperator::new(0.0, r));
    let (a0, a1) = (observable(r0), observable(r1));

    let op = chsh_operator(&a0, &a1, b0, b1)?;
    let value = op.trace_product(&max_entangled_2()).re;
    let bound = chsh_norm_bound(b0, b1);
    if (value - bound).abs() > ATTAINMENT_TOL {
        return Err(Error::Internal(format!("CHSH value {value} misses the norm bound {bound}")));
    }
    Ok(AliceSettings { a0, a1, value, bound, complemented: [c0, c1] })
}
