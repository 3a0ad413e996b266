//! Joint measurability of dichotomic qubit measurements.
//!
//! Analytic criteria cover unbiased pairs and the noisy Pauli triple. For a
//! general finite assemblage, [`jm_feasibility`] looks for a parent POVM with
//! one outcome per deterministic response function `lambda: y -> b` using
//! Dykstra's alternating projections between the product of PSD cones and the
//! affine marginal constraints. The search is one-sided: it can exhibit a
//! mother POVM, never refute one.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::qcore::{operator_norm, Assemblage, DichotomicMeasurement, QubitOperator, VALIDITY_TOL};
use crate::{Error, Result};

/// Largest assemblage accepted by [`jm_feasibility`] (2^10 mother outcomes).
pub const MAX_FEASIBILITY_MEASUREMENTS: usize = 10;

/// Parent POVM with deterministic post-processing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotherPovm {
    pub effects: Vec<QubitOperator>,
    /// `responses[lambda][y]` is the outcome assigned to measurement `y`.
    pub responses: Vec<Vec<u8>>,
}

impl MotherPovm {
    /// `sum_{lambda: responses[lambda][y] = b} E_lambda`.
    pub fn marginal(&self, y: usize, b: u8) -> QubitOperator {
        self.effects
            .iter()
            .zip(&self.responses)
            .filter(|(_, r)| r[y] == b)
            .fold(QubitOperator::zero(), |acc, (e, _)| acc + *e)
    }

    /// Largest coefficient deviation over normalisation and every marginal.
    pub fn reconstruction_error(&self, a: &Assemblage) -> f64 {
        let total = self.effects.iter().fold(QubitOperator::zero(), |acc, e| acc + *e);
        let mut err = coef_dev(&total, &QubitOperator::identity());
        for (y, m) in a.iter().enumerate() {
            for b in 0..2u8 {
                err = err.max(coef_dev(&self.marginal(y, b), &m.effect(b as usize)));
            }
        }
        err
    }

    /// Most negative eigenvalue over all effects (0 when all are PSD).
    pub fn psd_violation(&self) -> f64 {
        self.effects.iter().map(|e| (e.bloch_norm() - e.s).max(0.0)).fold(0.0, f64::max)
    }
}

fn coef_dev(a: &QubitOperator, b: &QubitOperator) -> f64 {
    let d = *a - *b;
    d.s.abs().max(d.v.iter().fold(0.0_f64, |m, c| m.max(c.abs())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum JmVerdict {
    Jm { mother: MotherPovm, reconstruction_error: f64, iterations: usize },
    NotJm { reason: String },
    Undecided { residual: f64, iterations: usize },
}

/// Busch criterion for unbiased pairs: `margin = 2 - |B0 + B1| - |B0 - B1|`, JM iff `margin >= -1e-10`.
pub fn busch_pair_criterion(m0: &DichotomicMeasurement, m1: &DichotomicMeasurement) -> Result<(bool, f64)> {
    for (index, m) in [m0, m1].into_iter().enumerate() {
        if !m.is_unbiased() {
            return Err(Error::Biased { index, trace: m.effect0.trace() });
        }
    }
    let (b0, b1) = (m0.observable(), m1.observable());
    let margin = 2.0 - operator_norm(&(b0 + b1)) - operator_norm(&(b0 - b1));
    Ok((margin >= -VALIDITY_TOL, margin))
}

/// `E_{i,j} = (I + eta (i sigma_x + j sigma_z)) / 4`, `i, j = +/-1`.
///
/// Outcome `lambda = b_x + 2 b_z`, where `b = 0` stands for the `+1` sign.
pub fn mother_povm_xz(eta: f64) -> Result<MotherPovm> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::NoiseOutOfRange(eta));
    }
    if eta * std::f64::consts::SQRT_2 > 1.0 + 1e-12 {
        return Err(Error::MotherNotPsd(eta));
    }
    let sign = |b: u8| if b == 0 { 1.0 } else { -1.0 };
    let mut effects = Vec::with_capacity(4);
    let mut responses = Vec::with_capacity(4);
    for lambda in 0..4u8 {
        let (bx, bz) = (lambda & 1, lambda >> 1);
        effects.push(QubitOperator::new(0.25, [0.25 * eta * sign(bx), 0.0, 0.25 * eta * sign(bz)]));
        responses.push(vec![bx, bz]);
    }
    Ok(MotherPovm { effects, responses })
}

/// The noisy Pauli triple `{X^eta, Y^eta, Z^eta}` is JM iff `eta <= 1/sqrt(3)`.
pub fn noisy_pauli_triple_jm(eta: f64) -> bool {
    eta <= 1.0 / 3.0_f64.sqrt() + 1e-12
}

/// Dykstra search for a mother POVM over all `2^{N_B}` deterministic responses.
///
/// Returns `Jm` once the PSD iterate reproduces every marginal within `tol`,
/// `Undecided` after `max_iter` sweeps. Repeated (or complementary)
/// measurements are merged before the search and expanded afterwards.
pub fn jm_feasibility(a: &Assemblage, max_iter: usize, tol: f64) -> Result<JmVerdict> {
    crate::qcore::validate_assemblage(a)?;
    let (reduced, map) = merge_duplicates(a);
    let n = reduced.len();
    if n > MAX_FEASIBILITY_MEASUREMENTS {
        return Err(Error::TooManyMeasurements(n));
    }
    let k = 1usize << n;
    let projector = AffineProjector::new(&reduced);

    // Bloch coordinates (s, vx, vy, vz) per outcome; the Frobenius metric is
    // a uniform multiple of the Euclidean one in these coordinates.
    let mut x = projector.project(&vec![[0.0; 4]; k]);
    let mut correction = vec![[0.0; 4]; k];
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let mut cone_point = vec![[0.0; 4]; k];
        for l in 0..k {
            let mut z = [0.0; 4];
            for c in 0..4 {
                z[c] = x[l][c] + correction[l][c];
            }
            let p = project_psd(z);
            for c in 0..4 {
                correction[l][c] = z[c] - p[c];
            }
            cone_point[l] = p;
        }
        let mother = to_mother(&cone_point, n);
        residual = mother.reconstruction_error(&reduced);
        if residual < tol {
            let mother = expand(mother, &map);
            let reconstruction_error = mother.reconstruction_error(a);
            return Ok(JmVerdict::Jm { mother, reconstruction_error, iterations: it });
        }
        x = projector.project(&cone_point);
    }
    Ok(JmVerdict::Undecided { residual, iterations: max_iter })
}

/// Euclidean projection of `(s, v)` onto the cone `s >= |v|` (eigenvalue clipping).
fn project_psd(z: [f64; 4]) -> [f64; 4] {
    let s = z[0];
    let r = (z[1] * z[1] + z[2] * z[2] + z[3] * z[3]).sqrt();
    if r <= s {
        z
    } else if r <= -s {
        [0.0; 4]
    } else {
        let t = (s + r) / 2.0;
        [t, t * z[1] / r, t * z[2] / r, t * z[3] / r]
    }
}

fn to_mother(points: &[[f64; 4]], n: usize) -> MotherPovm {
    let effects = points.iter().map(|p| QubitOperator::new(p[0], [p[1], p[2], p[3]])).collect();
    let responses = (0..points.len()).map(|l| (0..n).map(|y| ((l >> y) & 1) as u8).collect()).collect();
    MotherPovm { effects, responses }
}

/// Orthogonal projection onto `{sum_l E_l = I, sum_{l: l(y) = 0} E_l = B_{0|y}}`.
///
/// The constraint matrix acts identically on each Bloch coordinate, so its
/// pseudo-inverse Gram factor is computed once per scenario shape.
struct AffineProjector {
    n: usize,
    gram_pinv: DMatrix<f64>,
    // Right-hand side per constraint row and Bloch coordinate.
    rhs: Vec<[f64; 4]>,
}

impl AffineProjector {
    fn new(a: &Assemblage) -> Self {
        let n = a.len();
        let k = 1usize << n;
        let rows = n + 1;
        let mat = DMatrix::<f64>::from_fn(rows, k, Self::row_entry);
        let gram = &mat * mat.transpose();
        let gram_pinv = gram.pseudo_inverse(1e-12).expect("Gram matrix pseudo-inverse");
        let mut rhs = vec![[1.0, 0.0, 0.0, 0.0]];
        for m in a.iter() {
            let e = m.effect0;
            rhs.push([e.s, e.v[0], e.v[1], e.v[2]]);
        }
        Self { n, gram_pinv, rhs }
    }

    // Row 0 is the normalisation; row y + 1 selects outcomes with l(y) = 0.
    fn row_entry(r: usize, l: usize) -> f64 {
        if r == 0 || (l >> (r - 1)) & 1 == 0 {
            1.0
        } else {
            0.0
        }
    }

    fn project(&self, x: &[[f64; 4]]) -> Vec<[f64; 4]> {
        let rows = self.n + 1;
        let mut out = x.to_vec();
        for c in 0..4 {
            let mut resid = vec![0.0; rows];
            for (l, p) in x.iter().enumerate() {
                for (r, res) in resid.iter_mut().enumerate() {
                    *res += Self::row_entry(r, l) * p[c];
                }
            }
            for (r, res) in resid.iter_mut().enumerate() {
                *res -= self.rhs[r][c];
            }
            let mut mult = vec![0.0; rows];
            for (i, m) in mult.iter_mut().enumerate() {
                *m = (0..rows).map(|j| self.gram_pinv[(i, j)] * resid[j]).sum();
            }
            for (l, o) in out.iter_mut().enumerate() {
                let corr: f64 = (0..rows).map(|r| Self::row_entry(r, l) * mult[r]).sum();
                o[c] -= corr;
            }
        }
        out
    }
}

/// How an original measurement maps onto the reduced assemblage.
#[derive(Debug, Clone, Copy)]
struct Link {
    target: usize,
    flipped: bool,
}

fn merge_duplicates(a: &Assemblage) -> (Assemblage, Vec<Link>) {
    const SAME: f64 = 1e-12;
    let mut reduced: Vec<DichotomicMeasurement> = Vec::new();
    let mut map = Vec::with_capacity(a.len());
    for m in a.iter() {
        let found = reduced.iter().enumerate().find_map(|(i, r)| {
            if coef_dev(&r.effect0, &m.effect0) <= SAME {
                Some(Link { target: i, flipped: false })
            } else if coef_dev(&r.effect(1), &m.effect0) <= SAME {
                Some(Link { target: i, flipped: true })
            } else {
                None
            }
        });
        match found {
            Some(link) => map.push(link),
            None => {
                map.push(Link { target: reduced.len(), flipped: false });
                reduced.push(*m);
            }
        }
    }
    (Assemblage(reduced), map)
}

fn expand(mother: MotherPovm, map: &[Link]) -> MotherPovm {
    let responses = mother
        .responses
        .iter()
        .map(|r| map.iter().map(|link| r[link.target] ^ u8::from(link.flipped)).collect())
        .collect();
    MotherPovm { effects: mother.effects, responses }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::apply_white_noise;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn x_eta(eta: f64) -> DichotomicMeasurement {
        DichotomicMeasurement::noisy_projective([1.0, 0.0, 0.0], eta)
    }

    fn z_eta(eta: f64) -> DichotomicMeasurement {
        DichotomicMeasurement::noisy_projective([0.0, 0.0, 1.0], eta)
    }

    #[test]
    fn busch_examples() {
        let (jm, margin) = busch_pair_criterion(&x_eta(FRAC_1_SQRT_2), &z_eta(FRAC_1_SQRT_2)).unwrap();
        assert!(jm && margin.abs() < 1e-9);
        let (jm, margin) = busch_pair_criterion(&x_eta(0.5), &z_eta(0.5)).unwrap();
        assert!(jm);
        assert!((margin - (2.0 - std::f64::consts::SQRT_2)).abs() < 1e-12);
        let m = DichotomicMeasurement::from_bloch([0.3, -0.4, 0.5]);
        let (jm, margin) = busch_pair_criterion(&m, &m).unwrap();
        assert!(jm && margin >= 0.0);
        let biased = DichotomicMeasurement::new(QubitOperator::new(0.3, [0.1, 0.0, 0.0]));
        assert!(matches!(busch_pair_criterion(&m, &biased), Err(Error::Biased { index: 1, .. })));
    }

    #[test]
    fn mother_xz_examples() {
        let m0 = mother_povm_xz(0.0).unwrap();
        assert!(m0.effects.iter().all(|e| *e == QubitOperator::identity() * 0.25));

        let m = mother_povm_xz(FRAC_1_SQRT_2).unwrap();
        let [lo, hi] = m.effects[0].eigenvalues();
        assert!(lo.abs() < 1e-12 && (hi - 0.5).abs() < 1e-12);

        let m = mother_povm_xz(0.5).unwrap();
        let marginal = m.marginal(0, 0);
        assert!(coef_dev(&marginal, &QubitOperator::new(0.5, [0.25, 0.0, 0.0])) < 1e-15);
        let target = Assemblage(vec![x_eta(0.5), z_eta(0.5)]);
        assert!(m.reconstruction_error(&target) < 1e-15);

        assert!(matches!(mother_povm_xz(0.75), Err(Error::MotherNotPsd(_))));
    }

    #[test]
    fn pauli_triple_threshold() {
        assert!(noisy_pauli_triple_jm(0.5));
        assert!(!noisy_pauli_triple_jm(0.6));
        assert!(noisy_pauli_triple_jm(0.0));
        assert!(noisy_pauli_triple_jm(1.0 / 3.0_f64.sqrt()));
    }

    #[test]
    fn feasibility_finds_xz_mother_below_threshold() {
        let a = Assemblage(vec![x_eta(0.5), z_eta(0.5)]);
        match jm_feasibility(&a, 5000, 1e-9).unwrap() {
            JmVerdict::Jm { mother, reconstruction_error, .. } => {
                assert!(reconstruction_error < 1e-8);
                assert_eq!(mother.effects.len(), 4);
                assert!(mother.psd_violation() == 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn feasibility_undecided_above_threshold() {
        let a = Assemblage(vec![x_eta(0.8), z_eta(0.8)]);
        assert!(matches!(jm_feasibility(&a, 5000, 1e-9).unwrap(), JmVerdict::Undecided { .. }));
        let (jm, margin) = busch_pair_criterion(&a.0[0], &a.0[1]).unwrap();
        assert!(!jm && margin < 0.0);
    }

    #[test]
    fn feasibility_identical_projective() {
        let z = z_eta(1.0);
        let a = Assemblage(vec![z, z, z]);
        match jm_feasibility(&a, 100, 1e-12).unwrap() {
            JmVerdict::Jm { mother, reconstruction_error, .. } => {
                assert!(reconstruction_error < 1e-12);
                assert_eq!(mother.effects.len(), 2);
                assert!(coef_dev(&mother.effects[0], &z.effect0) < 1e-12);
                assert!(mother.responses.iter().all(|r| r.len() == 3 && r.iter().all(|&b| b == r[0])));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn feasibility_complementary_measurement() {
        let z = z_eta(0.9);
        let flipped = DichotomicMeasurement::new(z.effect(1));
        let a = Assemblage(vec![z, flipped]);
        let JmVerdict::Jm { mother, .. } = jm_feasibility(&a, 100, 1e-12).unwrap() else {
            panic!("expected JM");
        };
        assert!(mother.reconstruction_error(&a) < 1e-12);
        assert!(mother.responses.iter().all(|r| r[0] != r[1]));
    }

    #[test]
    fn feasibility_limits() {
        let many = Assemblage((0..11).map(|k| x_eta(0.05 * (k + 1) as f64)).collect());
        assert!(matches!(jm_feasibility(&many, 1, 1e-8), Err(Error::TooManyMeasurements(11))));
    }

    #[test]
    fn white_noise_composes() {
        let m = DichotomicMeasurement::from_bloch([0.2, 0.4, -0.6]);
        let twice = apply_white_noise(&apply_white_noise(&m, 0.7).unwrap(), 0.5).unwrap();
        let once = apply_white_noise(&m, 0.35).unwrap();
        assert!(coef_dev(&twice.effect0, &once.effect0) < 1e-15);
    }
}
