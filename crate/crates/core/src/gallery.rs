//! Named measurement and state families.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::qcore::{dot3, norm3, Assemblage, DichotomicMeasurement, Ensemble, QubitState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn unit(self) -> [f64; 3] {
        match self {
            Axis::X => [1.0, 0.0, 0.0],
            Axis::Y => [0.0, 1.0, 0.0],
            Axis::Z => [0.0, 0.0, 1.0],
        }
    }

    /// Parse a word such as `"xz"` into axes, keeping order and dropping repeats.
    pub fn parse_set(word: &str) -> Result<Vec<Axis>> {
        let mut axes = Vec::new();
        for c in word.chars() {
            let axis = match c.to_ascii_lowercase() {
                'x' => Axis::X,
                'y' => Axis::Y,
                'z' => Axis::Z,
                other => return Err(Error::Shape(format!("unknown axis '{other}'"))),
            };
            if !axes.contains(&axis) {
                axes.push(axis);
            }
        }
        Ok(axes)
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::NoiseOutOfRange(eta));
    }
    Ok(())
}

/// Noisy Pauli measurements along the given axes.
pub fn pauli_set(axes: &[Axis], eta: f64) -> Result<Assemblage> {
    check_eta(eta)?;
    if axes.is_empty() {
        return Err(Error::Shape("at least one axis is required".into()));
    }
    Ok(Assemblage(axes.iter().map(|a| DichotomicMeasurement::noisy_projective(a.unit(), eta)).collect()))
}

/// `n` noisy projective measurements along `(cos(k pi / n), 0, sin(k pi / n))`.
pub fn planar_set(n: usize, eta: f64) -> Result<Assemblage> {
    check_eta(eta)?;
    if n == 0 {
        return Err(Error::Shape("planar set needs at least one measurement".into()));
    }
    Ok(Assemblage(
        (0..n)
            .map(|k| {
                let phi = k as f64 * PI / n as f64;
                DichotomicMeasurement::noisy_projective([phi.cos(), 0.0, phi.sin()], eta)
            })
            .collect(),
    ))
}

/// Real root of `t^3 = t^2 + t + 1`.
pub fn tribonacci_constant() -> f64 {
    ((19.0 + 3.0 * 33.0_f64.sqrt()).cbrt() + (19.0 - 3.0 * 33.0_f64.sqrt()).cbrt() + 1.0) / 3.0
}

/// Placement of the snub cube relative to the Pauli axes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SnubFrame {
    /// Fourfold axes along x, y, z.
    Aligned,
    /// Aligned frame turned by [`SNUB_TWIST_ANGLE`] about the body diagonal `(1, 1, 1)`.
    #[default]
    Twisted,
}

/// Twist of [`SnubFrame::Twisted`]. With Pauli-eigenstate preparations the
/// aligned frame admits a three-level classical model; this pose does not.
pub const SNUB_TWIST_ANGLE: f64 = PI / 6.0;

/// Rotate `v` by `angle` about `axis` (Rodrigues).
pub fn rotate(v: [f64; 3], axis: [f64; 3], angle: f64) -> [f64; 3] {
    let n = norm3(&axis);
    let k = [axis[0] / n, axis[1] / n, axis[2] / n];
    let (s, c) = angle.sin_cos();
    let kv = dot3(&k, &v);
    let cross = [k[1] * v[2] - k[2] * v[1], k[2] * v[0] - k[0] * v[2], k[0] * v[1] - k[1] * v[0]];
    [0, 1, 2].map(|i| v[i] * c + cross[i] * s + k[i] * kv * (1.0 - c))
}

/// Normalised vertices of a snub cube (24 unit vectors).
///
/// Built from `(1, 1/t, t)`: even permutations with an even number of sign
/// flips plus odd permutations with an odd number. `mirror` returns the
/// other chirality (point inversion), applied before the frame rotation.
pub fn snub_cube_directions(mirror: bool, frame: SnubFrame) -> Vec<[f64; 3]> {
    let t = tribonacci_constant();
    let seed = [1.0, 1.0 / t, t];
    let even = [[0, 1, 2], [1, 2, 0], [2, 0, 1]];
    let odd = [[1, 0, 2], [0, 2, 1], [2, 1, 0]];
    let flip = if mirror { -1.0 } else { 1.0 };
    let mut out: Vec<[f64; 3]> = Vec::with_capacity(24);
    for signs in 0..8u32 {
        let parity_even = signs.count_ones() % 2 == 0;
        let perms = if parity_even { &even } else { &odd };
        for p in perms {
            let mut v = [0.0; 3];
            for (i, &src) in p.iter().enumerate() {
                let s = if signs >> i & 1 == 1 { -1.0 } else { 1.0 };
                v[i] = flip * s * seed[src];
            }
            let n = norm3(&v);
            let mut u = [v[0] / n, v[1] / n, v[2] / n];
            if frame == SnubFrame::Twisted {
                u = rotate(u, [1.0, 1.0, 1.0], SNUB_TWIST_ANGLE);
            }
            if !out.iter().any(|w| (0..3).all(|i| (w[i] - u[i]).abs() < 1e-12)) {
                out.push(u);
            }
        }
    }
    out
}

/// Noisy projective measurements along the snub-cube directions.
pub fn snub_cube_set(eta: f64, mirror: bool, frame: SnubFrame) -> Result<Assemblage> {
    check_eta(eta)?;
    Ok(Assemblage(
        snub_cube_directions(mirror, frame)
            .into_iter()
            .map(|d| DichotomicMeasurement::noisy_projective(d, eta))
            .collect(),
    ))
}

/// The six Pauli eigenstates, ordered `+x, -x, +y, -y, +z, -z`.
pub fn pauli_eigenstate_ensemble() -> Ensemble {
    let mut states = Vec::with_capacity(6);
    for axis in [Axis::X, Axis::Y, Axis::Z] {
        let u = axis.unit();
        states.push(QubitState::from_bloch(u));
        states.push(QubitState::from_bloch([-u[0], -u[1], -u[2]]));
    }
    Ensemble(states)
}

/// Known visibility thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Noisy X, Z pair is jointly measurable up to here.
    pub jm_pair_xz: f64,
    /// Noisy Pauli triple is jointly measurable up to here.
    pub jm_triple: f64,
    /// All planar projective measurements are PM_2-simulable up to here.
    pub pm2_planar: f64,
    /// Bracket on the PM_2 threshold for all projective qubit measurements.
    pub pm2_all_lower: f64,
    pub pm2_all_upper: f64,
}

pub fn constants() -> Constants {
    Constants {
        jm_pair_xz: FRAC_1_SQRT_2,
        jm_triple: 1.0 / 3.0_f64.sqrt(),
        pm2_planar: FRAC_1_SQRT_2,
        pm2_all_lower: 0.6875,
        pm2_all_upper: 0.6961,
    }
}
