//! Random scenario generators shared by the integration tests.
#![allow(dead_code)]

use qincompat::qcore::{Assemblage, DichotomicMeasurement, Ensemble, QubitOperator, QubitState};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_vector<R: Rng>(rng: &mut R) -> [f64; 3] {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}

/// Bloch vector uniform in the unit ball.
pub fn ball_vector<R: Rng>(rng: &mut R) -> [f64; 3] {
    let u = unit_vector(rng);
    let r: f64 = rng.random::<f64>().cbrt();
    [r * u[0], r * u[1], r * u[2]]
}

pub fn random_state<R: Rng>(rng: &mut R) -> QubitState {
    QubitState::from_bloch(ball_vector(rng))
}

pub fn random_ensemble<R: Rng>(rng: &mut R, n: usize) -> Ensemble {
    Ensemble((0..n).map(|_| random_state(rng)).collect())
}

/// Unbiased dichotomic measurement with a Bloch vector in the unit ball.
pub fn random_unbiased<R: Rng>(rng: &mut R) -> DichotomicMeasurement {
    DichotomicMeasurement::from_bloch(ball_vector(rng))
}

/// Arbitrary dichotomic qubit measurement: `s` in `[0, 1]`, `|v| <= min(s, 1 - s)`.
pub fn random_measurement<R: Rng>(rng: &mut R) -> DichotomicMeasurement {
    let s: f64 = rng.random();
    let u = unit_vector(rng);
    let r = rng.random::<f64>() * s.min(1.0 - s);
    DichotomicMeasurement::new(QubitOperator::new(s, [r * u[0], r * u[1], r * u[2]]))
}

pub fn random_assemblage<R: Rng>(rng: &mut R, n: usize) -> Assemblage {
    Assemblage((0..n).map(|_| random_measurement(rng)).collect())
}

pub fn random_unbiased_assemblage<R: Rng>(rng: &mut R, n: usize) -> Assemblage {
    Assemblage((0..n).map(|_| random_unbiased(rng)).collect())
}

/// Noisy projective measurements along random directions.
pub fn random_projective_assemblage<R: Rng>(rng: &mut R, n: usize, eta: f64) -> Assemblage {
    Assemblage((0..n).map(|_| DichotomicMeasurement::noisy_projective(unit_vector(rng), eta)).collect())
}

/// Traceless observable with operator norm at most 1.
pub fn random_traceless_observable<R: Rng>(rng: &mut R) -> QubitOperator {
    QubitOperator::new(0.0, ball_vector(rng))
}
