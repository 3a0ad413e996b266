use thiserror::Error;

use crate::qcore::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(#[from] Violation),

    #[error("noise parameter {0} outside [0, 1]")]
    NoiseOutOfRange(f64),

    #[error("measurement {index} is biased (tr B_0 = {trace}); an unbiased effect is required")]
    Biased { index: usize, trace: f64 },

    #[error("mother POVM is not positive semidefinite for eta = {0} (requires eta <= 1/sqrt(2))")]
    MotherNotPsd(f64),

    #[error("{0} measurements exceed the feasibility search limit of 10")]
    TooManyMeasurements(usize),

    #[error("enumeration of {required} assignments exceeds the budget of {budget}")]
    BudgetExceeded { required: f64, budget: u64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("table is not dichotomic: {0} outcomes")]
    NotDichotomic(usize),

    #[error("correlator {value} at index {index} is outside [-1, 1]")]
    CorrelatorOutOfRange { index: usize, value: f64 },

    #[error("observable norm {norm} exceeds 1")]
    ObservableNorm { norm: f64 },

    #[error("witness is not antisymmetric under the doubling map (deviation {0:e})")]
    NotAntisymmetric(f64),

    #[error("classical bounds disagree: PM {pm} vs Bell {bell}")]
    BoundMismatch { pm: f64, bell: f64 },

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
