//! # qincompat
//!
//! Certify (or refute certifiability of) qubit measurement incompatibility in
//! prepare-and-measure (PM) and bipartite Bell scenarios.
//!
//! The crate is organised bottom-up:
//!
//! - [`qcore`]: Bloch-form qubit operators, states, dichotomic measurements and
//!   the dense two-qubit operators needed for Bell expectations.
//! - [`jm`]: joint-measurability decisions (Busch pair criterion, the X/Z mother
//!   POVM, the noisy Pauli-triple threshold and a Dykstra feasibility search).
//! - [`correlations`]: behaviour tables and their correlator reductions.
//! - [`polytope`]: membership in the classical PM_d polytope and the Bell-local
//!   correlator polytope via fully-corrective Frank-Wolfe with exact
//!   enumeration oracles, plus a dense simplex reference solver.
//! - [`pmbell`]: the PM to Bell correlator bijection, witness transfer and the
//!   end-to-end certification pipeline.
//! - [`chsh`]: the CHSH operator, its norm bound and the attaining settings on
//!   the maximally entangled state.
//! - [`gallery`]: the named measurement families and thresholds.

#![forbid(unsafe_code)]

pub mod chsh;
pub mod correlations;
pub mod error;
pub mod gallery;
pub mod jm;
pub mod pmbell;
pub mod polytope;
pub mod qcore;

pub use error::{Error, Result};

/// Library version embedded in machine-readable reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
