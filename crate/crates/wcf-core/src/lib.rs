//! Weak coin-flipping protocol family with analytic cheating bounds.
//!
//! The protocol indexed by n exchanges n one-qubit messages built from the
//! weights a_1..a_n, measures the alternating-scan outcome projectors
//! {E_0, E_1}, and lets the loser verify the winner's qubits. This crate
//! constructs the protocol objects, evaluates the dual upper bounds α and β
//! on the two parties' cheating probabilities (dense trees and the O(n)
//! High/Low recurrence), builds and verifies the explicit dual certificates
//! behind those bounds, searches for matching cheating strategies by local
//! ascent, and tunes the weights to minimize the certified bias.
//!
//! The crate is `no_std`-compatible (with `alloc`); disable the default
//! `std` feature to use it in that mode.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cert;
pub mod cheat;
pub mod error;
pub mod linalg;
pub mod protocol;
pub mod tree;
pub mod tune;

pub use cert::{
    build_certificate, lemma_min_trace, verify_certificate, CertReport, DualCertificate,
};
pub use error::Error;
pub use protocol::{CoinOutcome, DiagonalOperator, ProtocolParams, PureState, Side};
pub use tree::{bounds, eval_alpha_fast, eval_beta_fast, eval_constraint_fast, BoundReport};
pub use tune::{optimize_bias, sweep_reciprocal, sweep_reciprocal_odd, TuneConfig, TuneResult};

pub type Result<T> = core::result::Result<T, Error>;
