//! Error type shared across the crate.

use alloc::string::String;
use alloc::vec::Vec;

use crate::linalg::C64;

/// Failure modes of protocol construction, evaluation and verification.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A caller-supplied value is out of range or inconsistent.
    InvalidArgument(String),
    /// The requested computation exceeds the configured size caps.
    ResourceLimit { what: &'static str, requested: usize, cap: usize },
    /// The protocol instance has a zero-mass side and the requested object
    /// does not exist (e.g. a verification state for an impossible outcome).
    DegenerateProtocol(String),
    /// The certificate construction could not resolve a scaling assignment.
    DegenerateCertificate(String),
    /// A rank-one domination check failed before it could even be scored:
    /// the dominated vector has mass outside the support of the diagonal.
    SupportViolation { index: usize },
    /// Strategy and protocol dimensions disagree.
    ShapeMismatch(String),
    /// A caller-verified precondition failed the embedded check. Carries the
    /// violating eigenvector and its eigenvalue as a diagnostic.
    PreconditionViolated { min_eig: f64, witness: Vec<C64> },
}

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Error::InvalidArgument(m) => write!(f, "invalid argument: {m}"),
            Error::ResourceLimit { what, requested, cap } => {
                write!(f, "resource limit: {what} = {requested} exceeds cap {cap}")
            }
            Error::DegenerateProtocol(m) => write!(f, "degenerate protocol: {m}"),
            Error::DegenerateCertificate(m) => write!(f, "degenerate certificate: {m}"),
            Error::SupportViolation { index } => {
                write!(f, "domination support violation at basis index {index}")
            }
            Error::ShapeMismatch(m) => write!(f, "shape mismatch: {m}"),
            Error::PreconditionViolated { min_eig, .. } => {
                write!(f, "precondition violated: witness eigenvalue {min_eig}")
            }
        }
    }
}

impl core::error::Error for Error {}

impl Error {
    pub fn invalid(msg: impl core::fmt::Display) -> Self {
        Error::InvalidArgument(alloc::format!("{msg}"))
    }
}
