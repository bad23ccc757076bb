//! Exact weight-graded rational homotopy models.
//!
//! Everything is computed over the rationals inside finite degree windows, so
//! each verdict reduces to finite linear algebra.

pub mod exactlin;
pub mod graded;
pub mod freecga;
pub mod freelie;
pub mod ooinfty;
pub mod transfer;
pub mod barcobar;
pub mod sullivan;
pub mod mapping;
pub mod autloop;
pub mod corpus;
pub mod cli;

use graded::DegreeWindow;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid degree window `{0}`")]
    InvalidWindow(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("basis element {label} of degree {degree} outside window {window}")]
    OutsideWindow { label: String, degree: i32, window: DegreeWindow },
    #[error("bidegree violation: {0}")]
    BidegreeViolation(String),
    #[error("insufficient window slack: {0}")]
    InsufficientSlack(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
