use thiserror::Error;

use crate::sdp::SolveStatus;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MatrixError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has no entries")]
    Empty,
    #[error("matrix is not Hermitian (max |m_ij - conj(m_ji)| = {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },
    #[error("invalid bipartite dimensions: {detail}")]
    InvalidDims {
        expected: usize,
        found: usize,
        detail: String,
    },
    #[error("invalid state: {invariant} violated (residual {residual:.3e})")]
    InvalidState {
        invariant: &'static str,
        residual: f64,
    },
    #[error("Hermitian eigensolver failed (reconstruction residual {residual:.3e})")]
    EigenFailure { residual: f64 },
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SdpError {
    #[error("malformed problem: {0}")]
    Model(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StateError {
    #[error("parameter {name} = {value} outside domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("invalid channel: {0}")]
    Channel(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MeasureError {
    #[error("solver returned {status:?} for {measure} (gap {gap:.3e}, {iterations} iterations)")]
    Solver {
        measure: &'static str,
        status: SolveStatus,
        gap: f64,
        iterations: usize,
    },
    #[error("primal and dual values of W disagree: {primal} vs {dual}")]
    Inconsistent { primal: f64, dual: f64 },
    #[error("additivity check failed: {joint} ebits on {copies} copies vs {single} per copy")]
    NotAdditive {
        joint: f64,
        single: f64,
        copies: usize,
    },
    #[error("{copies} copies of a {dim}-dimensional state exceed the size cap {cap}")]
    Capacity {
        dim: usize,
        copies: usize,
        cap: usize,
    },
    #[error("parameter out of range: {0}")]
    Domain(String),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}
