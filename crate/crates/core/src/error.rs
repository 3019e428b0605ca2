use thiserror::Error;

use crate::degree::RegularValueReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("polyhedron is empty")]
    Infeasible,

    #[error("polyhedron is not full-dimensional")]
    LowerDimensional,

    #[error("function has not been validated as a polyhedral subdivision")]
    NotValidated,

    #[error("cell {cell} is unbounded but its selection has a singular linear part")]
    SingularAtInfinity { cell: usize },

    #[error("function is not coherently oriented")]
    NotCoherent,

    #[error("target is not a regular value ({} finding(s))", .0.reasons.len())]
    IrregularValue(Box<RegularValueReport>),

    #[error("no regular value found after {tries} tries")]
    SamplingExhausted { tries: usize },

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
