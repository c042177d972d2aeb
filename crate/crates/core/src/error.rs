use thiserror::Error;

use crate::algebra::{ParseError, PolyError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("axis {axis} out of range 1..={n}")]
    AxisOutOfRange { axis: usize, n: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("point is not on the integrability locus (bracket depth {depth})")]
    NotIntegrable { depth: usize },
    #[error("inconclusive at order {order}: {reason}")]
    Inconclusive { order: u32, reason: String },
    #[error("unstable count: {0}")]
    UnstableCount(String),
    #[error("numeric solver failure: {0}")]
    SolverFailure(String),
    #[error("function vanishes along the branch through order {order}")]
    VanishesThrough { order: u32 },
    #[error("precision insufficient to decide the comparison at {bits} bits")]
    PrecisionInsufficient { bits: u32 },
    #[error("direction not generic: no finite vanishing order up to {kmax}")]
    DirectionNotGeneric { kmax: u32 },
    #[error("separation check failed: {0}")]
    Separation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("degree ledger violated for {what}: degree {degree} exceeds bound {bound}")]
    DegreeLedger { what: String, degree: u64, bound: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotIntegrable { .. } => 3,
            Error::Inconclusive { .. }
            | Error::UnstableCount(_)
            | Error::SolverFailure(_)
            | Error::VanishesThrough { .. }
            | Error::PrecisionInsufficient { .. }
            | Error::DirectionNotGeneric { .. } => 4,
            Error::DegreeLedger { .. } => 5,
            _ => 2,
        }
    }
}
