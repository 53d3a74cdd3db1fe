//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FunkError {
    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("point is not strictly interior to the cone")]
    NotInterior,

    #[error("general position violated: {0}")]
    GeneralPositionViolation(String),

    #[error("site set is empty")]
    EmptySiteSet,

    #[error("site lies on the wrong side of the cross-section plane")]
    WrongSideOfSection,

    #[error("one site dominates the other; no bisector exists")]
    DominatedPair,

    #[error("sites are collinear with the apex")]
    DegenerateOrder,

    #[error("degenerate site triple: {0}")]
    DegenerateTriple(String),

    #[error("vertex was rejected by the cross-section filter")]
    FilteredOut,

    #[error("query point lies on a spoke")]
    OnSpoke,

    #[error("bisector trace exceeded its segment budget")]
    TraceStall,

    #[error("third site must be the extreme site for this direction")]
    WrongExtremeSite,

    #[error("tangency is degenerate; site lies on a region boundary")]
    DegenerateTangency,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal numerical error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, FunkError>;
