//! Crate-wide error type.
//!
//! Construction errors (bad system data, unnormalized measures, malformed
//! partitions) are separated from precondition errors on operations (exact
//! enumeration requested for too many points, solver preconditions) and from
//! I/O and schema failures, so that the CLI can map validation problems and
//! failed checks to distinct exit codes.

use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A system must have at least one point.
    #[error("system has no points")]
    EmptySystem,

    /// A map entry leaves the index range `[0, n)`.
    #[error("map entry at index {index} is {value}, outside [0, {n})")]
    MapEntryOutOfRange {
        index: usize,
        value: i64,
        n: usize,
    },

    /// Mass entries must be finite and strictly positive.
    #[error("mass at index {index} is {value}, must be finite and > 0")]
    InvalidMass { index: usize, value: f64 },

    /// Two containers that must agree in length do not.
    #[error("{what}: expected length {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// Potentials and test functions must contain finite reals.
    #[error("entry at index {index} is {value}, must be finite")]
    NonFiniteEntry { index: usize, value: f64 },

    /// Density entries must be nonnegative.
    #[error("measure entry at index {index} is {value}, must be >= 0")]
    NegativeDensity { index: usize, value: f64 },

    /// Density entries must integrate to one.
    #[error("measure sums to {sum}, expected 1 within {tol}")]
    MeasureNotNormalized { sum: f64, tol: f64 },

    /// Partition rows must be nonnegative and sum to one at every point.
    #[error("partition of unity invalid: {reason}")]
    InvalidPartition { reason: String },

    /// A block description does not define a set partition.
    #[error("blocks do not partition {{0, …, {n}-1}}: {reason}")]
    InvalidBlocks { n: usize, reason: String },

    /// Exact enumeration of set partitions is capped to small systems.
    #[error("exact partition enumeration requires n <= {limit}, system has {n} points")]
    ExactModeTooLarge { n: usize, limit: usize },

    /// An operation received a measure that is not invariant under the map.
    #[error("measure is not invariant: max transport defect {defect} exceeds {tol}")]
    NotInvariant { defect: f64, tol: f64 },

    /// An operation required a measure strictly positive on the relevant sets.
    #[error("measure must be strictly positive on {what}")]
    NotStrictlyPositive { what: &'static str },

    /// An operation is specific to invertible, measure-preserving systems.
    #[error("system is not an invertible measure-preserving map: {reason}")]
    NotConservative { reason: String },

    /// The inner solver hit its iteration cap without meeting the tolerance.
    #[error("inner solver did not converge within {iterations} iterations")]
    SolverDidNotConverge { iterations: usize },

    /// Underlying file-system failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed JSON.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// Well-formed JSON whose content violates a file schema.
    #[error("schema error: {reason}")]
    Schema { reason: String },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
