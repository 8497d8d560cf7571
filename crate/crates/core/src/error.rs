use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Rabi-frequency deviation below the zero-field point.
    #[error("epsilon = {0} is below -1 (zero field)")]
    EpsilonBelowZeroField(f64),

    /// Composition of an empty propagator list.
    #[error("cannot compose an empty list of propagators")]
    EmptyComposition,

    /// Sequence constructor called with an unsupported length.
    #[error("invalid sequence length {n} for {family}: {reason}")]
    InvalidSequenceLength {
        family: &'static str,
        n: usize,
        reason: &'static str,
    },

    /// Unknown universal-sequence label.
    #[error("unknown label {label:?}; valid labels: {valid}")]
    UnknownLabel { label: String, valid: String },

    /// Requested (N, p) row is not present in the embedded phase tables.
    #[error("no {family} table row for N = {n}, p = {p}")]
    MissingTableRow {
        family: &'static str,
        n: usize,
        p: f64,
    },

    /// Malformed scan grid.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Scan of an empty sequence.
    #[error("cannot scan an empty sequence")]
    EmptySequence,

    /// Metric extraction needs at least three records.
    #[error("profile metrics need at least 3 records, got {0}")]
    TooFewRecords(usize),

    /// Physically inconsistent noise parameters.
    #[error("invalid noise parameters: {0}")]
    InvalidNoiseParams(String),

    /// Ill-posed solve problem.
    #[error("invalid solve problem: {0}")]
    InvalidProblem(String),

    /// Sequence JSON that does not match the export schema.
    #[error("malformed sequence document: {0}")]
    MalformedSequence(String),

    /// Command-line / config usage error.
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config parse error: {0}")]
    Config(String),
}
