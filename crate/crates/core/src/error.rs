use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no events")]
    NoEvents,
    #[error("zero mean multiplicity")]
    ZeroMean,
    #[error("invalid moment order {0}")]
    InvalidOrder(usize),
    #[error("requested order {requested} exceeds available moment order {available}")]
    OrderExceeded { requested: usize, available: usize },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("windows have mixed bin counts ({expected} and {found})")]
    MixedBins { expected: usize, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("n_bins must divide window_len ({n_bins} does not divide {window_len})")]
    Divisibility { window_len: usize, n_bins: usize },
    #[error("window_len {window_len} exceeds series length {len}")]
    WindowTooLong { window_len: usize, len: usize },
    #[error("need at least 2 usable scaling points, got {0}")]
    InsufficientPoints(usize),
    #[error("insufficient gap support: {0}")]
    InsufficientSupport(String),
    #[error("empty series")]
    EmptySeries,
    #[error("row {row}: {msg}")]
    Parse { row: u64, msg: String },
    #[error("row {row}: timestamp {ts} is not greater than previous timestamp {prev}")]
    NonIncreasingTimestamp { row: u64, ts: i64, prev: i64 },
    #[error("need at least 2 price rows, got {0}")]
    TooFewRows(usize),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}
