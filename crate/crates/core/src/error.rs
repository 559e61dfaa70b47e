use std::path::PathBuf;

/// Errors produced by the simulator library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("transform length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("shift {shift} out of range for transform size {size}")]
    ShiftOutOfRange { shift: usize, size: usize },

    #[error("user {user} out of range for {users} users")]
    UserOutOfRange { user: usize, users: usize },

    #[error("{users} users do not divide {subcarriers} subcarriers")]
    NotDivisible { subcarriers: usize, users: usize },

    #[error("cyclic prefix length {cp_len} must be in 1..{size}")]
    CyclicPrefix { cp_len: usize, size: usize },

    #[error("unsupported modulation order {0} (expected 16 or 64)")]
    UnsupportedOrder(u32),

    #[error("bit count {bits} is not a multiple of {bits_per_symbol}")]
    RaggedBits { bits: usize, bits_per_symbol: usize },

    #[error("channel has {taps} taps but the transform size is {size}")]
    TooManyTaps { taps: usize, size: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("{0} requires a non-empty input")]
    Empty(&'static str),

    #[error("PAPR of an all-zero block is undefined")]
    AllZero,

    #[error("segment length {segment} exceeds {len} available samples")]
    SegmentTooLong { segment: usize, len: usize },

    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("configuration error in `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
