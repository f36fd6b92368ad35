use thiserror::Error;

pub type Result<T> = std::result::Result<T, RdhError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RdhError {
    #[error("malformed PGM: {0}")]
    MalformedPgm(String),

    #[error("unsupported PGM maxval {0} (only 255 is supported)")]
    UnsupportedMaxval(u32),

    #[error("truncated PGM pixel data: expected {expected} bytes, found {found}")]
    TruncatedPgm { expected: usize, found: usize },

    #[error("invalid image dimensions {rows}x{cols}: {reason}")]
    InvalidDimensions {
        rows: usize,
        cols: usize,
        reason: &'static str,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("parity mismatch: {0}")]
    ParityMismatch(String),

    #[error("both dimensions are odd ({rows}x{cols}); the rotation trick needs an even side")]
    UnsupportedDimensions { rows: usize, cols: usize },

    #[error("position ({row}, {col}) is not an interior position of the target parity")]
    NotInterior { row: usize, col: usize },

    #[error("tensor shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("weight file: bad magic")]
    BadMagic,

    #[error("weight file truncated in layer {layer}")]
    TruncatedWeights { layer: usize },

    #[error("weights do not match the expected architecture: {0}")]
    ArchitectureMismatch(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("empty training dataset")]
    EmptyDataset,

    #[error("training diverged at epoch {epoch}: loss is {loss}")]
    Diverged { epoch: usize, loss: f64 },

    #[error("capacity exceeded: requested {requested} bits, max_bits={max_bits}")]
    CapacityExceeded { requested: usize, max_bits: usize },

    #[error("auxiliary data does not fit in the reserved row: need {needed} bits, row holds {available}")]
    ReservedRowOverflow { needed: usize, available: usize },

    #[error("corrupted auxiliary header: {0}")]
    CorruptHeader(String),

    #[error("internal codec inconsistency: {0}")]
    Inconsistent(String),
}
