use std::io;

use thiserror::Error;

use crate::plane::Role;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} samples for {width}x{height}, got {actual}")]
    DimensionMismatch {
        width: usize,
        height: usize,
        expected: usize,
        actual: usize,
    },

    #[error("invalid dimensions {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },

    #[error("invalid sample bounds [{min}, {max}]")]
    InvalidBounds { min: i32, max: i32 },

    #[error("sample out of bounds at index {index}: {value} not in [{min}, {max}]")]
    SampleOutOfBounds {
        index: usize,
        value: i32,
        min: i32,
        max: i32,
    },

    #[error("filter center weight {0} is not a power of two in 1..=1024")]
    InvalidFilterWeight(u32),

    #[error("planes of a color image differ in size")]
    PlaneSizeMismatch,

    #[error("role set {0:?} does not describe a known transform state")]
    InconsistentRoles([Role; 3]),

    #[error("expected roles {expected:?}, found {found:?}")]
    RoleMismatch {
        expected: [Role; 3],
        found: [Role; 3],
    },

    /// A lifting step produced a value outside its declared output range.
    /// This points at a wrong bounds declaration in the sequence, not at bad input.
    #[error("internal consistency: step {step} produced {value} outside [{min}, {max}]")]
    StepBounds {
        step: usize,
        value: i32,
        min: i32,
        max: i32,
    },

    #[error("not a valid {transform} image: reconstructed sample {value} at index {index} outside [{min}, {max}]")]
    InvalidTransformed {
        transform: String,
        index: usize,
        value: i32,
        min: i32,
        max: i32,
    },

    #[error("malformed {format}: {reason}")]
    Format {
        format: &'static str,
        reason: String,
    },

    #[error("truncated stream at byte offset {offset}")]
    Truncated { offset: usize },

    #[error("corrupt stream at byte offset {offset}: {reason}")]
    Corrupt { offset: usize, reason: String },

    #[error("{0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn format(format: &'static str, reason: impl Into<String>) -> Self {
        Error::Format {
            format,
            reason: reason.into(),
        }
    }
}
