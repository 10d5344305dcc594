//! Error types shared across the crate.

use std::fmt;

use thiserror::Error;

/// Why a received signature share was refused during verification/extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShareRejectReason {
    /// `||z||_inf` is not below `gamma1 - beta`.
    Norm,
    /// The transmitted challenge digest does not match the recomputed one.
    ChallengeMismatch,
    /// The mask recovered from the seed ciphertext is inconsistent with `z`
    /// (the residual `z - y` is not `beta`-bounded).
    ExtractionInconsistent,
}

impl fmt::Display for ShareRejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ShareRejectReason::Norm => "norm",
            ShareRejectReason::ChallengeMismatch => "challenge-mismatch",
            ShareRejectReason::ExtractionInconsistent => "extraction-inconsistent",
        };
        f.write_str(s)
    }
}

/// Serialization/deserialization failures for the wire formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("buffer truncated: need {need} bytes, have {have}")]
    Truncated { need: usize, have: usize },
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported format version {0}")]
    BadVersion(u8),
    #[error("unknown object kind {0}")]
    BadKind(u8),
    #[error("object kind {got} where kind {want} was expected")]
    WrongKind { want: u8, got: u8 },
    #[error("coefficient out of range for the declared packing width")]
    CoeffOutOfRange,
    #[error("length mismatch: expected {expected} bytes, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-canonical encoding (padding bits set or value out of domain)")]
    NonCanonical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("share rejected: {0}")]
    ShareRejected(ShareRejectReason),
    #[error("signing retry limit exceeded after {attempts} attempts")]
    RetryLimitExceeded { attempts: u32 },
    #[error("extracted shares disagree on the signed message")]
    MessageMismatch,
    #[error("unsupported security level {0}")]
    UnsupportedLevel(u32),
    #[error("entropy source failure")]
    Entropy,
    #[error("empty field: {0}")]
    EmptyField(&'static str),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

pub type Result<T> = std::result::Result<T, Error>;
