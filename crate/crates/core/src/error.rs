use thiserror::Error;

use crate::kgh::RoleTag;
use crate::protocol::PartyId;
use crate::vector::SchemeParams;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid scheme parameters: modulus {modulus}, dimension {dimension}")]
    InvalidParams { modulus: u64, dimension: usize },

    #[error("component {value} out of range for modulus {modulus}")]
    ComponentOutOfRange { value: u64, modulus: u64 },

    #[error("vector has {actual} components, expected {expected}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("cannot combine vectors under different parameters ({left} vs {right})")]
    MixedParams { left: SchemeParams, right: SchemeParams },

    #[error("device expects {expected} but got a vector under {actual}")]
    ParamMismatch {
        expected: SchemeParams,
        actual: SchemeParams,
    },

    #[error("operation requires binary parameters, got {0}")]
    NotBinary(SchemeParams),

    #[error("an authorized share set cannot be empty")]
    EmptyShareSet,

    #[error("count must be at least 1")]
    ZeroCount,

    #[error("index {index} out of range for a set of {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("fixture exhausted after {consumed} values")]
    FixtureExhausted { consumed: usize },

    #[error("mask set has {actual} elements, expected {expected}")]
    CardinalityMismatch { expected: usize, actual: usize },

    #[error("mask set does not sum to zero")]
    NonZeroMaskSum,

    #[error("invalid target cardinality {target} for a source set of {source_len} ({mode})")]
    InvalidTarget {
        mode: &'static str,
        target: usize,
        source_len: usize,
    },

    #[error("key set XOR stayed zero after {attempts} regenerations")]
    KeyRegenerationExhausted { attempts: usize },

    #[error("identification failed; pending participants {pending:?}")]
    IdentificationFailed { pending: Vec<usize> },

    #[error("missing key for participant {index} of set {set}")]
    MissingKey { set: RoleTag, index: usize },

    #[error("assignment is not a permutation of 1..={0}")]
    InvalidAssignment(usize),

    #[error("protocol message to {to} carried an unexpected payload")]
    UnexpectedPayload { to: PartyId },

    #[error("bad hex: {0}")]
    BadHex(String),

    #[error("hex vector length {actual} does not match {expected} characters for {bits} bits")]
    LengthMismatch {
        bits: usize,
        expected: usize,
        actual: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
