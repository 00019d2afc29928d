//! Automatic secret generation and sharing for the KGH additive scheme.
//!
//! Share algebra over `Z_k^η` ([`vector`], [`kgh`]), the accumulator and
//! randomness devices ([`devices`]), a deterministic message-passing engine
//! for the generation, replication and sharing protocols ([`protocol`]), a
//! publicly verifiable consistency check between two authorized sets
//! ([`pvss`]), document formats ([`formats`]) and scenario runs
//! ([`scenario`]).

pub mod devices;
pub mod error;
pub mod formats;
pub mod kgh;
pub mod protocol;
pub mod pvss;
pub mod scenario;
pub mod vector;

pub use error::{Error, Result};
pub use kgh::{AuthorizedShareSet, MaskSet, RoleTag};
pub use vector::{combine, SchemeParams, ShareVector};
