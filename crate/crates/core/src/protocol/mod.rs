//! Deterministic message-passing engine for the generation, replication and
//! sharing protocols. Every run writes a [`Transcript`] that can be audited
//! against a [`VisibilityPolicy`].

mod env;
mod party;
mod replicate;
mod sharing;
mod transcript;
mod visibility;

pub use env::{
    AssignmentRule, Identification, ProtocolEnv, TamperAction, TamperRule, TokenIdentification,
};
pub use party::PartyId;
pub use replicate::{
    equal_set_replicate, equal_set_replicate_with_masks, replicate, set_generate_m, set_replicate,
    set_replicate_to_bigger, set_replicate_to_smaller, ReplicationMode,
};
pub use sharing::{
    activate_shares, activate_shares_partial, fast_share, safe_shares, Activation,
    SafeSharesState, KEY_REGENERATION_LIMIT,
};
pub use transcript::{EnvSummary, Message, MessageKind, Payload, Transcript, ValueClass};
pub use visibility::{
    check_visibility, RoleCategory, ValueCategory, Violation, VisibilityPolicy,
};
