//! Message-level audit of who received which class of value.

use std::collections::BTreeSet;
use std::fmt;

use crate::kgh::RoleTag;
use crate::protocol::transcript::{Message, Transcript, ValueClass};
use crate::protocol::PartyId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RoleCategory {
    Dealer,
    Owner,
    Accumulator,
    Participant,
}

impl RoleCategory {
    pub const ALL: [RoleCategory; 4] = [
        RoleCategory::Dealer,
        RoleCategory::Owner,
        RoleCategory::Accumulator,
        RoleCategory::Participant,
    ];

    pub fn of(party: PartyId) -> Self {
        match party {
            PartyId::Dealer => RoleCategory::Dealer,
            PartyId::Owner => RoleCategory::Owner,
            PartyId::AccumulatorDevice => RoleCategory::Accumulator,
            PartyId::Participant { .. } => RoleCategory::Participant,
        }
    }
}

/// A message's value class as seen from its recipient. "Own" means the
/// value carries the recipient's own set and index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueCategory {
    Secret,
    OwnerShare,
    ProtectedShare,
    ActivatedShare,
    OwnSetShare,
    ForeignSetShare,
    OwnMask,
    ForeignMask,
    OwnKey,
    ForeignKey,
    EncryptedMask,
    MaskedShare,
    Control,
}

impl ValueCategory {
    pub const ALL: [ValueCategory; 13] = [
        ValueCategory::Secret,
        ValueCategory::OwnerShare,
        ValueCategory::ProtectedShare,
        ValueCategory::ActivatedShare,
        ValueCategory::OwnSetShare,
        ValueCategory::ForeignSetShare,
        ValueCategory::OwnMask,
        ValueCategory::ForeignMask,
        ValueCategory::OwnKey,
        ValueCategory::ForeignKey,
        ValueCategory::EncryptedMask,
        ValueCategory::MaskedShare,
        ValueCategory::Control,
    ];

    /// Classifies `msg` relative to its recipient.
    pub fn of(msg: &Message) -> Self {
        let own = |set: Option<RoleTag>| match msg.to {
            PartyId::Participant { set: s, index } => {
                set.is_none_or(|t| t == s) && msg.index == Some(index)
            }
            _ => false,
        };
        match msg.class {
            ValueClass::Secret => ValueCategory::Secret,
            ValueClass::Share(tag) => match msg.to {
                PartyId::Participant { set, .. } if set == tag => ValueCategory::OwnSetShare,
                _ => match tag {
                    RoleTag::Owner => ValueCategory::OwnerShare,
                    RoleTag::Protected => ValueCategory::ProtectedShare,
                    RoleTag::Activated => ValueCategory::ActivatedShare,
                    _ => ValueCategory::ForeignSetShare,
                },
            },
            ValueClass::Mask if own(None) => ValueCategory::OwnMask,
            ValueClass::Mask => ValueCategory::ForeignMask,
            ValueClass::Key(tag) if own(Some(tag)) => ValueCategory::OwnKey,
            ValueClass::Key(_) => ValueCategory::ForeignKey,
            ValueClass::EncryptedMask => ValueCategory::EncryptedMask,
            ValueClass::MaskedShare => ValueCategory::MaskedShare,
            ValueClass::Control => ValueCategory::Control,
        }
    }
}

/// Table of forbidden (recipient role, value category) pairs. Every pair not
/// listed is permitted, so the table is total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisibilityPolicy {
    forbidden: BTreeSet<(RoleCategory, ValueCategory)>,
}

impl VisibilityPolicy {
    /// Nothing forbidden.
    pub fn permissive() -> Self {
        VisibilityPolicy {
            forbidden: BTreeSet::new(),
        }
    }

    pub fn forbid(mut self, role: RoleCategory, value: ValueCategory) -> Self {
        self.forbidden.insert((role, value));
        self
    }

    pub fn permit(mut self, role: RoleCategory, value: ValueCategory) -> Self {
        self.forbidden.remove(&(role, value));
        self
    }

    pub fn permits(&self, role: RoleCategory, value: ValueCategory) -> bool {
        !self.forbidden.contains(&(role, value))
    }

    pub fn forbidden(&self) -> impl Iterator<Item = &(RoleCategory, ValueCategory)> {
        self.forbidden.iter()
    }
}

impl Default for VisibilityPolicy {
    /// The dealer never sees the secret or any share derived from it; the
    /// owner never sees masks or keys; a participant sees only values
    /// addressed to its own set and index.
    fn default() -> Self {
        use RoleCategory as R;
        use ValueCategory as V;
        let mut p = Self::permissive();
        for v in [V::Secret, V::OwnerShare, V::ProtectedShare, V::ActivatedShare] {
            p = p.forbid(R::Dealer, v);
        }
        for v in [V::OwnMask, V::ForeignMask, V::OwnKey, V::ForeignKey, V::ActivatedShare] {
            p = p.forbid(R::Owner, v);
        }
        for v in [
            V::Secret,
            V::OwnerShare,
            V::ProtectedShare,
            V::ActivatedShare,
            V::ForeignSetShare,
            V::ForeignMask,
            V::ForeignKey,
            V::EncryptedMask,
            V::MaskedShare,
        ] {
            p = p.forbid(R::Participant, v);
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub seq: u64,
    pub from: PartyId,
    pub recipient: PartyId,
    pub class: ValueClass,
    pub category: ValueCategory,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "seq {}: {} delivered {} ({:?}) to {}",
            self.seq, self.from, self.class, self.category, self.recipient
        )
    }
}

/// Every message whose value category is forbidden for its recipient.
pub fn check_visibility(transcript: &Transcript, policy: &VisibilityPolicy) -> Vec<Violation> {
    transcript
        .steps()
        .iter()
        .filter_map(|m| {
            let category = ValueCategory::of(m);
            (!policy.permits(RoleCategory::of(m.to), category)).then_some(Violation {
                seq: m.seq,
                from: m.from,
                recipient: m.to,
                class: m.class,
                category,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::transcript::{EnvSummary, MessageKind, Payload};
    use crate::vector::{SchemeParams, ShareVector};

    fn msg(to: PartyId, class: ValueClass, index: Option<usize>) -> Message {
        Message {
            seq: 1,
            from: PartyId::AccumulatorDevice,
            to,
            kind: MessageKind::MaskElement,
            class,
            index,
            payload: Payload::Vector(ShareVector::zero(SchemeParams::binary(8).unwrap())),
        }
    }

    #[test]
    fn categories_respect_ownership() {
        let p2_1 = PartyId::participant(RoleTag::Master, 1);
        assert_eq!(ValueCategory::of(&msg(p2_1, ValueClass::Mask, Some(1))), ValueCategory::OwnMask);
        assert_eq!(ValueCategory::of(&msg(p2_1, ValueClass::Mask, Some(4))), ValueCategory::ForeignMask);
        assert_eq!(
            ValueCategory::of(&msg(p2_1, ValueClass::Share(RoleTag::Master), Some(1))),
            ValueCategory::OwnSetShare
        );
        assert_eq!(
            ValueCategory::of(&msg(p2_1, ValueClass::Share(RoleTag::Derived(3)), Some(1))),
            ValueCategory::ForeignSetShare
        );
        assert_eq!(
            ValueCategory::of(&msg(p2_1, ValueClass::Key(RoleTag::Template), Some(1))),
            ValueCategory::ForeignKey
        );
        assert_eq!(
            ValueCategory::of(&msg(p2_1, ValueClass::Key(RoleTag::Master), Some(1))),
            ValueCategory::OwnKey
        );
        assert_eq!(
            ValueCategory::of(&msg(PartyId::Dealer, ValueClass::Share(RoleTag::Owner), Some(1))),
            ValueCategory::OwnerShare
        );
    }

    #[test]
    fn injected_secret_to_dealer_is_flagged() {
        let mut t = Transcript::new(EnvSummary::default());
        assert!(check_visibility(&t, &VisibilityPolicy::default()).is_empty());
        t.push(
            PartyId::Owner,
            PartyId::Dealer,
            MessageKind::Secret,
            ValueClass::Secret,
            None,
            Payload::Vector(ShareVector::zero(SchemeParams::binary(8).unwrap())),
        );
        let v = check_visibility(&t, &VisibilityPolicy::default());
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].recipient, PartyId::Dealer);
        assert_eq!(v[0].class, ValueClass::Secret);
        assert!(check_visibility(&t, &VisibilityPolicy::permissive()).is_empty());
    }

    #[test]
    fn policy_edits() {
        let p = VisibilityPolicy::default();
        assert!(!p.permits(RoleCategory::Owner, ValueCategory::OwnKey));
        let p = p.permit(RoleCategory::Owner, ValueCategory::OwnKey);
        assert!(p.permits(RoleCategory::Owner, ValueCategory::OwnKey));
        assert!(p.permits(RoleCategory::Accumulator, ValueCategory::Secret));
    }
}
