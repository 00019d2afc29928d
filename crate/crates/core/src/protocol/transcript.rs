use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::devices::RandDescriptor;
use crate::error::{Error, Result};
use crate::kgh::RoleTag;
use crate::protocol::PartyId;
use crate::vector::ShareVector;

/// Wire label of a message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MessageKind {
    MaskElement,
    MaskedShare,
    DerivedShare,
    Secret,
    OwnerShare,
    EnvelopeShare,
    Key,
    KeyRequest,
    Identification,
    Ack,
}

impl MessageKind {
    pub const ALL: [MessageKind; 10] = [
        MessageKind::MaskElement,
        MessageKind::MaskedShare,
        MessageKind::DerivedShare,
        MessageKind::Secret,
        MessageKind::OwnerShare,
        MessageKind::EnvelopeShare,
        MessageKind::Key,
        MessageKind::KeyRequest,
        MessageKind::Identification,
        MessageKind::Ack,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MessageKind::MaskElement => "mask_element",
            MessageKind::MaskedShare => "masked_share",
            MessageKind::DerivedShare => "derived_share",
            MessageKind::Secret => "secret",
            MessageKind::OwnerShare => "owner_share",
            MessageKind::EnvelopeShare => "envelope_share",
            MessageKind::Key => "key",
            MessageKind::KeyRequest => "key_request",
            MessageKind::Identification => "identification",
            MessageKind::Ack => "ack",
        }
    }

    /// Kinds whose payload is a flag rather than a vector.
    pub fn carries_flag(self) -> bool {
        matches!(
            self,
            MessageKind::KeyRequest | MessageKind::Identification | MessageKind::Ack
        )
    }
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MessageKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MessageKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown message kind {s:?}")))
    }
}

/// What a payload semantically is, independent of its wire label. The
/// visibility audit works on classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueClass {
    /// The secret `S`.
    Secret,
    /// A share of the authorized set with this tag.
    Share(RoleTag),
    /// A mask element `m_i`.
    Mask,
    /// A key `k_i` protecting a share of the tagged set.
    Key(RoleTag),
    /// `c_i = m_i ⊕ k_i`.
    EncryptedMask,
    /// `ω_i = s_i ⊕ m_i`.
    MaskedShare,
    /// Identification, requests and acknowledgements.
    Control,
}

impl fmt::Display for ValueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueClass::Secret => f.write_str("secret"),
            ValueClass::Share(t) => write!(f, "share:{t}"),
            ValueClass::Mask => f.write_str("mask"),
            ValueClass::Key(t) => write!(f, "key:{t}"),
            ValueClass::EncryptedMask => f.write_str("encrypted_mask"),
            ValueClass::MaskedShare => f.write_str("masked_share"),
            ValueClass::Control => f.write_str("control"),
        }
    }
}

impl FromStr for ValueClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "secret" => ValueClass::Secret,
            "mask" => ValueClass::Mask,
            "encrypted_mask" => ValueClass::EncryptedMask,
            "masked_share" => ValueClass::MaskedShare,
            "control" => ValueClass::Control,
            _ => match s.split_once(':') {
                Some(("share", t)) => ValueClass::Share(t.parse()?),
                Some(("key", t)) => ValueClass::Key(t.parse()?),
                _ => return Err(Error::Parse(format!("unknown value class {s:?}"))),
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Vector(ShareVector),
    Flag(bool),
}

impl Payload {
    /// Flips one payload bit. For flags only bit 0 exists.
    pub fn flip_bit(&self, bit: usize) -> Result<Payload> {
        match self {
            Payload::Vector(v) => Ok(Payload::Vector(v.flip_bit(bit)?)),
            Payload::Flag(b) if bit == 0 => Ok(Payload::Flag(!b)),
            Payload::Flag(_) => Err(Error::IndexOutOfRange { index: bit, len: 1 }),
        }
    }

    pub fn as_vector(&self) -> Option<&ShareVector> {
        match self {
            Payload::Vector(v) => Some(v),
            Payload::Flag(_) => None,
        }
    }

    pub fn as_flag(&self) -> Option<bool> {
        match self {
            Payload::Flag(b) => Some(*b),
            Payload::Vector(_) => None,
        }
    }
}

/// One point-to-point delivery over a secure channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub seq: u64,
    pub from: PartyId,
    pub to: PartyId,
    pub kind: MessageKind,
    pub class: ValueClass,
    /// Subscript of the carried value (`i` in `m_i`, `k_i`, `s_i`).
    pub index: Option<usize>,
    pub payload: Payload,
}

/// Configuration echo stored with every transcript.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EnvSummary {
    pub bits: usize,
    pub dealer: RandDescriptor,
    pub owner: RandDescriptor,
    pub accumulator: RandDescriptor,
    pub assignment: String,
    pub tamper: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    config: EnvSummary,
    steps: Vec<Message>,
}

impl Transcript {
    pub fn new(config: EnvSummary) -> Self {
        Transcript {
            config,
            steps: Vec::new(),
        }
    }

    /// Rebuilds a transcript from stored parts; sequence numbers must
    /// strictly increase.
    pub fn from_parts(config: EnvSummary, steps: Vec<Message>) -> Result<Self> {
        if steps.windows(2).any(|w| w[0].seq >= w[1].seq) {
            return Err(Error::Parse("transcript sequence numbers must increase".into()));
        }
        Ok(Transcript { config, steps })
    }

    pub fn config(&self) -> &EnvSummary {
        &self.config
    }

    pub(crate) fn config_mut(&mut self) -> &mut EnvSummary {
        &mut self.config
    }

    pub fn steps(&self) -> &[Message] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub(crate) fn next_seq(&self) -> u64 {
        self.steps.last().map_or(1, |m| m.seq + 1)
    }

    /// Appends a message, assigning the next sequence number.
    pub fn push(
        &mut self,
        from: PartyId,
        to: PartyId,
        kind: MessageKind,
        class: ValueClass,
        index: Option<usize>,
        payload: Payload,
    ) -> u64 {
        let seq = self.next_seq();
        self.steps.push(Message {
            seq,
            from,
            to,
            kind,
            class,
            index,
            payload,
        });
        seq
    }

    /// Messages received by `party`, in order.
    pub fn view_of(&self, party: PartyId) -> impl Iterator<Item = &Message> {
        self.steps.iter().filter(move |m| m.to == party)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_and_class_names_round_trip() {
        for k in MessageKind::ALL {
            assert_eq!(k.name().parse::<MessageKind>().unwrap(), k);
        }
        for c in [
            ValueClass::Secret,
            ValueClass::Share(RoleTag::Derived(4)),
            ValueClass::Mask,
            ValueClass::Key(RoleTag::Protected),
            ValueClass::EncryptedMask,
            ValueClass::MaskedShare,
            ValueClass::Control,
        ] {
            assert_eq!(c.to_string().parse::<ValueClass>().unwrap(), c);
        }
        assert!("share".parse::<ValueClass>().is_err());
    }

    #[test]
    fn flag_flip() {
        assert_eq!(Payload::Flag(true).flip_bit(0).unwrap(), Payload::Flag(false));
        assert!(Payload::Flag(true).flip_bit(1).is_err());
    }

    #[test]
    fn from_parts_rejects_unordered_seq() {
        let cfg = EnvSummary {
            bits: 8,
            dealer: RandDescriptor::Seeded { seed: 0 },
            owner: RandDescriptor::Seeded { seed: 0 },
            accumulator: RandDescriptor::Seeded { seed: 0 },
            assignment: "identity".into(),
            tamper: vec![],
        };
        let m = |seq| Message {
            seq,
            from: PartyId::Dealer,
            to: PartyId::Owner,
            kind: MessageKind::Ack,
            class: ValueClass::Control,
            index: None,
            payload: Payload::Flag(true),
        };
        assert!(Transcript::from_parts(cfg.clone(), vec![m(1), m(2)]).is_ok());
        assert!(Transcript::from_parts(cfg, vec![m(2), m(2)]).is_err());
    }
}
