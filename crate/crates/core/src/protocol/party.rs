use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kgh::RoleTag;

/// A modeled party. Participants are numbered from 1 within their set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PartyId {
    Dealer,
    Owner,
    AccumulatorDevice,
    Participant { set: RoleTag, index: usize },
}

impl PartyId {
    pub fn participant(set: RoleTag, index: usize) -> Self {
        PartyId::Participant { set, index }
    }
}

/// `dealer`, `owner`, `acc`, or `p<tag>.<index>` such as `p2.1` or `pp.3`.
impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartyId::Dealer => f.write_str("dealer"),
            PartyId::Owner => f.write_str("owner"),
            PartyId::AccumulatorDevice => f.write_str("acc"),
            PartyId::Participant { set, index } => write!(f, "p{set}.{index}"),
        }
    }
}

impl FromStr for PartyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dealer" => Ok(PartyId::Dealer),
            "owner" => Ok(PartyId::Owner),
            "acc" | "accumulator" => Ok(PartyId::AccumulatorDevice),
            _ => {
                let rest = s
                    .strip_prefix('p')
                    .ok_or_else(|| Error::Parse(format!("unknown party {s:?}")))?;
                let (tag, index) = rest
                    .split_once('.')
                    .ok_or_else(|| Error::Parse(format!("participant {s:?} needs <tag>.<index>")))?;
                let index: usize = index
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad participant index in {s:?}")))?;
                if index == 0 {
                    return Err(Error::Parse(format!("participant indices start at 1: {s:?}")));
                }
                Ok(PartyId::Participant {
                    set: tag.parse()?,
                    index,
                })
            }
        }
    }
}

impl Serialize for PartyId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PartyId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}
