//! KGH additive secret sharing: authorized sets, mask sets and the
//! zero-sum / partition-balance predicates.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::devices::{Accumulator, RandSource};
use crate::error::{Error, Result};
use crate::vector::{combine, SchemeParams, ShareVector};

/// Which copy of the secret an authorized set belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RoleTag {
    /// `U^(1)`
    Template,
    /// `U^(2)`
    Master,
    /// `U^(3)`, `U^(4)`, ... produced by replication.
    Derived(u32),
    Owner,
    Protected,
    Activated,
}

impl RoleTag {
    /// Tag for the set replicated from a set carrying `self`.
    pub fn next_derived(self) -> RoleTag {
        match self {
            RoleTag::Derived(g) => RoleTag::Derived(g + 1),
            _ => RoleTag::Derived(3),
        }
    }
}

impl fmt::Display for RoleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoleTag::Template => f.write_str("1"),
            RoleTag::Master => f.write_str("2"),
            RoleTag::Derived(g) => write!(f, "{g}"),
            RoleTag::Owner => f.write_str("o"),
            RoleTag::Protected => f.write_str("p"),
            RoleTag::Activated => f.write_str("a"),
        }
    }
}

impl FromStr for RoleTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(RoleTag::Template),
            "2" => Ok(RoleTag::Master),
            "o" => Ok(RoleTag::Owner),
            "p" => Ok(RoleTag::Protected),
            "a" => Ok(RoleTag::Activated),
            _ => match s.parse::<u32>() {
                Ok(g) if g >= 3 => Ok(RoleTag::Derived(g)),
                _ => Err(Error::Parse(format!("unknown role tag {s:?}"))),
            },
        }
    }
}

impl Serialize for RoleTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RoleTag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An ordered, role-tagged collection of shares that combine to a secret.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthorizedShareSet {
    role: RoleTag,
    params: SchemeParams,
    shares: Vec<ShareVector>,
}

impl AuthorizedShareSet {
    pub fn new(role: RoleTag, shares: Vec<ShareVector>) -> Result<Self> {
        let first = shares.first().ok_or(Error::EmptyShareSet)?;
        let params = first.params();
        if let Some(bad) = shares.iter().find(|s| s.params() != params) {
            return Err(Error::MixedParams {
                left: params,
                right: bad.params(),
            });
        }
        Ok(AuthorizedShareSet {
            role,
            params,
            shares,
        })
    }

    pub fn role(&self) -> RoleTag {
        self.role
    }

    pub fn params(&self) -> SchemeParams {
        self.params
    }

    pub fn shares(&self) -> &[ShareVector] {
        &self.shares
    }

    pub fn len(&self) -> usize {
        self.shares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shares.is_empty()
    }

    /// 1-based access, matching participant numbering.
    pub fn share(&self, index: usize) -> Option<&ShareVector> {
        index.checked_sub(1).and_then(|i| self.shares.get(i))
    }

    /// `C(U)`
    pub fn combine(&self) -> ShareVector {
        combine(self.params, &self.shares).expect("shares share params by construction")
    }

    pub fn into_shares(self) -> Vec<ShareVector> {
        self.shares
    }
}

/// A set of vectors meant to sum to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskSet {
    params: SchemeParams,
    vectors: Vec<ShareVector>,
}

impl MaskSet {
    pub fn new(params: SchemeParams, vectors: Vec<ShareVector>) -> Result<Self> {
        if let Some(bad) = vectors.iter().find(|v| v.params() != params) {
            return Err(Error::MixedParams {
                left: params,
                right: bad.params(),
            });
        }
        Ok(MaskSet { params, vectors })
    }

    pub fn params(&self) -> SchemeParams {
        self.params
    }

    pub fn vectors(&self) -> &[ShareVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// 1-based access: `m_i`.
    pub fn get(&self, index: usize) -> Option<&ShareVector> {
        index.checked_sub(1).and_then(|i| self.vectors.get(i))
    }

    pub fn into_vectors(self) -> Vec<ShareVector> {
        self.vectors
    }
}

/// Splits `secret` into `t` additive shares. The first `t - 1` are drawn from
/// `rand`; the last is the secret minus their sum.
pub fn kgh_split(secret: &ShareVector, t: usize, rand: &mut RandSource) -> Result<AuthorizedShareSet> {
    if t == 0 {
        return Err(Error::ZeroCount);
    }
    let params = secret.params();
    let mut shares = Vec::with_capacity(t);
    for _ in 1..t {
        shares.push(rand.next_vector(params)?);
    }
    let partial = combine(params, &shares)?;
    shares.push(secret.sub(&partial)?);
    AuthorizedShareSet::new(RoleTag::Owner, shares)
}

/// `GenerateM(n)`: `n - 1` random vectors followed by their XOR, produced
/// through an accumulator.
pub fn generate_mask_set(n: usize, rand: &mut RandSource, params: SchemeParams) -> Result<MaskSet> {
    if n == 0 {
        return Err(Error::ZeroCount);
    }
    let mut acc = Accumulator::new(params)?;
    acc.reset();
    let mut vectors = Vec::with_capacity(n);
    for _ in 1..n {
        let m = rand.next_vector(params)?;
        acc.store(&m)?;
        vectors.push(m);
    }
    vectors.push(acc.read());
    MaskSet::new(params, vectors)
}

pub fn check_zero_sum(masks: &MaskSet) -> bool {
    combine(masks.params, &masks.vectors)
        .map(|s| s.is_zero())
        .unwrap_or(false)
}

/// Sums of the two sides of a partition of `masks`. `left` holds 1-based
/// indices; everything else is on the right.
pub fn partition_sums(masks: &MaskSet, left: &[usize]) -> Result<(ShareVector, ShareVector)> {
    let chosen: BTreeSet<usize> = left.iter().copied().collect();
    if let Some(&bad) = chosen.iter().find(|&&i| i == 0 || i > masks.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: masks.len(),
        });
    }
    let (l, r): (Vec<_>, Vec<_>) = masks
        .vectors
        .iter()
        .enumerate()
        .partition(|(i, _)| chosen.contains(&(i + 1)));
    Ok((
        combine(masks.params, l.into_iter().map(|(_, v)| v))?,
        combine(masks.params, r.into_iter().map(|(_, v)| v))?,
    ))
}
