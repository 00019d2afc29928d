use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::devices::{derive_seed, RandSource};
use crate::error::{Error, Result};
use crate::protocol::transcript::{EnvSummary, MessageKind, Payload, Transcript, ValueClass};
use crate::protocol::PartyId;
use crate::vector::{SchemeParams, ShareVector};

/// What a tamper rule does to the matched message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TamperAction {
    /// Flip one payload bit before delivery (bit 0 is the least significant).
    FlipBit(usize),
    /// Deliver an extra copy of the message to another party.
    CopyTo(PartyId),
}

/// `<party>:<kind>:<occurrence>:bit:<index>` or
/// `<party>:<kind>:<occurrence>:copy:<party>`. Matches the occurrence-th
/// message of `kind` emitted by `party` (1-based) over the whole run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TamperRule {
    pub party: PartyId,
    pub kind: MessageKind,
    pub occurrence: usize,
    pub action: TamperAction,
}

impl fmt::Display for TamperRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:", self.party, self.kind, self.occurrence)?;
        match self.action {
            TamperAction::FlipBit(b) => write!(f, "bit:{b}"),
            TamperAction::CopyTo(p) => write!(f, "copy:{p}"),
        }
    }
}

impl FromStr for TamperRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("tamper rule {s:?} is not <party>:<kind>:<occurrence>:bit:<index>"));
        let parts: Vec<&str> = s.split(':').collect();
        let [party, kind, occurrence, action, arg] = parts[..] else {
            return Err(bad());
        };
        let occurrence: usize = occurrence.parse().map_err(|_| bad())?;
        if occurrence == 0 {
            return Err(bad());
        }
        let action = match action {
            "bit" => TamperAction::FlipBit(arg.parse().map_err(|_| bad())?),
            "copy" => TamperAction::CopyTo(arg.parse()?),
            _ => return Err(bad()),
        };
        Ok(TamperRule {
            party: party.parse()?,
            kind: kind.parse()?,
            occurrence,
            action,
        })
    }
}

/// How SafeShares assigns protected shares to participants. `Fixed` holds
/// `π` with `π[i - 1]` the participant receiving share `i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum AssignmentRule {
    Identity,
    #[default]
    Shuffle,
    Fixed(Vec<usize>),
}

impl fmt::Display for AssignmentRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssignmentRule::Identity => f.write_str("identity"),
            AssignmentRule::Shuffle => f.write_str("shuffle"),
            AssignmentRule::Fixed(p) => {
                let parts: Vec<String> = p.iter().map(|j| j.to_string()).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl FromStr for AssignmentRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(AssignmentRule::Identity),
            "shuffle" => Ok(AssignmentRule::Shuffle),
            _ => s
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(AssignmentRule::Fixed)
                .map_err(|_| Error::Parse(format!("bad assignment {s:?}"))),
        }
    }
}

/// The identification step run before a key is released.
pub trait Identification: Send {
    fn identify(&mut self, participant: PartyId) -> bool;
}

/// Compares the token a participant presents against the one registered for
/// it. A participant with neither token registered nor presented passes.
#[derive(Debug, Clone, Default)]
pub struct TokenIdentification {
    registered: BTreeMap<PartyId, u64>,
    presented: BTreeMap<PartyId, u64>,
}

impl TokenIdentification {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, participant: PartyId, token: u64) -> &mut Self {
        self.registered.insert(participant, token);
        self
    }

    pub fn present(&mut self, participant: PartyId, token: u64) -> &mut Self {
        self.presented.insert(participant, token);
        self
    }
}

impl Identification for TokenIdentification {
    fn identify(&mut self, participant: PartyId) -> bool {
        self.registered.get(&participant) == self.presented.get(&participant)
    }
}

/// Everything a protocol run needs: parameters, one randomness source per
/// randomness-owning party, tamper rules, and the transcript being written.
pub struct ProtocolEnv {
    params: SchemeParams,
    pub(crate) dealer_rand: RandSource,
    pub(crate) owner_rand: RandSource,
    pub(crate) acc_rand: RandSource,
    tamper: Vec<TamperRule>,
    pub(crate) assignment: AssignmentRule,
    pub(crate) identification: Box<dyn Identification>,
    emitted: BTreeMap<(PartyId, MessageKind), usize>,
    transcript: Transcript,
}

impl ProtocolEnv {
    /// Binary environment whose three parties draw from seeds derived from
    /// `seed`.
    pub fn seeded(params: SchemeParams, seed: u64) -> Result<Self> {
        Self::new(
            params,
            RandSource::seeded(derive_seed(seed, 0)),
            RandSource::seeded(derive_seed(seed, 1)),
            RandSource::seeded(derive_seed(seed, 2)),
        )
    }

    pub fn new(
        params: SchemeParams,
        dealer: RandSource,
        owner: RandSource,
        accumulator: RandSource,
    ) -> Result<Self> {
        params.ensure_binary()?;
        let mut env = ProtocolEnv {
            params,
            dealer_rand: dealer,
            owner_rand: owner,
            acc_rand: accumulator,
            tamper: Vec::new(),
            assignment: AssignmentRule::default(),
            identification: Box::new(TokenIdentification::default()),
            emitted: BTreeMap::new(),
            transcript: Transcript::new(EnvSummary::default()),
        };
        env.refresh_summary();
        Ok(env)
    }

    fn refresh_summary(&mut self) {
        let summary = EnvSummary {
            bits: self.params.dimension(),
            dealer: self.dealer_rand.descriptor(),
            owner: self.owner_rand.descriptor(),
            accumulator: self.acc_rand.descriptor(),
            assignment: self.assignment.to_string(),
            tamper: self.tamper.iter().map(|r| r.to_string()).collect(),
        };
        *self.transcript.config_mut() = summary;
    }

    pub fn with_tamper(mut self, rule: TamperRule) -> Self {
        self.tamper.push(rule);
        self.refresh_summary();
        self
    }

    pub fn with_assignment(mut self, rule: AssignmentRule) -> Self {
        self.assignment = rule;
        self.refresh_summary();
        self
    }

    pub fn with_identification(mut self, id: impl Identification + 'static) -> Self {
        self.identification = Box::new(id);
        self
    }

    pub fn params(&self) -> SchemeParams {
        self.params
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }

    pub fn dealer_rand(&self) -> &RandSource {
        &self.dealer_rand
    }

    pub fn owner_rand(&self) -> &RandSource {
        &self.owner_rand
    }

    pub fn accumulator_rand(&self) -> &RandSource {
        &self.acc_rand
    }

    /// Records a message and returns the payload as the recipient sees it,
    /// after any matching tamper rule has been applied.
    pub(crate) fn send(
        &mut self,
        from: PartyId,
        to: PartyId,
        kind: MessageKind,
        class: ValueClass,
        index: Option<usize>,
        payload: Payload,
    ) -> Result<Payload> {
        let count = self.emitted.entry((from, kind)).or_insert(0);
        *count += 1;
        let occurrence = *count;

        let mut delivered = payload;
        let mut copies = Vec::new();
        for rule in &self.tamper {
            if rule.party == from && rule.kind == kind && rule.occurrence == occurrence {
                match rule.action {
                    TamperAction::FlipBit(bit) => delivered = delivered.flip_bit(bit)?,
                    TamperAction::CopyTo(target) => copies.push(target),
                }
            }
        }
        self.transcript
            .push(from, to, kind, class, index, delivered.clone());
        for target in copies {
            self.transcript
                .push(from, target, kind, class, index, delivered.clone());
        }
        Ok(delivered)
    }

    pub(crate) fn send_vector(
        &mut self,
        from: PartyId,
        to: PartyId,
        kind: MessageKind,
        class: ValueClass,
        index: usize,
        v: &ShareVector,
    ) -> Result<ShareVector> {
        match self.send(from, to, kind, class, Some(index), Payload::Vector(v.clone()))? {
            Payload::Vector(v) => Ok(v),
            Payload::Flag(_) => Err(Error::UnexpectedPayload { to }),
        }
    }

    pub(crate) fn send_flag(
        &mut self,
        from: PartyId,
        to: PartyId,
        kind: MessageKind,
        index: usize,
        flag: bool,
    ) -> Result<bool> {
        match self.send(from, to, kind, ValueClass::Control, Some(index), Payload::Flag(flag))? {
            Payload::Flag(b) => Ok(b),
            Payload::Vector(_) => Err(Error::UnexpectedPayload { to }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kgh::RoleTag;

    #[test]
    fn tamper_grammar_round_trips() {
        let r: TamperRule = "dealer:key:2:bit:0".parse().unwrap();
        assert_eq!(r.party, PartyId::Dealer);
        assert_eq!(r.kind, MessageKind::Key);
        assert_eq!(r.occurrence, 2);
        assert_eq!(r.action, TamperAction::FlipBit(0));
        assert_eq!(r.to_string(), "dealer:key:2:bit:0");

        let c: TamperRule = "pp.1:ack:1:copy:owner".parse().unwrap();
        assert_eq!(c.party, PartyId::participant(RoleTag::Protected, 1));
        assert_eq!(c.action, TamperAction::CopyTo(PartyId::Owner));
        assert_eq!(c.to_string().parse::<TamperRule>().unwrap(), c);

        for bad in ["dealer:key:0:bit:0", "dealer:key:1:bit", "dealer:nope:1:bit:0", "dealer:key:1:zap:0"] {
            assert!(bad.parse::<TamperRule>().is_err(), "{bad}");
        }
    }

    #[test]
    fn assignment_rule_parses() {
        assert_eq!("identity".parse::<AssignmentRule>().unwrap(), AssignmentRule::Identity);
        assert_eq!("2,1".parse::<AssignmentRule>().unwrap(), AssignmentRule::Fixed(vec![2, 1]));
        assert_eq!(AssignmentRule::Fixed(vec![2, 1]).to_string(), "2,1");
        assert!("x,1".parse::<AssignmentRule>().is_err());
    }

    #[test]
    fn token_identification() {
        let p1 = PartyId::participant(RoleTag::Protected, 1);
        let p2 = PartyId::participant(RoleTag::Protected, 2);
        let mut id = TokenIdentification::new();
        id.register(p1, 7).present(p1, 7).register(p2, 9).present(p2, 8);
        assert!(id.identify(p1));
        assert!(!id.identify(p2));
        assert!(id.identify(PartyId::participant(RoleTag::Protected, 3)));
    }

    #[test]
    fn send_applies_flip_and_copy_on_matching_occurrence() {
        let p = SchemeParams::binary(8).unwrap();
        let mut env = ProtocolEnv::seeded(p, 1)
            .unwrap()
            .with_tamper("dealer:key:2:bit:0".parse().unwrap())
            .with_tamper("dealer:key:2:copy:owner".parse().unwrap());
        let v = ShareVector::from_bytes(p, &[0x10]).unwrap();
        let to = PartyId::participant(RoleTag::Protected, 1);
        let class = ValueClass::Key(RoleTag::Protected);
        let first = env.send_vector(PartyId::Dealer, to, MessageKind::Key, class, 1, &v).unwrap();
        let second = env.send_vector(PartyId::Dealer, to, MessageKind::Key, class, 2, &v).unwrap();
        assert_eq!(first, v);
        assert_eq!(second.to_bytes().unwrap(), vec![0x11]);
        let steps = env.transcript().steps();
        assert_eq!(steps.len(), 3);
        assert_eq!(steps[2].to, PartyId::Owner);
        assert_eq!(steps.iter().map(|m| m.seq).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(env.transcript().config().tamper.len(), 2);
    }

    #[test]
    fn non_binary_env_rejected() {
        assert!(ProtocolEnv::seeded(SchemeParams::new(3, 4).unwrap(), 0).is_err());
    }
}
