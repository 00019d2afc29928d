//! Automatic sharing of a known secret, and the pre-positioned variant:
//! masked shares are handed out first and activated by key release later.

use crate::devices::Accumulator;
use crate::error::{Error, Result};
use crate::kgh::{generate_mask_set, AuthorizedShareSet, MaskSet, RoleTag};
use crate::protocol::env::AssignmentRule;
use crate::protocol::transcript::{MessageKind, Payload, ValueClass};
use crate::protocol::{PartyId, ProtocolEnv};
use crate::vector::{SchemeParams, ShareVector};

/// Upper bound on key regenerations in SafeShares. Hitting it means the
/// dealer's randomness is broken.
pub const KEY_REGENERATION_LIMIT: usize = 64;

const ACC: PartyId = PartyId::AccumulatorDevice;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Delivery {
    Participants,
    Owner,
}

/// Accumulator side of FastShare: returns the owner share set and delivers
/// it either to the `o` participants or back to the owner.
fn fast_share_to(
    secret: &ShareVector,
    n: usize,
    env: &mut ProtocolEnv,
    delivery: Delivery,
) -> Result<AuthorizedShareSet> {
    if n == 0 {
        return Err(Error::ZeroCount);
    }
    let params = env.params();
    if secret.params() != params {
        return Err(Error::ParamMismatch {
            expected: params,
            actual: secret.params(),
        });
    }
    let mut acc = Accumulator::new(params)?;
    acc.reset();
    let mut shares = Vec::with_capacity(n);
    for _ in 1..n {
        let s = env.owner_rand.next_vector(params)?;
        acc.store(&s)?;
        shares.push(s);
    }
    let received = match env.send(
        PartyId::Owner,
        ACC,
        MessageKind::Secret,
        ValueClass::Secret,
        None,
        Payload::Vector(secret.clone()),
    )? {
        Payload::Vector(v) => v,
        Payload::Flag(_) => return Err(Error::UnexpectedPayload { to: ACC }),
    };
    acc.store(&received)?;
    shares.push(acc.read());

    let mut delivered = Vec::with_capacity(n);
    for (i, s) in shares.iter().enumerate() {
        let to = match delivery {
            Delivery::Participants => PartyId::participant(RoleTag::Owner, i + 1),
            Delivery::Owner => PartyId::Owner,
        };
        delivered.push(env.send_vector(
            ACC,
            to,
            MessageKind::OwnerShare,
            ValueClass::Share(RoleTag::Owner),
            i + 1,
            s,
        )?);
    }
    AuthorizedShareSet::new(RoleTag::Owner, delivered)
}

/// `FastShare(S, n)`: `n - 1` random shares plus the accumulator read after
/// the secret is stored on top of them.
pub fn fast_share(secret: &ShareVector, n: usize, env: &mut ProtocolEnv) -> Result<AuthorizedShareSet> {
    fast_share_to(secret, n, env, Delivery::Participants)
}

/// Result of SafeShares: the protected shares as held by the participants
/// plus the dealer's and owner's private material.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafeSharesState {
    params: SchemeParams,
    /// `held[j - 1]` is the protected share stored by participant `j`.
    held: Vec<ShareVector>,
    keys: Vec<ShareVector>,
    masks: MaskSet,
    owner_shares: AuthorizedShareSet,
    /// `assignment[i - 1]` is the participant that received share `i`.
    assignment: Vec<usize>,
    key_regenerations: usize,
}

impl SafeSharesState {
    pub fn from_parts(
        held: Vec<ShareVector>,
        keys: Vec<ShareVector>,
        masks: MaskSet,
        owner_shares: AuthorizedShareSet,
        assignment: Vec<usize>,
        key_regenerations: usize,
    ) -> Result<Self> {
        let n = held.len();
        if n == 0 {
            return Err(Error::ZeroCount);
        }
        for len in [keys.len(), masks.len(), owner_shares.len()] {
            if len != n {
                return Err(Error::CardinalityMismatch {
                    expected: n,
                    actual: len,
                });
            }
        }
        check_permutation(&assignment, n)?;
        let params = owner_shares.params();
        if held.iter().chain(&keys).any(|v| v.params() != params) || masks.params() != params {
            return Err(Error::ParamMismatch {
                expected: params,
                actual: masks.params(),
            });
        }
        Ok(SafeSharesState {
            params,
            held,
            keys,
            masks,
            owner_shares,
            assignment,
            key_regenerations,
        })
    }

    pub fn params(&self) -> SchemeParams {
        self.params
    }

    pub fn n(&self) -> usize {
        self.held.len()
    }

    /// `U^(p)` indexed by participant.
    pub fn protected_set(&self) -> AuthorizedShareSet {
        AuthorizedShareSet::new(RoleTag::Protected, self.held.clone())
            .expect("non-empty by construction")
    }

    pub fn held(&self) -> &[ShareVector] {
        &self.held
    }

    pub fn keys(&self) -> &[ShareVector] {
        &self.keys
    }

    pub fn masks(&self) -> &MaskSet {
        &self.masks
    }

    pub fn owner_shares(&self) -> &AuthorizedShareSet {
        &self.owner_shares
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn key_regenerations(&self) -> usize {
        self.key_regenerations
    }
}

fn check_permutation(p: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if p.len() != n {
        return Err(Error::InvalidAssignment(n));
    }
    for &j in p {
        if j == 0 || j > n || seen[j - 1] {
            return Err(Error::InvalidAssignment(n));
        }
        seen[j - 1] = true;
    }
    Ok(())
}

/// Draws the dealer's keys. At the last index the cumulative XOR must be
/// non-zero; otherwise the key is removed from the accumulator and drawn
/// again.
fn draw_key(
    env: &mut ProtocolEnv,
    acc: &mut Accumulator,
    i: usize,
    n: usize,
    regenerations: &mut usize,
) -> Result<ShareVector> {
    let params = env.params();
    loop {
        let k = env.dealer_rand.next_vector(params)?;
        acc.store(&k)?;
        if i == n && acc.read().is_zero() {
            acc.store(&k)?;
            if *regenerations == KEY_REGENERATION_LIMIT {
                return Err(Error::KeyRegenerationExhausted {
                    attempts: *regenerations,
                });
            }
            *regenerations += 1;
            continue;
        }
        return Ok(k);
    }
}

/// `SafeShares(S, n)`. The dealer masks a zero-sum set with keys whose XOR is
/// forced non-zero; the owner lays the encrypted masks over a FastShare
/// split and scatters the results to participants.
pub fn safe_shares(secret: &ShareVector, n: usize, env: &mut ProtocolEnv) -> Result<SafeSharesState> {
    if n == 0 {
        return Err(Error::ZeroCount);
    }
    let params = env.params();
    if let AssignmentRule::Fixed(p) = &env.assignment {
        check_permutation(p, n)?;
    }

    // Dealer
    let masks = generate_mask_set(n, &mut env.acc_rand, params)?;
    let mut key_acc = Accumulator::new(params)?;
    key_acc.reset();

    // Owner
    let owner_shares = fast_share_to(secret, n, env, Delivery::Owner)?;

    let mut keys = Vec::with_capacity(n);
    let mut held: Vec<Option<ShareVector>> = vec![None; n];
    let mut assignment = Vec::with_capacity(n);
    let mut eligible: Vec<usize> = (1..=n).collect();
    let mut regenerations = 0;

    for i in 1..=n {
        let k = draw_key(env, &mut key_acc, i, n, &mut regenerations)?;
        let c = masks.vectors()[i - 1].add(&k)?;
        keys.push(k);
        let c = env.send_vector(
            PartyId::Dealer,
            PartyId::Owner,
            MessageKind::EnvelopeShare,
            ValueClass::EncryptedMask,
            i,
            &c,
        )?;

        let protected = c.add(&owner_shares.shares()[i - 1])?;
        let j = match &env.assignment {
            AssignmentRule::Identity => i,
            AssignmentRule::Fixed(p) => p[i - 1],
            AssignmentRule::Shuffle => {
                let pick = if eligible.len() == 1 {
                    0
                } else {
                    env.owner_rand.next_index(eligible.len())?
                };
                eligible.remove(pick)
            }
        };
        assignment.push(j);
        let received = env.send_vector(
            PartyId::Owner,
            PartyId::participant(RoleTag::Protected, j),
            MessageKind::EnvelopeShare,
            ValueClass::Share(RoleTag::Protected),
            j,
            &protected,
        )?;
        held[j - 1] = Some(received);
    }

    SafeSharesState::from_parts(
        held.into_iter().map(|h| h.expect("assignment is a bijection")).collect(),
        keys,
        masks,
        owner_shares,
        assignment,
        regenerations,
    )
}

/// Per-participant outcome of activation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Activation {
    /// `activated[i - 1]` is `None` when participant `i` failed identification.
    pub activated: Vec<Option<ShareVector>>,
    pub pending: Vec<usize>,
}

impl Activation {
    pub fn into_set(self) -> Result<AuthorizedShareSet> {
        if !self.pending.is_empty() {
            return Err(Error::IdentificationFailed {
                pending: self.pending,
            });
        }
        AuthorizedShareSet::new(
            RoleTag::Activated,
            self.activated.into_iter().flatten().collect(),
        )
    }
}

/// Runs ActivateShares and reports which participants are still pending.
pub fn activate_shares_partial(state: &SafeSharesState, env: &mut ProtocolEnv) -> Result<Activation> {
    if state.params() != env.params() {
        return Err(Error::ParamMismatch {
            expected: env.params(),
            actual: state.params(),
        });
    }
    let mut activated = Vec::with_capacity(state.n());
    let mut pending = Vec::new();
    for i in 1..=state.n() {
        let p = PartyId::participant(RoleTag::Protected, i);
        env.send_flag(p, PartyId::Dealer, MessageKind::KeyRequest, i, true)?;
        let ok = env.identification.identify(p);
        env.send_flag(PartyId::Dealer, p, MessageKind::Identification, i, ok)?;
        if !ok {
            pending.push(i);
            activated.push(None);
            continue;
        }
        let k = env.send_vector(
            PartyId::Dealer,
            p,
            MessageKind::Key,
            ValueClass::Key(RoleTag::Protected),
            i,
            &state.keys[i - 1],
        )?;
        activated.push(Some(state.held[i - 1].add(&k)?));
        env.send_flag(p, PartyId::Dealer, MessageKind::Ack, i, true)?;
    }
    Ok(Activation { activated, pending })
}

/// `ActivateShares`: participant `i` receives `k_i` after identification and
/// removes it from its protected share.
pub fn activate_shares(state: &SafeSharesState, env: &mut ProtocolEnv) -> Result<AuthorizedShareSet> {
    activate_shares_partial(state, env)?.into_set()
}
