//! Generation of a fresh random secret as two authorized sets, and
//! replication of an authorized set into a new one of equal, larger or
//! smaller cardinality. The combined secret never exists as a value here.

use crate::devices::Accumulator;
use crate::error::{Error, Result};
use crate::kgh::{check_zero_sum, generate_mask_set, AuthorizedShareSet, MaskSet, RoleTag};
use crate::protocol::transcript::{MessageKind, ValueClass};
use crate::protocol::{PartyId, ProtocolEnv};
use crate::vector::ShareVector;

const ACC: PartyId = PartyId::AccumulatorDevice;

fn generate(env: &mut ProtocolEnv, n: usize) -> Result<MaskSet> {
    let params = env.params();
    generate_mask_set(n, &mut env.acc_rand, params)
}

fn ensure_params(env: &ProtocolEnv, set: &AuthorizedShareSet) -> Result<()> {
    if set.params() != env.params() {
        return Err(Error::ParamMismatch {
            expected: env.params(),
            actual: set.params(),
        });
    }
    Ok(())
}

fn deliver(
    env: &mut ProtocolEnv,
    tag: RoleTag,
    index: usize,
    share: &ShareVector,
) -> Result<ShareVector> {
    env.send_vector(
        ACC,
        PartyId::participant(tag, index),
        MessageKind::DerivedShare,
        ValueClass::Share(tag),
        index,
        share,
    )
}

/// `SetGenerateM(d, n)`: a fresh random secret held as a template set of
/// `d` shares and a master set of `n` shares.
pub fn set_generate_m(
    d: usize,
    n: usize,
    env: &mut ProtocolEnv,
) -> Result<(AuthorizedShareSet, AuthorizedShareSet)> {
    if d == 0 || n == 0 {
        return Err(Error::ZeroCount);
    }
    let masks = generate(env, d + n)?;
    let mut template = Vec::with_capacity(d);
    for i in 1..=d {
        template.push(deliver(env, RoleTag::Template, i, &masks.vectors()[i - 1])?);
    }
    let mut master = Vec::with_capacity(n);
    for i in d + 1..=d + n {
        let j = i - d;
        master.push(deliver(env, RoleTag::Master, j, &masks.vectors()[i - 1])?);
    }
    Ok((
        AuthorizedShareSet::new(RoleTag::Template, template)?,
        AuthorizedShareSet::new(RoleTag::Master, master)?,
    ))
}

/// Sends `m_i` to every source participant and collects their local
/// `ω_i = s_i ⊕ m_i`. Returns the values each participant computed.
fn mask_sources(
    env: &mut ProtocolEnv,
    source: &AuthorizedShareSet,
    masks: &[ShareVector],
) -> Result<Vec<ShareVector>> {
    let tag = source.role();
    let mut omegas = Vec::with_capacity(source.len());
    for (i, share) in source.shares().iter().enumerate() {
        let m = env.send_vector(
            ACC,
            PartyId::participant(tag, i + 1),
            MessageKind::MaskElement,
            ValueClass::Mask,
            i + 1,
            &masks[i],
        )?;
        omegas.push(share.add(&m)?);
    }
    Ok(omegas)
}

fn collect_omega(
    env: &mut ProtocolEnv,
    tag: RoleTag,
    index: usize,
    omega: &ShareVector,
) -> Result<ShareVector> {
    env.send_vector(
        PartyId::participant(tag, index),
        ACC,
        MessageKind::MaskedShare,
        ValueClass::MaskedShare,
        index,
        omega,
    )
}

/// Procedure 3 body over the first `2n` mask elements.
fn replicate_core(
    env: &mut ProtocolEnv,
    masks: &[ShareVector],
    source: &AuthorizedShareSet,
    target: RoleTag,
) -> Result<Vec<ShareVector>> {
    let n = source.len();
    let omegas = mask_sources(env, source, masks)?;
    let mut derived = Vec::with_capacity(n);
    for i in 1..=n {
        let w = collect_omega(env, source.role(), i, &omegas[i - 1])?;
        let s = w.add(&masks[i + n - 1])?;
        derived.push(deliver(env, target, i, &s)?);
    }
    Ok(derived)
}

/// `SetReplicate(M, U)`. `masks` must hold `2|U|` elements summing to zero.
pub fn set_replicate(
    masks: &MaskSet,
    source: &AuthorizedShareSet,
    env: &mut ProtocolEnv,
) -> Result<AuthorizedShareSet> {
    ensure_params(env, source)?;
    if masks.len() != 2 * source.len() {
        return Err(Error::CardinalityMismatch {
            expected: 2 * source.len(),
            actual: masks.len(),
        });
    }
    if !check_zero_sum(masks) {
        return Err(Error::NonZeroMaskSum);
    }
    let target = source.role().next_derived();
    let derived = replicate_core(env, masks.vectors(), source, target)?;
    AuthorizedShareSet::new(target, derived)
}

/// `EqualSetReplicate(U)`, also returning the mask set it generated.
pub fn equal_set_replicate_with_masks(
    source: &AuthorizedShareSet,
    env: &mut ProtocolEnv,
) -> Result<(AuthorizedShareSet, MaskSet)> {
    ensure_params(env, source)?;
    let masks = generate(env, 2 * source.len())?;
    let set = set_replicate(&masks, source, env)?;
    Ok((set, masks))
}

pub fn equal_set_replicate(
    source: &AuthorizedShareSet,
    env: &mut ProtocolEnv,
) -> Result<AuthorizedShareSet> {
    equal_set_replicate_with_masks(source, env).map(|(set, _)| set)
}

/// `SetReplicateToBigger(U, d)` for `d > |U|`.
pub fn set_replicate_to_bigger(
    source: &AuthorizedShareSet,
    d: usize,
    env: &mut ProtocolEnv,
) -> Result<AuthorizedShareSet> {
    ensure_params(env, source)?;
    let n = source.len();
    if d <= n {
        return Err(Error::InvalidTarget {
            mode: "bigger",
            target: d,
            source_len: n,
        });
    }
    let masks = generate(env, n + d)?;
    let m = masks.vectors();
    let target = source.role().next_derived();
    let mut derived = replicate_core(env, &m[..2 * n], source, target)?;
    for i in n + 1..=d {
        derived.push(deliver(env, target, i, &m[i + n - 1])?);
    }
    AuthorizedShareSet::new(target, derived)
}

/// `SetReplicateToSmaller(U, d)` for `1 <= d < |U|`. The tail
/// `ω_d..ω_n` is folded into the last share through the accumulator.
pub fn set_replicate_to_smaller(
    source: &AuthorizedShareSet,
    d: usize,
    env: &mut ProtocolEnv,
) -> Result<AuthorizedShareSet> {
    ensure_params(env, source)?;
    let n = source.len();
    if d == 0 || d >= n {
        return Err(Error::InvalidTarget {
            mode: "smaller",
            target: d,
            source_len: n,
        });
    }
    let masks = generate(env, n + d - 1)?;
    let m = masks.vectors();
    let target = source.role().next_derived();
    let omegas = mask_sources(env, source, &m[..n])?;

    let mut derived = Vec::with_capacity(d);
    for i in 1..d {
        let w = collect_omega(env, source.role(), i, &omegas[i - 1])?;
        let s = w.add(&m[i + n - 1])?;
        derived.push(deliver(env, target, i, &s)?);
    }

    let mut acc = Accumulator::new(env.params())?;
    acc.reset();
    for i in d..=n {
        let w = collect_omega(env, source.role(), i, &omegas[i - 1])?;
        acc.store(&w)?;
    }
    derived.push(deliver(env, target, d, &acc.read())?);
    AuthorizedShareSet::new(target, derived)
}

/// Replication mode, for callers that pick the algorithm at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReplicationMode {
    Equal,
    Bigger(usize),
    Smaller(usize),
}

pub fn replicate(
    mode: ReplicationMode,
    source: &AuthorizedShareSet,
    env: &mut ProtocolEnv,
) -> Result<AuthorizedShareSet> {
    match mode {
        ReplicationMode::Equal => equal_set_replicate(source, env),
        ReplicationMode::Bigger(d) => set_replicate_to_bigger(source, d, env),
        ReplicationMode::Smaller(d) => set_replicate_to_smaller(source, d, env),
    }
}
