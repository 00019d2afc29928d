//! Fully specified protocol runs. A [`ScenarioSpec`] names an algorithm,
//! its inputs and every source of randomness; [`run_scenario`] executes it
//! and returns the report lines, the output documents and an exit status.

use std::fmt;
use std::str::FromStr;

use crate::devices::{derive_seed, RandSource};
use crate::error::{Error, Result};
use crate::formats::{encode_vector, Document};
use crate::kgh::{generate_mask_set, AuthorizedShareSet};
use crate::protocol::{
    activate_shares_partial, check_visibility, fast_share, replicate, safe_shares,
    set_generate_m, AssignmentRule, ProtocolEnv, ReplicationMode, SafeSharesState, TamperRule,
    Transcript, VisibilityPolicy,
};
use crate::pvss::{
    distribute_shares_and_keys, recover_xored_keys, verify, BulletinBoard, KeyAssignment,
    VerificationResult,
};
use crate::vector::{SchemeParams, ShareVector};

/// The three parties that own a randomness source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RandOwner {
    Dealer,
    Owner,
    Accumulator,
}

impl RandOwner {
    fn seed_slot(self) -> u64 {
        match self {
            RandOwner::Dealer => 0,
            RandOwner::Owner => 1,
            RandOwner::Accumulator => 2,
        }
    }
}

impl FromStr for RandOwner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dealer" => Ok(RandOwner::Dealer),
            "owner" => Ok(RandOwner::Owner),
            "acc" | "accumulator" => Ok(RandOwner::Accumulator),
            _ => Err(Error::Parse(format!("no randomness source for party {s:?}"))),
        }
    }
}

/// First step of a `simulate` run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FirstStage {
    SetGenerate { d: usize, n: usize },
    FastShare { secret: ShareVector, n: usize },
    SafeShares { secret: ShareVector, n: usize },
}

/// Follow-up step of a `simulate` run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Activate,
    Replicate(ReplicationMode),
    Pvss,
}

impl FromStr for Stage {
    type Err = Error;

    /// `activate`, `pvss`, `equal`, `bigger:<d>` or `smaller:<d>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown stage {s:?}"));
        let d = |x: &str| x.parse::<usize>().map_err(|_| bad());
        Ok(match s.split_once(':') {
            None => match s {
                "activate" => Stage::Activate,
                "pvss" => Stage::Pvss,
                "equal" => Stage::Replicate(ReplicationMode::Equal),
                _ => return Err(bad()),
            },
            Some(("bigger", x)) => Stage::Replicate(ReplicationMode::Bigger(d(x)?)),
            Some(("smaller", x)) => Stage::Replicate(ReplicationMode::Smaller(d(x)?)),
            Some(_) => return Err(bad()),
        })
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Activate => f.write_str("activate"),
            Stage::Pvss => f.write_str("pvss"),
            Stage::Replicate(ReplicationMode::Equal) => f.write_str("equal"),
            Stage::Replicate(ReplicationMode::Bigger(d)) => write!(f, "bigger:{d}"),
            Stage::Replicate(ReplicationMode::Smaller(d)) => write!(f, "smaller:{d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Algorithm {
    GenM { n: usize },
    SetGenerate { d: usize, n: usize },
    Replicate { mode: ReplicationMode, source: AuthorizedShareSet },
    FastShare { secret: ShareVector, n: usize },
    SafeShares { secret: ShareVector, n: usize },
    Activate { state: SafeSharesState },
    PvssDistribute { set1: AuthorizedShareSet, set2: AuthorizedShareSet },
    PvssRecoverKeys { keys: KeyAssignment },
    PvssVerify { bulletin: BulletinBoard, keys: KeyAssignment },
    Simulate { first: FirstStage, then: Vec<Stage> },
    /// Audits a stored transcript; no protocol runs.
    Audit { transcript: Transcript },
}

/// Everything that determines a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioSpec {
    pub algorithm: Algorithm,
    pub bits: usize,
    /// Seeds every party without a fixture.
    pub seed: u64,
    pub fixtures: Vec<(RandOwner, Vec<ShareVector>)>,
    pub tamper: Vec<TamperRule>,
    pub assignment: AssignmentRule,
    /// Audit the run's transcript against the default visibility policy.
    pub audit: bool,
}

impl ScenarioSpec {
    pub fn new(algorithm: Algorithm, bits: usize) -> Self {
        ScenarioSpec {
            algorithm,
            bits,
            seed: 0,
            fixtures: Vec::new(),
            tamper: Vec::new(),
            assignment: AssignmentRule::default(),
            audit: false,
        }
    }

    pub fn params(&self) -> Result<SchemeParams> {
        SchemeParams::binary(self.bits)
    }

    fn source(&self, owner: RandOwner) -> RandSource {
        self.fixtures
            .iter()
            .rev()
            .find(|(o, _)| *o == owner)
            .map(|(_, v)| RandSource::fixture(v.clone()))
            .unwrap_or_else(|| RandSource::seeded(derive_seed(self.seed, owner.seed_slot())))
    }

    pub fn build_env(&self) -> Result<ProtocolEnv> {
        let mut env = ProtocolEnv::new(
            self.params()?,
            self.source(RandOwner::Dealer),
            self.source(RandOwner::Owner),
            self.source(RandOwner::Accumulator),
        )?
        .with_assignment(self.assignment.clone());
        for rule in &self.tamper {
            env = env.with_tamper(*rule);
        }
        Ok(env)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    Usage,
    Negative,
    Violation,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::Usage => 1,
            ExitStatus::Negative => 2,
            ExitStatus::Violation => 3,
        }
    }
}

/// A named output document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioOutcome {
    pub status: ExitStatus,
    pub report: Vec<String>,
    /// The algorithm's documents first, then the transcript (if a protocol
    /// ran).
    pub artifacts: Vec<Artifact>,
}

impl ScenarioOutcome {
    pub fn artifact(&self, name: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.name == name)
    }
}

struct Run {
    report: Vec<String>,
    artifacts: Vec<Artifact>,
    negative: bool,
}

impl Run {
    fn new() -> Self {
        Run {
            report: Vec::new(),
            artifacts: Vec::new(),
            negative: false,
        }
    }

    fn doc<D: Document>(&mut self, name: impl Into<String>, d: &D) -> Result<()> {
        self.artifacts.push(Artifact {
            name: name.into(),
            contents: d.to_json()?,
        });
        Ok(())
    }

    fn line(&mut self, s: impl Into<String>) {
        self.report.push(s.into());
    }

    fn set(&mut self, name: &str, u: &AuthorizedShareSet) -> Result<()> {
        self.line(format!("{name}: U^({}) = [{}]", u.role(), hex_list(u.shares())));
        self.doc(format!("{name}.json"), u)
    }

    fn verdict(&mut self, r: &VerificationResult) -> Result<()> {
        self.line(format!(
            "xored encrypted shares: {}, xored keys: {}, verdict: {}",
            hex(&r.xored_encrypted_shares),
            hex(&r.xored_keys),
            r.verdict
        ));
        self.negative |= !r.is_positive();
        self.doc("verification.json", r)
    }
}

fn hex(v: &ShareVector) -> String {
    encode_vector(v).map(|h| h.to_string()).unwrap_or_default()
}

fn hex_list(vs: &[ShareVector]) -> String {
    vs.iter().map(hex).collect::<Vec<_>>().join(", ")
}

/// Runs `spec`. Protocol errors are returned as `Err`; a NEGATIVE verdict or
/// an audit finding is reported through the exit status. A visibility
/// violation takes precedence over a NEGATIVE verdict.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<ScenarioOutcome> {
    let mut run = Run::new();
    let transcript = match &spec.algorithm {
        Algorithm::Audit { transcript } => {
            let violations = check_visibility(transcript, &VisibilityPolicy::default());
            run.line(format!(
                "{} messages, {} violations",
                transcript.len(),
                violations.len()
            ));
            run.report.extend(violations.iter().map(|v| format!("violation: {v}")));
            let status = if violations.is_empty() {
                ExitStatus::Success
            } else {
                ExitStatus::Violation
            };
            return Ok(ScenarioOutcome {
                status,
                report: run.report,
                artifacts: run.artifacts,
            });
        }
        algorithm => {
            let mut env = spec.build_env()?;
            execute(algorithm, &mut env, &mut run)?;
            env.into_transcript()
        }
    };

    let mut status = if run.negative {
        ExitStatus::Negative
    } else {
        ExitStatus::Success
    };
    if spec.audit {
        let violations = check_visibility(&transcript, &VisibilityPolicy::default());
        run.line(format!("audit: {} violations", violations.len()));
        run.report.extend(violations.iter().map(|v| format!("violation: {v}")));
        if !violations.is_empty() {
            status = ExitStatus::Violation;
        }
    }
    run.doc("transcript.json", &transcript)?;
    Ok(ScenarioOutcome {
        status,
        report: run.report,
        artifacts: run.artifacts,
    })
}

fn execute(algorithm: &Algorithm, env: &mut ProtocolEnv, run: &mut Run) -> Result<()> {
    match algorithm {
        Algorithm::GenM { n } => {
            let params = env.params();
            let m = generate_mask_set(*n, &mut env.acc_rand, params)?;
            run.line(format!("M = [{}]", hex_list(m.vectors())));
            run.doc("masks.json", &m)?;
        }
        Algorithm::SetGenerate { d, n } => {
            let (u1, u2) = set_generate_m(*d, *n, env)?;
            run.set("template", &u1)?;
            run.set("master", &u2)?;
        }
        Algorithm::Replicate { mode, source } => {
            let u = replicate(*mode, source, env)?;
            run.set("derived", &u)?;
        }
        Algorithm::FastShare { secret, n } => {
            let u = fast_share(secret, *n, env)?;
            run.set("shares", &u)?;
        }
        Algorithm::SafeShares { secret, n } => {
            let state = safe_shares(secret, *n, env)?;
            safe_report(run, &state)?;
        }
        Algorithm::Activate { state } => {
            let u = activate(state, env, run)?;
            run.set("activated", &u)?;
        }
        Algorithm::PvssDistribute { set1, set2 } => {
            let (b, k) = distribute_shares_and_keys(set1, set2, env)?;
            run.line(format!(
                "bulletin: [{}] / [{}]",
                hex_list(b.set1_entries()),
                hex_list(b.set2_entries())
            ));
            run.doc("bulletin.json", &b)?;
            run.doc("keys.json", &k)?;
        }
        Algorithm::PvssRecoverKeys { keys } => {
            let x = recover_xored_keys(keys, keys.set1_keys().len(), keys.set2_keys().len(), env)?;
            run.line(format!("xored keys: {}", hex(&x)));
        }
        Algorithm::PvssVerify { bulletin, keys } => {
            let r = verify(bulletin, keys, env)?;
            run.verdict(&r)?;
        }
        Algorithm::Simulate { first, then } => simulate(first, then, env, run)?,
        Algorithm::Audit { .. } => unreachable!("handled by run_scenario"),
    }
    Ok(())
}

fn safe_report(run: &mut Run, state: &SafeSharesState) -> Result<()> {
    run.line(format!(
        "protected shares: [{}] (key regenerations: {})",
        hex_list(state.held()),
        state.key_regenerations()
    ));
    run.doc("safeshares.json", state)
}

fn activate(state: &SafeSharesState, env: &mut ProtocolEnv, run: &mut Run) -> Result<AuthorizedShareSet> {
    let a = activate_shares_partial(state, env)?;
    if !a.pending.is_empty() {
        run.line(format!("identification failed for participants {:?}", a.pending));
    }
    a.into_set()
}

/// `simulate`: the first stage fixes a reference set (the template set, the
/// FastShare set, or the owner's FastShare split inside SafeShares); later
/// stages transform the current set, and `pvss` checks the current set
/// against the reference.
fn simulate(first: &FirstStage, then: &[Stage], env: &mut ProtocolEnv, run: &mut Run) -> Result<()> {
    let mut state = None;
    let (reference, mut current) = match first {
        FirstStage::SetGenerate { d, n } => {
            let (u1, u2) = set_generate_m(*d, *n, env)?;
            run.set("00-template", &u1)?;
            run.set("00-master", &u2)?;
            (u1, u2)
        }
        FirstStage::FastShare { secret, n } => {
            let u = fast_share(secret, *n, env)?;
            run.set("00-shares", &u)?;
            (u.clone(), u)
        }
        FirstStage::SafeShares { secret, n } => {
            let s = safe_shares(secret, *n, env)?;
            run.line(format!(
                "protected shares: [{}] (key regenerations: {})",
                hex_list(s.held()),
                s.key_regenerations()
            ));
            run.doc("00-safeshares.json", &s)?;
            let pair = (s.owner_shares().clone(), s.protected_set());
            state = Some(s);
            pair
        }
    };

    for (i, stage) in then.iter().enumerate() {
        let tag = format!("{:02}", i + 1);
        match stage {
            Stage::Activate => {
                let s = state
                    .as_ref()
                    .ok_or_else(|| Error::Parse("activate needs a preceding safeshares stage".into()))?;
                current = activate(s, env, run)?;
                run.set(&format!("{tag}-activated"), &current)?;
            }
            Stage::Replicate(mode) => {
                current = replicate(*mode, &current, env)?;
                run.set(&format!("{tag}-{stage}").replace(':', "-"), &current)?;
            }
            Stage::Pvss => {
                let (b, k) = distribute_shares_and_keys(&reference, &current, env)?;
                run.doc(format!("{tag}-bulletin.json"), &b)?;
                run.doc(format!("{tag}-keys.json"), &k)?;
                let r = verify(&b, &k, env)?;
                run.verdict(&r)?;
                let last = run.artifacts.pop().expect("verdict document");
                run.artifacts.push(Artifact {
                    name: format!("{tag}-{}", last.name),
                    ..last
                });
            }
        }
    }
    Ok(())
}
