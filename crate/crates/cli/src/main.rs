use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use asgs_core::formats::{parse_fixture, parse_hex, peek_document, Document};
use asgs_core::protocol::{AssignmentRule, ReplicationMode, SafeSharesState, TamperRule, Transcript};
use asgs_core::pvss::{BulletinBoard, KeyAssignment};
use asgs_core::scenario::{
    run_scenario, Algorithm, ExitStatus, FirstStage, RandOwner, ScenarioOutcome, ScenarioSpec,
    Stage,
};
use asgs_core::{AuthorizedShareSet, Error, SchemeParams};
use clap::{Parser, Subcommand, ValueEnum};

/// Simulator for automatic secret generation and sharing with KGH shares.
///
/// Exit codes: 0 success or POSITIVE, 1 usage or input error, 2 NEGATIVE
/// verification, 3 visibility violation under --audit.
#[derive(Debug, Parser)]
#[command(name = "asgs", version)]
struct Cli {
    /// Vector width in bits.
    #[arg(long, global = true, env = "ASGS_DEFAULT_BITS", default_value_t = 128)]
    bits: usize,

    /// Master seed for every party without a fixture.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Randomness fixture for one party (dealer, owner or acc): one hex
    /// vector per line.
    #[arg(long, global = true, value_name = "PARTY:PATH")]
    fixture: Vec<String>,

    /// Directory for output documents. Without it the main document goes
    /// to stdout and the report to stderr.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Audit the run's transcript against the default visibility policy.
    #[arg(long, global = true)]
    audit: bool,

    /// `<party>:<kind>:<occurrence>:bit:<index>` or
    /// `<party>:<kind>:<occurrence>:copy:<party>`.
    #[arg(long, global = true, value_name = "RULE")]
    tamper: Vec<String>,

    /// SafeShares envelope assignment: shuffle, identity or a permutation
    /// such as 2,1,3.
    #[arg(long, global = true, default_value = "shuffle")]
    assign: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Equal,
    Bigger,
    Smaller,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum First {
    SetGenerate,
    Fastshare,
    Safeshares,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a zero-sum mask set of n vectors.
    GenM {
        #[arg(long)]
        n: usize,
    },
    /// Generate a fresh secret as a template set of d and a master set of n
    /// shares.
    SetGenerate {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
    },
    /// Replicate a share set.
    Replicate {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Target cardinality (bigger and smaller modes).
        #[arg(long)]
        d: Option<usize>,
        /// Share-set document to replicate.
        #[arg(long)]
        input: PathBuf,
    },
    /// Split a known secret into n shares through the accumulator.
    Fastshare {
        #[arg(long)]
        secret: String,
        #[arg(long)]
        n: usize,
    },
    /// Distribute masked (pre-positioned) shares of a known secret.
    Safeshares {
        #[arg(long)]
        secret: String,
        #[arg(long)]
        n: usize,
    },
    /// Release keys for a SafeShares state document.
    Activate {
        #[arg(long)]
        state: PathBuf,
    },
    /// Publicly verifiable consistency check between two sets.
    Pvss {
        #[command(subcommand)]
        command: PvssCommand,
    },
    /// Run a first stage followed by any number of --then stages.
    Simulate {
        #[arg(value_enum)]
        first: First,
        #[arg(long)]
        secret: Option<String>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: Option<usize>,
        /// activate, pvss, equal, bigger:<d> or smaller:<d>.
        #[arg(long = "then", value_name = "STAGE")]
        then: Vec<String>,
    },
    /// Check a transcript document against the visibility policy.
    Audit { transcript: PathBuf },
}

#[derive(Debug, Subcommand)]
enum PvssCommand {
    /// Encrypt both sets with fresh keys and publish the bulletin.
    Distribute {
        #[arg(long)]
        set1: PathBuf,
        #[arg(long)]
        set2: PathBuf,
    },
    /// Recover the XOR of all keys through the accumulator.
    RecoverKeys {
        #[arg(long)]
        keys: PathBuf,
    },
    /// Compare the bulletin's XOR with the recovered key XOR.
    Verify {
        #[arg(long)]
        bulletin: PathBuf,
        #[arg(long)]
        keys: PathBuf,
    },
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Reads a document and returns it with its width.
fn load<D: Document>(path: &Path) -> Result<(D, usize), Error> {
    let text = read(path)?;
    let (_, bits) = peek_document(&text)?;
    Ok((D::from_json(&text)?, bits))
}

fn required(what: &str, v: Option<usize>) -> Result<usize, Error> {
    v.ok_or_else(|| Error::Parse(format!("--{what} is required here")))
}

fn secret(text: Option<&str>, bits: usize) -> Result<asgs_core::ShareVector, Error> {
    let text = text.ok_or_else(|| Error::Parse("--secret is required here".into()))?;
    parse_hex(text, SchemeParams::binary(bits)?)
}

fn build_spec(cli: &Cli) -> Result<ScenarioSpec, Error> {
    let mut bits = cli.bits;
    let algorithm = match &cli.command {
        Command::GenM { n } => Algorithm::GenM { n: *n },
        Command::SetGenerate { d, n } => Algorithm::SetGenerate { d: *d, n: *n },
        Command::Replicate { mode, d, input } => {
            let (source, b) = load::<AuthorizedShareSet>(input)?;
            bits = b;
            let mode = match mode {
                Mode::Equal => ReplicationMode::Equal,
                Mode::Bigger => ReplicationMode::Bigger(required("d", *d)?),
                Mode::Smaller => ReplicationMode::Smaller(required("d", *d)?),
            };
            Algorithm::Replicate { mode, source }
        }
        Command::Fastshare { secret: s, n } => Algorithm::FastShare {
            secret: secret(Some(s), bits)?,
            n: *n,
        },
        Command::Safeshares { secret: s, n } => Algorithm::SafeShares {
            secret: secret(Some(s), bits)?,
            n: *n,
        },
        Command::Activate { state } => {
            let (state, b) = load::<SafeSharesState>(state)?;
            bits = b;
            Algorithm::Activate { state }
        }
        Command::Pvss { command } => match command {
            PvssCommand::Distribute { set1, set2 } => {
                let (set1, b) = load::<AuthorizedShareSet>(set1)?;
                let (set2, _) = load::<AuthorizedShareSet>(set2)?;
                bits = b;
                Algorithm::PvssDistribute { set1, set2 }
            }
            PvssCommand::RecoverKeys { keys } => {
                let (keys, b) = load::<KeyAssignment>(keys)?;
                bits = b;
                Algorithm::PvssRecoverKeys { keys }
            }
            PvssCommand::Verify { bulletin, keys } => {
                let (bulletin, b) = load::<BulletinBoard>(bulletin)?;
                let (keys, _) = load::<KeyAssignment>(keys)?;
                bits = b;
                Algorithm::PvssVerify { bulletin, keys }
            }
        },
        Command::Simulate {
            first,
            secret: s,
            n,
            d,
            then,
        } => {
            let first = match first {
                First::SetGenerate => FirstStage::SetGenerate {
                    d: required("d", *d)?,
                    n: *n,
                },
                First::Fastshare => FirstStage::FastShare {
                    secret: secret(s.as_deref(), bits)?,
                    n: *n,
                },
                First::Safeshares => FirstStage::SafeShares {
                    secret: secret(s.as_deref(), bits)?,
                    n: *n,
                },
            };
            let then = then.iter().map(|s| s.parse::<Stage>()).collect::<Result<_, _>>()?;
            Algorithm::Simulate { first, then }
        }
        Command::Audit { transcript } => {
            let (transcript, b) = load::<Transcript>(transcript)?;
            bits = b;
            Algorithm::Audit { transcript }
        }
    };

    let params = SchemeParams::binary(bits)?;
    let mut fixtures = Vec::new();
    for f in &cli.fixture {
        let (party, path) = f
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("fixture {f:?} is not PARTY:PATH")))?;
        let owner: RandOwner = party.parse()?;
        fixtures.push((owner, parse_fixture(&read(Path::new(path))?, params)?));
    }
    Ok(ScenarioSpec {
        algorithm,
        bits,
        seed: cli.seed,
        fixtures,
        tamper: cli
            .tamper
            .iter()
            .map(|t| t.parse::<TamperRule>())
            .collect::<Result<_, _>>()?,
        assignment: cli.assign.parse::<AssignmentRule>()?,
        audit: cli.audit,
    })
}

fn emit(cli: &Cli, outcome: &ScenarioOutcome) -> Result<(), Error> {
    let io = |e: std::io::Error| Error::Io(e.to_string());
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(io)?;
            for a in &outcome.artifacts {
                fs::write(dir.join(&a.name), &a.contents).map_err(io)?;
            }
            for line in &outcome.report {
                println!("{line}");
            }
        }
        None => match outcome.artifacts.iter().find(|a| a.name != "transcript.json") {
            Some(main) => {
                for line in &outcome.report {
                    eprintln!("{line}");
                }
                print!("{}", main.contents);
            }
            None => {
                for line in &outcome.report {
                    println!("{line}");
                }
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = build_spec(&cli).and_then(|spec| {
        let outcome = run_scenario(&spec)?;
        emit(&cli, &outcome)?;
        Ok(outcome.status)
    });
    match result {
        Ok(status) => ExitCode::from(status.code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(ExitStatus::Usage.code() as u8)
        }
    }
}
