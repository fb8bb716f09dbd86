//! Command-line front end: builds artifacts, writes them atomically with a
//! run manifest, and replays manifests.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sympcert_core::certifier::{CaseId, CertError, Outcome};
use sympcert_core::groebner::GroebnerError;
use sympcert_core::periodlab::PeriodError;
use sympcert_core::polyring::{PolyError, Q};
use sympcert_core::relations::{RelationError, RelationId};

pub mod commands;
pub mod manifest;

use manifest::{manifest_path, write_atomic, Comparison, FileDigest, RunManifest};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Period(#[from] PeriodError),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sympcert", version, about = "Relation polynomials, symplectic normal forms and their certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a reduced Groebner basis.
    Groebner(GroebnerArgs),
    /// Normal form of a relation or polynomial modulo a basis.
    Reduce(ReduceArgs),
    /// Relation polynomials.
    #[command(subcommand)]
    Relations(RelationsCommand),
    /// Coefficient map of a relation's normal form, by X-monomial.
    Coeffs(CoeffsArgs),
    /// Vanishing and non-triviality certificates.
    #[command(subcommand)]
    Certify(CertifyCommand),
    /// Replay quoted coefficients or case analyses.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Elliptic period matrices and their identities.
    Periods(PeriodsArgs),
    /// Re-run a manifest and compare its outputs.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Subcommand)]
pub enum RelationsCommand {
    /// Build a relation polynomial.
    Build(BuildArgs),
}

#[derive(Debug, Subcommand)]
pub enum CertifyCommand {
    Vanishing(VanishingArgs),
    Nontrivial(NontrivialArgs),
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    Coeffs(CheckCoeffsArgs),
    Derivation(CheckDerivationArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Ideal {
    Sp4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Verbatim,
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckArg {
    Legendre,
    Split,
    Isogeny,
}

#[derive(Debug, Clone, Args)]
pub struct OutArg {
    /// Output file; a manifest is written next to it. Without it the artifact goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ProfileArg {
    /// Profile overrides as key=value, repeatable or comma separated.
    #[arg(long = "profile", value_delimiter = ',')]
    pub overrides: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct GroebnerArgs {
    #[arg(long, value_enum, default_value = "sp4")]
    pub ideal: Ideal,
    #[arg(long, default_value = "lex")]
    pub order: String,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Clone, Args)]
pub struct ReduceArgs {
    #[arg(long, conflicts_with = "poly", required_unless_present = "poly")]
    pub relation: Option<RelationId>,
    /// A polynomial expression instead of a relation.
    #[arg(long)]
    pub poly: Option<String>,
    #[command(flatten)]
    pub profile: ProfileArg,
    /// Basis file from `groebner`; computed when absent.
    #[arg(long)]
    pub gb: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Clone, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub relation: RelationId,
    #[command(flatten)]
    pub profile: ProfileArg,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Clone, Args)]
pub struct CoeffsArgs {
    #[arg(long)]
    pub relation: RelationId,
    #[command(flatten)]
    pub profile: ProfileArg,
    #[arg(long)]
    pub gb: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Clone, Args)]
pub struct VanishingArgs {
    #[arg(long)]
    pub case: CaseId,
    #[arg(long)]
    pub relation: RelationId,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    /// Mode for RSUPSING and QE2E2; vanishing runs default to corrected.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[command(flatten)]
    pub profile: ProfileArg,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Clone, Args)]
pub struct NontrivialArgs {
    #[arg(long)]
    pub relation: RelationId,
    #[arg(long)]
    pub gb: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// JSON object mapping parameter symbols to rationals; replaces the random draw.
    #[arg(long)]
    pub witness: Option<PathBuf>,
    #[command(flatten)]
    pub profile: ProfileArg,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Clone, Args)]
pub struct CheckCoeffsArgs {
    /// Claims file; `--relation` selects a bundled one instead.
    #[arg(long, conflicts_with = "relation", required_unless_present = "relation")]
    pub claims: Option<PathBuf>,
    #[arg(long)]
    pub relation: Option<RelationId>,
    #[arg(long)]
    pub gb: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Clone, Args)]
pub struct CheckDerivationArgs {
    /// Derivation script; `--relation` selects a bundled one instead.
    #[arg(long, conflicts_with = "relation", required_unless_present = "relation")]
    pub script: Option<PathBuf>,
    #[arg(long)]
    pub relation: Option<RelationId>,
    #[arg(long)]
    pub gb: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Clone, Args)]
pub struct PeriodsArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub g2: Q,
    #[arg(long, allow_hyphen_values = true)]
    pub g3: Q,
    /// Identities to check; all when absent.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub check: Vec<CheckArg>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    pub manifest: PathBuf,
}

/// A built artifact before it is written.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub bytes: Vec<u8>,
    /// Certificate outcome, when the artifact is one.
    pub outcome: Option<Outcome>,
    pub comparison: Comparison,
    pub seed: Option<u64>,
    /// Human-readable summary printed to stderr (or stdout for tables).
    pub summary: String,
}

impl Artifact {
    pub fn exit_code(&self) -> i32 {
        match self.outcome {
            Some(Outcome::Pass) | None => EXIT_PASS,
            Some(_) => EXIT_FAIL,
        }
    }
}

impl Command {
    pub fn out(&self) -> Option<&Path> {
        let o = match self {
            Command::Groebner(a) => &a.out,
            Command::Reduce(a) => &a.out,
            Command::Relations(RelationsCommand::Build(a)) => &a.out,
            Command::Coeffs(a) => &a.out,
            Command::Certify(CertifyCommand::Vanishing(a)) => &a.out,
            Command::Certify(CertifyCommand::Nontrivial(a)) => &a.out,
            Command::Check(CheckCommand::Coeffs(a)) => &a.out,
            Command::Check(CheckCommand::Derivation(a)) => &a.out,
            Command::Periods(a) => &a.out,
            Command::Reproduce(_) => return None,
        };
        o.out.as_deref()
    }

    /// Every path argument, for rebasing onto a recorded working directory.
    fn paths_mut(&mut self) -> Vec<&mut PathBuf> {
        let mut v: Vec<&mut PathBuf> = Vec::new();
        let (out, inputs): (&mut OutArg, Vec<&mut Option<PathBuf>>) = match self {
            Command::Groebner(a) => (&mut a.out, vec![]),
            Command::Reduce(a) => (&mut a.out, vec![&mut a.gb]),
            Command::Relations(RelationsCommand::Build(a)) => (&mut a.out, vec![]),
            Command::Coeffs(a) => (&mut a.out, vec![&mut a.gb]),
            Command::Certify(CertifyCommand::Vanishing(a)) => (&mut a.out, vec![]),
            Command::Certify(CertifyCommand::Nontrivial(a)) => (&mut a.out, vec![&mut a.gb, &mut a.witness]),
            Command::Check(CheckCommand::Coeffs(a)) => (&mut a.out, vec![&mut a.gb, &mut a.claims]),
            Command::Check(CheckCommand::Derivation(a)) => (&mut a.out, vec![&mut a.gb, &mut a.script]),
            Command::Periods(a) => (&mut a.out, vec![]),
            Command::Reproduce(a) => {
                v.push(&mut a.manifest);
                return v;
            }
        };
        v.extend(out.out.as_mut());
        for p in inputs.into_iter().flatten() {
            v.push(p);
        }
        v
    }

    /// Input files read by the command.
    pub fn inputs(&self) -> Vec<&Path> {
        let list: Vec<&Option<PathBuf>> = match self {
            Command::Reduce(a) => vec![&a.gb],
            Command::Coeffs(a) => vec![&a.gb],
            Command::Certify(CertifyCommand::Nontrivial(a)) => vec![&a.gb, &a.witness],
            Command::Check(CheckCommand::Coeffs(a)) => vec![&a.gb, &a.claims],
            Command::Check(CheckCommand::Derivation(a)) => vec![&a.gb, &a.script],
            _ => vec![],
        };
        list.into_iter().filter_map(|p| p.as_deref()).collect()
    }

    /// Resolves relative paths against `cwd`.
    pub fn rebase(&mut self, cwd: &Path) {
        for p in self.paths_mut() {
            if p.is_relative() {
                *p = cwd.join(&*p);
            }
        }
    }
}

/// Parses `argv` (including the program name) and runs it; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
        }
    };
    let args: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match dispatch(cli.command, &args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn dispatch(command: Command, args: &[String]) -> Result<i32, CliError> {
    if let Command::Reproduce(a) = &command {
        return commands::reproduce(&a.manifest);
    }
    let start = Instant::now();
    let artifact = commands::execute(&command)?;
    match command.out() {
        Some(out) => {
            write_atomic(out, &artifact.bytes)?;
            let cwd = std::env::current_dir().map_err(|e| CliError::io(Path::new("."), e))?;
            let inputs = command.inputs().into_iter().map(FileDigest::of).collect::<Result<_, _>>()?;
            let manifest = RunManifest {
                command_line: args.to_vec(),
                cwd,
                seed: artifact.seed,
                tool_version: sympcert_core::certifier::tool_version(),
                inputs,
                outputs: vec![FileDigest::of(out)?],
                comparison: artifact.comparison,
                wall_time_ms: start.elapsed().as_millis() as u64,
            };
            write_atomic(&manifest_path(out), manifest.to_json().as_bytes())?;
            if artifact.comparison == Comparison::Numeric {
                print!("{}", artifact.summary);
            } else {
                eprint!("{}", artifact.summary);
            }
        }
        None => {
            if artifact.comparison == Comparison::Numeric {
                print!("{}", artifact.summary);
            } else {
                print!("{}", String::from_utf8_lossy(&artifact.bytes));
                eprint!("{}", artifact.summary);
            }
        }
    }
    Ok(artifact.exit_code())
}
