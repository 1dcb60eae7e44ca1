mod cache;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

/// Hard safety caps on the slices a job may touch.
pub const MAX_V: usize = 12;
pub const MAX_E: usize = 14;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("verification failed: {0}")]
    Failure(String),

    #[error(transparent)]
    Lib(#[from] graphcx::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Usage(_) | CliError::Io(_) | CliError::Json(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Lib(e) => match e {
                graphcx::Error::Budget(_) => 3,
                graphcx::Error::Invalid(_) | graphcx::Error::Json(_) | graphcx::Error::Io(_) => 2,
                _ => 1,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Directed,
    Oriented,
    Sourced,
    Hairy,
    Ribbon,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Target {
    D2,
    ChainmapPhi,
    #[value(name = "chainmap-F", alias = "chainmap-f")]
    ChainmapF,
    QuasiIsoPhi,
    QuasiIsoP,
    RgcD2,
    LemmaIdentities,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the canonical basis of every slice within the bounds.
    Gen,
    /// Write the differential matrices of every slice within the bounds.
    Diff,
    /// Homology of the fixed-hair or fixed-source complexes at one loop order.
    Homology,
    /// Run one verification suite.
    Verify {
        #[arg(value_enum)]
        target: Target,
    },
    /// The forest map on a hairy graph read from a JSON file.
    Phi { graph: PathBuf },
    /// The ribbon map on an oriented graph read from a JSON file.
    Fmap { graph: PathBuf },
}

#[derive(Debug, Args, Clone)]
pub struct Opts {
    #[arg(long, value_enum, default_value = "hairy", global = true)]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true, global = true)]
    pub n: i64,
    #[arg(long, default_value_t = 4, global = true)]
    pub vmax: usize,
    #[arg(long, default_value_t = 6, global = true)]
    pub emax: usize,
    #[arg(long, default_value_t = 3, global = true)]
    pub smax: usize,
    /// Loop order `e - v` of the complexes in `homology` and `quasi-iso-*`.
    #[arg(long = "loop", default_value_t = 1, allow_negative_numbers = true, global = true)]
    pub loop_order: i64,
    /// Only report degrees in `lo:hi`.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true, global = true)]
    pub degree_window: Option<(i64, i64)>,
    /// Exact rational elimination instead of the modular fast path.
    #[arg(long, global = true)]
    pub exact: bool,
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    #[arg(long, default_value_t = 1, global = true)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Parser)]
#[command(name = "graphcx", version, about = "Exact computations in hairy, oriented and ribbon graph complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo = a.trim().parse::<i64>().map_err(|e| e.to_string())?;
    let hi = b.trim().parse::<i64>().map_err(|e| e.to_string())?;
    if lo > hi {
        return Err("empty window".into());
    }
    Ok((lo, hi))
}

/// Everything a run depends on. Two runs with equal specs write identical
/// files.
#[derive(Debug, Clone, Serialize)]
pub struct JobSpec {
    pub command: String,
    pub family: FamilyArg,
    pub n: i64,
    pub vmax: usize,
    pub emax: usize,
    pub smax: usize,
    pub loop_order: i64,
    pub degree_window: Option<(i64, i64)>,
    pub cache: Option<PathBuf>,
    pub exact: bool,
    pub jobs: Option<usize>,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl JobSpec {
    fn new(command: &str, o: Opts) -> Result<Self, CliError> {
        if o.vmax == 0 || o.emax == 0 || o.smax == 0 || o.jobs == Some(0) {
            return Err(CliError::Usage("bounds must be positive".into()));
        }
        if o.vmax > MAX_V || o.emax > MAX_E {
            return Err(CliError::Budget(format!("vmax <= {MAX_V} and emax <= {MAX_E} are required")));
        }
        if o.family == FamilyArg::Ribbon && o.emax > graphcx::ribbon::MAX_BASIS_EDGES {
            return Err(CliError::Budget(format!(
                "ribbon bases are enumerated up to {} edges",
                graphcx::ribbon::MAX_BASIS_EDGES
            )));
        }
        Ok(JobSpec {
            command: command.to_string(),
            family: o.family,
            n: o.n,
            vmax: o.vmax,
            emax: o.emax,
            smax: o.smax,
            loop_order: o.loop_order,
            degree_window: o.degree_window,
            cache: o.cache,
            exact: o.exact,
            jobs: o.jobs,
            seed: o.seed,
            out: o.out,
        })
    }

    pub fn in_window(&self, k: i64) -> bool {
        self.degree_window.is_none_or(|(lo, hi)| lo <= k && k <= hi)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let name = match &cli.command {
        Command::Gen => "gen",
        Command::Diff => "diff",
        Command::Homology => "homology",
        Command::Verify { .. } => "verify",
        Command::Phi { .. } => "phi",
        Command::Fmap { .. } => "fmap",
    };
    let spec = JobSpec::new(name, cli.opts)?;
    let exec = match spec.jobs {
        Some(1) => graphcx::Exec::Sequential,
        Some(j) => {
            graphcx::exec::set_threads(j);
            graphcx::Exec::default()
        }
        None => graphcx::Exec::default(),
    };
    let ctx = commands::Context::new(spec, exec)?;
    match cli.command {
        Command::Gen => ctx.gen(),
        Command::Diff => ctx.diff(),
        Command::Homology => ctx.homology(),
        Command::Verify { target } => ctx.verify(target),
        Command::Phi { graph } => ctx.phi(&graph),
        Command::Fmap { graph } => ctx.fmap(&graph),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("graphcx: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
