//! Command-line harness: single design runs, paired comparisons and the oracle suite.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use sidelobe::io::{read_mask, read_sequence, MaskFile};
use sidelobe::run::{DEFAULT_MAX_ITERS, DEFAULT_TOLERANCE};
use sidelobe::{frank_sequence, golomb_sequence, random_unimodular, Mode, UnimodularSequence, Variant};

pub mod compare;
pub mod design;
pub mod report;
pub mod validate;

/// Environment variable that takes precedence over `--seed`.
pub const SEED_ENV: &str = "SIDELOBE_SEED";

#[derive(Debug, Parser)]
#[command(name = "sidelobe", version, about = "Unimodular sequence design with low ISL")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one design and write sequence, trace, correlation and spectrum files.
    Design(DesignArgs),
    /// Paired multi-trial comparison of several variants.
    Compare(CompareArgs),
    /// Run the dense oracle checks; exits nonzero if any fails.
    Validate(ValidateArgs),
}

/// Options shared by `design` and `compare`.
#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// aperiodic or periodic; defaults to periodic for pecan, aperiodic otherwise.
    #[arg(long)]
    pub mode: Option<Mode>,
    /// Seed for random initialization (overridden by SIDELOBE_SEED).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative-change stopping tolerance.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    /// Spectral mask JSON: {"lambda": .., "bands": [[lo, hi], ..]} or {"lambda": .., "indices": [..]}.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    /// Wrap spectral-misl in SQUAREM.
    #[arg(long)]
    pub accelerate: bool,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct DesignArgs {
    #[arg(long)]
    pub variant: Variant,
    /// Sequence length; optional when --init names a file.
    #[arg(short = 'n', long = "n")]
    pub n: Option<usize>,
    /// random, golomb, frank, or a sequence file (JSON or one phase per line).
    #[arg(long, default_value = "random")]
    pub init: String,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub variants: Vec<Variant>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub lengths: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// With two variants A, B: also run B from A's output and A from B's output.
    #[arg(long)]
    pub cross_init: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Seed for the random vectors used by the checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Applies the seed override from the environment, if set.
pub fn effective_seed(flag: u64, env: Option<&str>) -> anyhow::Result<u64> {
    match env {
        Some(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{SEED_ENV}='{v}' is not an unsigned integer")),
        None => Ok(flag),
    }
}

pub fn default_mode(variant: Variant, mode: Option<Mode>) -> Mode {
    mode.unwrap_or(match variant {
        Variant::Pecan => Mode::Periodic,
        _ => Mode::Aperiodic,
    })
}

/// Initial sequence from `random`, `golomb`, `frank` or a file path.
pub fn initial_sequence(init: &str, n: Option<usize>, seed: u64) -> anyhow::Result<UnimodularSequence> {
    let need_n = || n.context("-n is required unless --init names a sequence file");
    let x = match init {
        "random" => random_unimodular(need_n()?, seed)?,
        "golomb" => golomb_sequence(need_n()?)?,
        "frank" => {
            let n = need_n()?;
            let m = (n as f64).sqrt().round() as usize;
            if m * m != n {
                bail!("frank initialization needs N = M^2, got {n}");
            }
            frank_sequence(m)?
        }
        path => {
            let x = read_sequence(path.as_ref())
                .with_context(|| format!("reading initial sequence '{path}'"))?;
            if let Some(n) = n {
                if n != x.len() {
                    bail!("-n {n} does not match the {}-sample sequence in '{path}'", x.len());
                }
            }
            x
        }
    };
    Ok(x)
}

/// Parsed mask file, resolved per sequence length.
pub fn load_mask(path: &std::path::Path) -> anyhow::Result<MaskFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading mask '{}'", path.display()))?;
    Ok(MaskFile::parse(&text)?)
}

pub fn load_mask_for(path: &std::path::Path, n: usize) -> anyhow::Result<sidelobe::SpectralMask> {
    read_mask(path, n).with_context(|| format!("loading mask '{}' for N = {n}", path.display()))
}

/// Runs a parsed command line; returns the process exit code.
pub fn run(cli: Cli, seed_env: Option<&str>) -> anyhow::Result<i32> {
    match cli.command {
        Command::Design(args) => {
            let summary = design::execute(&args, seed_env)?;
            println!("{summary}");
            Ok(0)
        }
        Command::Compare(args) => {
            let report = compare::execute(&args, seed_env)?;
            print!("{}", report.summary_table());
            Ok(0)
        }
        Command::Validate(args) => {
            let outcome = validate::run_all(args.seed);
            print!("{}", outcome.table());
            Ok(if outcome.all_passed() { 0 } else { 1 })
        }
    }
}
