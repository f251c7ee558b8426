//! `deltadiv`: compute classifier-incongruence divergences, sample posterior
//! pairs, and reproduce the comparative scatter experiments.
//!
//! Exit codes: 0 on success, 1 on computation/validation failures, 2 on usage
//! errors. Success paths write nothing to standard error.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use deltadiv::sampling::{ConstraintMode, SamplerConfig};

#[derive(Parser, Debug)]
#[command(
    name = "deltadiv",
    version,
    about = "Decision-cognizant divergence toolkit for classifier incongruence",
    propagate_version = true
)]
pub struct Cli {
    /// Output format: csv, jsonl or json (default depends on the command)
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,

    /// Output path; stdout when omitted (experiment requires a path)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// RNG seed; required by every sampling command, never defaulted
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for record generation (output is identical for any count)
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,

    /// Log base for K-L and Renyi values: e, 2, 10 or any positive real != 1
    #[arg(long, global = true, default_value = "e")]
    pub log_base_kl: String,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Jsonl,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate divergence measures on one pair of distributions
    Compute {
        /// First distribution: comma-separated probabilities, or @file.json
        #[arg(long)]
        p: String,
        /// Second distribution: comma-separated probabilities, or @file.json
        #[arg(long)]
        q: String,
        /// Comma-separated measures: all, kl, kl-sym, js, tv, delta,
        /// delta-star, delta-max, renyi:<alpha|inf>, f-div:<kl|tv|squared>,
        /// bregman:<kl|squared>
        #[arg(long, default_value = "all")]
        measure: String,
        /// With delta selected, also emit the full case breakdown
        #[arg(long)]
        verbose: bool,
    },
    /// Emit sampled posterior pairs
    Sample(SamplerArgs),
    /// Run a scatter experiment: full measure panel per sampled pair, plus a
    /// reproducibility manifest next to the output file
    Experiment(SamplerArgs),
    /// Sweep detection thresholds for one measure against Delta ground truth
    Sweep {
        #[command(flatten)]
        sampler: SamplerArgs,
        /// Panel column to threshold (kl, kl-sym, js, tv, delta, delta-star, delta-max)
        #[arg(long)]
        measure: String,
        /// Delta divergence threshold defining congruence ground truth
        #[arg(long)]
        ref_threshold: f64,
        /// Candidate thresholds, comma-separated
        #[arg(long, value_delimiter = ',')]
        thresholds: Vec<f64>,
    },
    /// Search for Delta divergence triangle-inequality violations
    MetricSearch {
        /// Number of classes
        #[arg(long)]
        classes: usize,
        /// Number of sampled triples
        #[arg(long)]
        triples: u64,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Unconstrained,
    DominantValue,
    DominantDiff,
}

#[derive(Args, Debug, Clone)]
pub struct SamplerArgs {
    /// Number of classes m
    #[arg(long)]
    pub classes: usize,

    /// Sampling constraint
    #[arg(long, value_enum, default_value_t = ModeArg::Unconstrained)]
    pub mode: ModeArg,

    /// Constrained class index (dominant-value and dominant-diff modes)
    #[arg(long)]
    pub mu: Option<usize>,

    /// Dominant-class probability (dominant-value mode)
    #[arg(long)]
    pub p_mu: Option<f64>,

    /// Target |P_mu - Q_mu| (dominant-diff mode)
    #[arg(long)]
    pub diff: Option<f64>,

    /// Number of pairs
    #[arg(long)]
    pub count: u64,

    /// In dominant-diff mode, require mu dominant for the second draw too
    #[arg(long)]
    pub both_dominant: bool,
}

/// Errors split by exit code.
pub enum AppError {
    /// Exit code 2: bad flags or flag combinations.
    Usage(String),
    /// Exit code 1: computation, validation or I/O failure.
    Failure(String),
}

impl AppError {
    fn usage(message: impl Into<String>) -> Self {
        AppError::Usage(message.into())
    }

    fn failure(message: impl Into<String>) -> Self {
        AppError::Failure(message.into())
    }
}

impl From<deltadiv::Error> for AppError {
    fn from(e: deltadiv::Error) -> Self {
        AppError::Failure(e.to_string())
    }
}

impl SamplerArgs {
    pub fn to_config(&self, seed: u64) -> Result<SamplerConfig, AppError> {
        let mode = match self.mode {
            ModeArg::Unconstrained => {
                if self.mu.is_some() || self.p_mu.is_some() || self.diff.is_some() {
                    return Err(AppError::usage(
                        "--mu/--p-mu/--diff only apply to the constrained modes",
                    ));
                }
                ConstraintMode::Unconstrained
            }
            ModeArg::DominantValue => {
                let mu = self
                    .mu
                    .ok_or_else(|| AppError::usage("--mode dominant-value requires --mu"))?;
                let p_mu = self
                    .p_mu
                    .ok_or_else(|| AppError::usage("--mode dominant-value requires --p-mu"))?;
                if self.diff.is_some() {
                    return Err(AppError::usage("--diff does not apply to dominant-value mode"));
                }
                ConstraintMode::DominantValue { mu, p_mu }
            }
            ModeArg::DominantDiff => {
                let mu = self
                    .mu
                    .ok_or_else(|| AppError::usage("--mode dominant-diff requires --mu"))?;
                let diff = self
                    .diff
                    .ok_or_else(|| AppError::usage("--mode dominant-diff requires --diff"))?;
                if self.p_mu.is_some() {
                    return Err(AppError::usage("--p-mu does not apply to dominant-diff mode"));
                }
                ConstraintMode::DominantDiff { mu, diff }
            }
        };
        let config = SamplerConfig {
            both_dominant: self.both_dominant,
            ..SamplerConfig::new(self.classes, mode, self.count, seed)
        };
        config
            .validate()
            .map_err(|e| AppError::usage(format!("infeasible sampling configuration: {e}")))?;
        Ok(config)
    }
}

/// The seed is mandatory wherever randomness flows; reproducibility over
/// convenience.
pub fn require_seed(cli: &Cli) -> Result<u64, AppError> {
    cli.seed
        .ok_or_else(|| AppError::usage("--seed is required (runs must be reproducible)"))
}

pub fn parse_log_base(raw: &str) -> Result<f64, AppError> {
    let base = match raw {
        "e" => std::f64::consts::E,
        "2" => 2.0,
        "10" => 10.0,
        other => other
            .parse::<f64>()
            .map_err(|_| AppError::usage(format!("invalid --log-base-kl `{other}`")))?,
    };
    if !base.is_finite() || base <= 0.0 || base == 1.0 {
        return Err(AppError::usage(format!(
            "invalid --log-base-kl {base}: must be positive and != 1"
        )));
    }
    Ok(base)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Failure(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(AppError::Usage(message)) => {
            eprintln!("usage error: {message}");
            ExitCode::from(2)
        }
    }
}
