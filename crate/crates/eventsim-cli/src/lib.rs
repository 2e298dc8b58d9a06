//! Command-line front end for the event-simulation library.
//!
//! Three subcommands: `simulate` runs a model and writes its trials or
//! detection pattern, `verify` runs the frequency-law checks and writes
//! `report.json`, and `report` turns a stored histogram into a plot-ready
//! comparison against a geometry preset.
//!
//! Exit codes: 0 success (and every check passed), 1 a check predicate
//! was false, 2 invalid configuration or arguments, 3 I/O failure or
//! unreadable input.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use eventsim::{CheckName, SlitMode};

pub mod commands;
pub mod formats;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("unreadable input: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("empty or inconsistent histogram: {0}")]
    EmptyInput(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) | CliError::Parse(_) | CliError::EmptyInput(_) => 3,
        }
    }
}

impl From<eventsim::EventError> for CliError {
    fn from(e: eventsim::EventError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<eventsim::CheckError> for CliError {
    fn from(e: eventsim::CheckError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<eventsim::TwoslitError> for CliError {
    fn from(e: eventsim::TwoslitError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<eventsim::classical::ModelError> for CliError {
    fn from(e: eventsim::classical::ModelError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<eventsim::StatsError> for CliError {
    fn from(e: eventsim::StatsError) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "eventsim",
    version,
    about = "Stochastic event simulation and verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a model and write its trials or detection pattern
    Simulate {
        #[command(subcommand)]
        target: SimulateTarget,
    },
    /// Run frequency-law checks against a fixture model
    Verify(VerifyArgs),
    /// Compare a stored histogram against a geometry preset
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Seed; repeat the flag for several runs
    #[arg(long = "seed", default_values_t = vec![42u64])]
    pub seeds: Vec<u64>,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Trial output format
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Subcommand)]
pub enum SimulateTarget {
    /// Draw from an urn of red and white balls
    Urn {
        #[arg(long, default_value_t = 5)]
        reds: u64,
        #[arg(long, default_value_t = 5)]
        whites: u64,
        /// Trial count
        #[arg(short = 'n', long = "trials", default_value_t = 10_000)]
        n: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Spin the 37-cell wheel
    Roulette {
        /// Spin count
        #[arg(short = 'n', long = "trials", default_value_t = 37_000)]
        n: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Send photons through the two-slit apparatus
    Twoslit {
        /// Geometry preset name
        #[arg(long, default_value = "reference")]
        preset: String,
        /// Geometry config JSON (overrides the preset)
        #[arg(long)]
        config: Option<PathBuf>,
        /// Which slits are open: both|one|two
        #[arg(long, default_value = "both")]
        mode: SlitMode,
        /// Photon count of the weak beam
        #[arg(short = 'K', long = "photons", default_value_t = 10_000)]
        photons: u64,
        /// Override the screen bin count
        #[arg(long)]
        bins: Option<u32>,
        /// Emit the continuous intense-beam pattern instead of sampling
        #[arg(long)]
        intense: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Checks to run: TSN TLN TIC TC TD INDIRECT (all when omitted)
    pub checks: Vec<CheckName>,
    /// Run the full suite
    #[arg(long)]
    pub all: bool,
    /// Fixture model: urn|certain|roulette
    #[arg(long, default_value = "urn")]
    pub model: String,
    #[arg(long, default_value_t = 5)]
    pub reds: u64,
    #[arg(long, default_value_t = 5)]
    pub whites: u64,
    /// Trial count for the long-run checks
    #[arg(short = 'n', long = "trials", default_value_t = 10_000)]
    pub n: u64,
    /// Confidence level of the indirect interval
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    #[arg(long = "seed", default_values_t = vec![42u64])]
    pub seeds: Vec<u64>,
    /// Report path
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// histogram.json to analyze
    #[arg(long)]
    pub input: PathBuf,
    /// Geometry preset to compare against
    #[arg(long, default_value = "reference")]
    pub against: String,
    /// Output CSV path
    #[arg(long, default_value = "pattern.csv")]
    pub out: PathBuf,
}

/// All six CLI-facing checks, in reporting order.
pub const ALL_CHECKS: [CheckName; 6] = [
    CheckName::Tsn,
    CheckName::Tln,
    CheckName::Tic,
    CheckName::Tc,
    CheckName::Td,
    CheckName::Indirect,
];

/// Executes a parsed command line and returns the process exit code,
/// printing summary lines to stdout and errors to stderr.
pub fn run(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            if outcome.all_passed {
                0
            } else {
                1
            }
        }
        Err(error) => {
            eprintln!("error: {error}");
            error.exit_code()
        }
    }
}

pub struct Outcome {
    pub lines: Vec<String>,
    pub all_passed: bool,
}

fn execute(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Simulate { target } => {
            let lines = match target {
                SimulateTarget::Urn {
                    reds,
                    whites,
                    n,
                    output,
                } => commands::simulate_urn(
                    reds,
                    whites,
                    n,
                    &output.seeds,
                    &output.out,
                    output.format,
                )?,
                SimulateTarget::Roulette { n, output } => {
                    commands::simulate_roulette(n, &output.seeds, &output.out, output.format)?
                }
                SimulateTarget::Twoslit {
                    preset,
                    config,
                    mode,
                    photons,
                    bins,
                    intense,
                    output,
                } => {
                    let mut geometry = match config {
                        Some(path) => commands::load_geometry(&path)?,
                        None => commands::preset_geometry(&preset)?,
                    };
                    if let Some(bins) = bins {
                        geometry = eventsim::SlitGeometry::new(
                            geometry.wavelength_nm(),
                            geometry.slit_separation_mm(),
                            geometry.slit_width_mm(),
                            geometry.screen_distance_m(),
                            geometry.window_mm(),
                            bins,
                        )?;
                    }
                    commands::simulate_twoslit(
                        &geometry,
                        mode,
                        photons,
                        intense,
                        &output.seeds,
                        &output.out,
                    )?
                }
            };
            Ok(Outcome {
                lines,
                all_passed: true,
            })
        }
        Command::Verify(args) => {
            if args.seeds.is_empty() {
                return Err(CliError::Config("seed list must not be empty".to_string()));
            }
            let checks: Vec<CheckName> = if args.all || args.checks.is_empty() {
                ALL_CHECKS.to_vec()
            } else {
                args.checks.clone()
            };
            let (event, label) = commands::verify_model(&args.model, args.reds, args.whites)?;
            let outcome = commands::verify(
                &checks,
                &event,
                &label,
                args.n,
                args.confidence,
                &args.seeds,
                &args.out,
            )?;
            Ok(Outcome {
                lines: outcome.lines,
                all_passed: outcome.all_passed,
            })
        }
        Command::Report(args) => {
            let geometry = commands::preset_geometry(&args.against)?;
            let lines = commands::report(&args.input, &geometry, &args.out)?;
            Ok(Outcome {
                lines,
                all_passed: true,
            })
        }
    }
}
