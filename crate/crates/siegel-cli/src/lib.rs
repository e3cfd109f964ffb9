//! Command implementations behind the `siegel` binary.
//!
//! Every command echoes its full configuration into a `#`-prefixed header at
//! the top of any file it writes, so a run is reproducible from its own
//! output. Exit statuses: 0 for success (including mathematically-zero
//! answers like resonant radii), 1 for budgeted non-convergence, 2 for
//! usage and precondition errors.

pub mod alpha_lit;
pub mod commands;
pub mod output;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

pub const FORMAT_VERSION: &str = "siegel-format 1";

/// Environment variable naming the default directory for output files.
pub const OUT_DIR_ENV: &str = "SIEGEL_OUT_DIR";

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unparseable literals, violated preconditions: exit 2.
    Usage(String),
    /// A budgeted run that did not converge: exit 1.
    NonConverged(String),
    /// I/O trouble writing outputs: exit 1.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::NonConverged(_) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::NonConverged(m) | CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "siegel", version, about = "Siegel disk, Brjuno, and Herman ring numerics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Print a JSON summary to stdout instead of the human-readable report.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Continued fraction, convergents, Brjuno sums, and classification.
    Brjuno(BrjunoArgs),
    /// Linearizer series, conjugacy residual, and conformal radius.
    Radius(RadiusArgs),
    /// Staged search for a prescribed conformal radius near a start point.
    Search(SearchArgs),
    /// Radius oracle over an alpha grid, plus semicontinuity probes.
    Scan(ScanArgs),
    /// Circle-family toolkit: rotation numbers, parameter solving,
    /// conjugacy sampling, mode-locking scans.
    Herman(HermanArgs),
}

#[derive(Args, Debug)]
pub struct BrjunoArgs {
    /// Rotation number: decimal, `p/q`, `(sqrt5-1)/2`, or `golden`.
    #[arg(long, conflicts_with = "quotients")]
    pub alpha: Option<String>,
    /// Comma-separated partial quotients, e.g. `1,2,1,2`.
    #[arg(long)]
    pub quotients: Option<String>,
    /// Continued-fraction terms to compute.
    #[arg(long, default_value_t = 40)]
    pub terms: usize,
    /// Quotient size beyond which a float input is declared rational.
    #[arg(long, default_value_t = 1_000_000)]
    pub cutoff: u64,
}

#[derive(Args, Debug)]
pub struct RadiusArgs {
    #[arg(long)]
    pub alpha: String,
    /// Series truncation order.
    #[arg(long, default_value_t = 4096)]
    pub order: usize,
    /// Initial rescale sigma.
    #[arg(long, default_value_t = 0.25)]
    pub sigma: f64,
    /// Orders checked by the conjugacy verification.
    #[arg(long)]
    pub verify: Option<usize>,
    /// Trailing fraction of coefficients used by the radius fits.
    #[arg(long, default_value_t = 0.5)]
    pub window_fraction: f64,
    /// Dump the rescaled coefficients to this file.
    #[arg(long)]
    pub coeffs_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Starting parameter alpha_0.
    #[arg(long)]
    pub alpha0: String,
    /// Target conformal radius (absolute).
    #[arg(long, conflicts_with = "target_ratio")]
    pub r_target: Option<f64>,
    /// Target radius as a fraction of the measured starting radius.
    #[arg(long)]
    pub target_ratio: Option<f64>,
    /// Neighborhood budget delta: the final alpha stays within it.
    #[arg(long, default_value_t = 1e-2)]
    pub delta: f64,
    /// Radius tolerance for convergence (absolute).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Base oracle order (grows geometrically with the stage index).
    #[arg(long, default_value_t = 2048)]
    pub order: usize,
    #[arg(long, default_value_t = 30)]
    pub max_stages: usize,
    #[arg(long, default_value_t = 0x51e6e1)]
    pub seed: u64,
    /// Stage trace output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    /// Grid points (inclusive of both ends).
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = 2048)]
    pub order: usize,
    /// Grid points are snapped onto rationals with denominator up to this.
    #[arg(long, default_value_t = 16)]
    pub snap_qmax: u64,
    /// Refuse grids larger than this before starting.
    #[arg(long, default_value_t = 100_000)]
    pub max_points: usize,
    /// Also probe one-sided radius behavior around this alpha.
    #[arg(long)]
    pub probe_alpha: Option<String>,
    /// Comma-separated probe scales, e.g. `1e-2,1e-3,1e-4`.
    #[arg(long, default_value = "1e-2,1e-3,1e-4,1e-5,1e-6")]
    pub probe_scales: String,
    #[arg(long, default_value_t = 16)]
    pub probe_samples: usize,
    #[arg(long, default_value_t = 0x51e6e1)]
    pub seed: u64,
    /// Scan output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct HermanArgs {
    #[command(subcommand)]
    pub command: HermanCommand,
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    /// Family parameter: `a > 3` for blaschke, `0 < a < 1/2` for arnold.
    #[arg(long)]
    pub a: f64,
    /// Imaginary part of `a` (arnold only; rejected unless the map still
    /// preserves the circle).
    #[arg(long, default_value_t = 0.0)]
    pub a_im: f64,
    #[arg(long, default_value = "blaschke")]
    pub family: String,
}

#[derive(Subcommand, Debug)]
pub enum HermanCommand {
    /// Rotation number of the circle map at a fixed lambda.
    Rotnum {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 1 << 16)]
        iters: usize,
        /// `birkhoff` or `accelerated`.
        #[arg(long, default_value = "accelerated")]
        mode: String,
    },
    /// Solve lambda for a prescribed rotation number.
    Solve {
        #[command(flatten)]
        family: FamilyArgs,
        /// Target rotation number (same literals as `--alpha`).
        #[arg(long)]
        rho: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Boundary-conjugacy samples, Fourier coefficients, and half-modulus.
    Conjugacy {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, conflicts_with = "rho")]
        lambda: Option<f64>,
        /// Solve for this rotation number first instead of fixing lambda.
        #[arg(long)]
        rho: Option<String>,
        #[arg(long, default_value_t = 4096)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rotation number over a lambda grid (mode-locking staircase).
    Lockscan {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = 1.0)]
        to: f64,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 1 << 14)]
        iters: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Run a parsed command line; the binary maps the error to its exit code.
pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Brjuno(args) => commands::cmd_brjuno(args, cli.json),
        Command::Radius(args) => commands::cmd_radius(args, cli.json),
        Command::Search(args) => commands::cmd_search(args, cli.json),
        Command::Scan(args) => commands::cmd_scan(args, cli.json),
        Command::Herman(args) => commands::cmd_herman(args, cli.json),
    }
}
