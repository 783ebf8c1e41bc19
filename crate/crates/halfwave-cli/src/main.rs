//! Command-line front end: build initial data, evolve it, inspect the Lax
//! spectrum, resolve solitons and run invariant checks.
//!
//! Exit codes: 0 ok, 1 I/O or usage, 2 validation, 3 flow, 4 spectrum.

mod checks;
mod commands;

use clap::{Parser, Subcommand, ValueEnum};
use halfwave::HwmError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "halfwave", version, about = "Exact rational-data solver for half-wave maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build initial data and write it as map JSON
    Build {
        #[command(subcommand)]
        kind: BuildKind,
        /// Output file (stdout if omitted)
        #[arg(short, long, global = true)]
        out: Option<PathBuf>,
    },
    /// Evolve a map and write snapshots, grid samples and diagnostics
    Evolve {
        map: PathBuf,
        /// Comma-separated times
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        times: Vec<f64>,
        /// Sample grid as `lo:hi:n`; defaults to a grid adapted to the poles
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Lax spectrum report
    Spectrum {
        map: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Resolve into solitons and measure convergence at the given times
    Resolve {
        map: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [1e2, 1e3, 1e4])]
        t_list: Vec<f64>,
        /// Sobolev exponents for the seminorm errors
        #[arg(long, value_delimiter = ',', default_values_t = [0.5])]
        s: Vec<f64>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run an invariant suite and print a pass/fail report
    Check {
        map: PathBuf,
        #[arg(long, value_enum, default_value_t = Suite::Fast)]
        suite: Suite,
    },
}

#[derive(Subcommand)]
pub enum BuildKind {
    /// Constant map into Gr_k(C^d)
    Constant {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
    },
    /// Single travelling soliton with pole at y - i delta
    Single {
        #[arg(long, allow_hyphen_values = true)]
        v: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        y: f64,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
    },
    /// Well-separated multi-soliton with poles at y_j - i
    Multi {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        v: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        y: Vec<f64>,
        /// Minimum separation in units of max 1/(1 - v^2)
        #[arg(long)]
        admission: Option<f64>,
    },
    /// Sphere map from stereographic data R = P/Q (real coefficients, ascending powers)
    Stereographic {
        #[arg(long = "P", value_delimiter = ',', allow_hyphen_values = true, required = true)]
        p: Vec<f64>,
        #[arg(long = "Q", value_delimiter = ',', allow_hyphen_values = true, required = true)]
        q: Vec<f64>,
    },
    /// Random well-conditioned map
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Suite {
    Fast,
    Full,
}

#[derive(Debug)]
pub enum CliError {
    Hwm(HwmError),
    Io(String),
    Validation(serde_json::Value),
    Check { code: u8, report: serde_json::Value },
}

impl From<HwmError> for CliError {
    fn from(e: HwmError) -> Self {
        CliError::Hwm(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub fn exit_code(e: &HwmError) -> u8 {
    match e {
        HwmError::LaxInjectivity { .. } | HwmError::LinAlg(_) | HwmError::Matching(_) => 3,
        HwmError::DegenerateSpectrum(_) => 4,
        _ => 2,
    }
}

fn kind(e: &HwmError) -> &'static str {
    match e {
        HwmError::InvalidInput(_) => "invalid_input",
        HwmError::RankNotOne { .. } => "rank_not_one",
        HwmError::NotNilpotent(_) => "not_nilpotent",
        HwmError::CommonFactor(_) => "common_factor",
        HwmError::RepeatedZero(_) => "repeated_zero",
        HwmError::PoleCollision { .. } => "pole_collision",
        HwmError::LaxInjectivity { .. } => "lax_injectivity",
        HwmError::DegenerateSpectrum(_) => "degenerate_spectrum",
        HwmError::NonConvergence { .. } => "non_convergence",
        HwmError::LinAlg(_) => "linear_algebra",
        HwmError::Matching(_) => "matching",
        HwmError::Json(_) => "json",
    }
}

/// Prints to stdout, ignoring a closed pipe.
pub fn print_out(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Build { kind, out } => commands::build(&kind, out.as_deref()),
        Command::Evolve { map, times, grid, out_dir } => commands::evolve(&map, &times, grid.as_deref(), &out_dir),
        Command::Spectrum { map, out } => commands::spectrum(&map, out.as_deref()),
        Command::Resolve { map, t_list, s, out_dir } => commands::resolve(&map, &t_list, &s, &out_dir),
        Command::Check { map, suite } => checks::run(&map, suite),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (code, report) = match err {
                CliError::Hwm(e) => {
                    (exit_code(&e), serde_json::json!({ "error": kind(&e), "message": e.to_string() }))
                }
                CliError::Io(m) => (1, serde_json::json!({ "error": "io", "message": m })),
                CliError::Validation(r) => (2, serde_json::json!({ "error": "validation", "report": r })),
                CliError::Check { code, report } => {
                    print_out(&serde_json::to_string_pretty(&report).unwrap());
                    return ExitCode::from(code);
                }
            };
            eprintln!("{}", serde_json::to_string_pretty(&report).unwrap());
            ExitCode::from(code)
        }
    }
}
