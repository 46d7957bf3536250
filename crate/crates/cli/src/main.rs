//! `netdefense` command-line front end.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use netdefense::Error;

#[derive(Parser, Debug)]
#[command(name = "netdefense", version, about = "Minimum-energy defense of networks under attack")]
pub struct Cli {
    /// Seed for every random draw; overrides the seed in config files.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file. Results go to standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print intermediate matrices to standard error.
    #[arg(long, short, global = true)]
    pub verbose: bool,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Working precision in bits (53, 128, 256, 512, 1024 or 2048); overrides config files.
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a topology: chain:n, ring:n, star:branches,layers or ba:n,m,seed.
    Gen { spec: String },
    /// Energy decomposition for a scenario file.
    Analyze { scenario: PathBuf },
    /// Integrate a scenario open loop or under the optimal defense.
    Simulate {
        scenario: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, value_enum, default_value_t = Mode::Closed)]
        mode: Mode,
    },
    /// Attacker sweeps over noise realizations.
    Sweep {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Study::Position)]
        study: Study,
        /// Largest attacker count for `--study count`.
        #[arg(long)]
        max_attackers: Option<usize>,
        /// Defender fraction for `--study scalefree`.
        #[arg(long, default_value_t = 0.1)]
        defender_fraction: f64,
    },
    /// Energy report for a power grid under load-altering attacks.
    Grid {
        params: PathBuf,
        /// Attacked loads, e.g. `1,3`.
        #[arg(long, value_delimiter = ',', required = true)]
        loads: Vec<usize>,
        /// Defending generators, e.g. `1,2`.
        #[arg(long, value_delimiter = ',', required = true)]
        generators: Vec<usize>,
        #[arg(long, default_value_t = 0.0)]
        s: f64,
        #[arg(long, default_value_t = 0.0)]
        r: f64,
        #[arg(long, default_value_t = 1.0)]
        w0: f64,
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        #[arg(long, default_value_t = 1.0)]
        t_f: f64,
    },
    /// Re-run the command recorded in a manifest.
    Replay { manifest: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Open,
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Study {
    Position,
    Count,
    Scalefree,
}

/// Error with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_PLACEMENT: u8 = 3;
pub const EXIT_SINGULAR: u8 = 4;

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::SingularGramian { .. }
            | Error::Placement(_)
            | Error::DistanceUndefined { .. }
            | Error::RetriesExhausted { .. } => EXIT_PLACEMENT,
            Error::Reduction(_) => EXIT_SINGULAR,
            Error::InvalidSize(_)
            | Error::InvalidGraph(_)
            | Error::Shape(_)
            | Error::Domain(_)
            | Error::Config(_)
            | Error::Assembly(_)
            | Error::Json { .. } => EXIT_USAGE,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
