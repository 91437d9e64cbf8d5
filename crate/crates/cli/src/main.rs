//! `heatctl`: synthesize, simulate and check boundary controls for the heat
//! equation driven by a point source on the boundary of a half-plane.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod output;

#[derive(Debug, Parser)]
#[command(name = "heatctl", version, about = "Point-source boundary control of the heat equation on a half-plane")]
struct Cli {
    /// Tolerance for sampled-profile quadrature and for match verdicts.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,

    /// Number of log-spaced r points used for end states and residual norms.
    #[arg(long, global = true, default_value_t = heat_control::heat::DEFAULT_GRID_POINTS)]
    grid_points: usize,

    /// Directory for written artifacts (created if missing).
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the control for a target from a JSON config {target, T, N, l, out}.
    Synthesize { config: PathBuf },
    /// Run a control from an initial profile and write the end state.
    Simulate {
        control: PathBuf,
        initial: PathBuf,
        /// Evaluation time; defaults to the control horizon.
        #[arg(long = "T")]
        t: Option<f64>,
        /// Profile to measure the end state against (zero if omitted).
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// Check a control against a target: reachability condition, entire-function
    /// bound and moment residuals.
    Verify {
        control: PathBuf,
        target: PathBuf,
        /// Must equal the control horizon when given.
        #[arg(long = "T")]
        t: Option<f64>,
        #[arg(long, default_value_t = 8)]
        n_max: u32,
    },
    /// Reproduce the worked example at T = 3 and write its plot data.
    Example,
    /// Apply the transform Φ to a profile and print the result as JSON.
    Transform { profile: PathBuf },
    /// Print the moments γ_0..γ_N of a profile as JSON.
    Moments {
        profile: PathBuf,
        #[arg(long = "T")]
        t: f64,
        #[arg(long, default_value_t = 8)]
        n_max: u32,
    },
}

/// Settings shared by every verb.
pub struct Settings {
    pub tol: f64,
    pub grid_points: usize,
    pub out_dir: PathBuf,
}

/// A failed run and the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

pub const EXIT_PARSE: u8 = 2;
pub const EXIT_PRECONDITION: u8 = 3;
pub const EXIT_NUMERICS: u8 = 4;
pub const EXIT_REGRESSION: u8 = 5;

impl Failure {
    pub fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Self { code, error: error.into() }
    }
}

impl From<heat_control::Error> for Failure {
    fn from(e: heat_control::Error) -> Self {
        use heat_control::Error as E;
        let code = match e {
            E::Domain(_) | E::Precondition(_) => EXIT_PRECONDITION,
            E::NonConvergence { .. } => EXIT_NUMERICS,
            E::Invalid { .. } => EXIT_PARSE,
        };
        Self::new(code, e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let settings = Settings { tol: cli.tol, grid_points: cli.grid_points, out_dir: cli.out_dir };
    if !(settings.tol > 0.0) || settings.grid_points < 2 {
        eprintln!("error: --tol must be positive and --grid-points at least 2");
        return ExitCode::from(EXIT_PRECONDITION);
    }
    let result = match cli.command {
        Command::Synthesize { config } => commands::synthesize(&settings, &config),
        Command::Simulate { control, initial, t, target } => {
            commands::simulate(&settings, &control, &initial, t, target.as_deref())
        }
        Command::Verify { control, target, t, n_max } => commands::verify(&settings, &control, &target, t, n_max),
        Command::Example => commands::example(&settings),
        Command::Transform { profile } => commands::transform(&settings, &profile),
        Command::Moments { profile, t, n_max } => commands::moments(&profile, t, n_max),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
