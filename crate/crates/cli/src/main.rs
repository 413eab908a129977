use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use laxlab_cli::config::{load, Overrides};
use laxlab_cli::run::{self, Outcome, RunError};

#[derive(Parser)]
#[command(name = "laxlab", version, about = "Verification laboratory for the theta0-deformed Dirac/sinh-Gordon system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(short, long)]
    config: PathBuf,
    /// Deformation angle in radians, within [0, pi/2].
    #[arg(long, allow_negative_numbers = true)]
    theta0: Option<f64>,
    /// Seed for the randomized suites.
    #[arg(long)]
    seed: Option<u64>,
    /// Time step.
    #[arg(long)]
    dt: Option<f64>,
    /// Final time.
    #[arg(long)]
    t_end: Option<f64>,
    /// Directory for output files.
    #[arg(short, long)]
    output_dir: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Seeded identity suites; exit 1 if any check fails.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, hide = true)]
        inject_sign_error: bool,
    },
    /// Time evolution with observers; writes timeseries.csv, final_state.csv, report.txt.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Conserved densities from the recursion, with phases and charge values.
    Charges {
        #[command(flatten)]
        common: Common,
        /// Highest density index to build.
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Curvature and continuity diagnostics on the initial state.
    Report {
        #[command(flatten)]
        common: Common,
    },
}

fn overrides(c: &Common, n_max: Option<usize>) -> Overrides {
    Overrides { theta0: c.theta0, seed: c.seed, n_max, output_dir: c.output_dir.clone(), dt: c.dt, t_end: c.t_end }
}

fn dispatch(cli: Cli) -> Result<Outcome, RunError> {
    match cli.command {
        Command::Verify { common, inject_sign_error } => {
            run::verify(&load(&common.config, &overrides(&common, None))?, inject_sign_error)
        }
        Command::Simulate { common } => run::simulate_run(&load(&common.config, &overrides(&common, None))?),
        Command::Charges { common, n_max } => run::charges(&load(&common.config, &overrides(&common, n_max))?),
        Command::Report { common } => run::report(&load(&common.config, &overrides(&common, None))?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let code = match dispatch(Cli::parse()) {
        Ok(outcome) => {
            for f in &outcome.files {
                log::info!("wrote {}", f.display());
            }
            if !outcome.passed {
                eprintln!("laxlab: verification failed");
            }
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("laxlab: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
