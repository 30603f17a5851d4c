use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use azd_otto::cli::{self, Command, EXIT_CONFIG};
use azd_otto::config::RunConfig;

/// Finite-time quantum Otto cycles with windowed bath coupling.
#[derive(Debug, Parser)]
#[command(name = "azd-otto", version)]
struct Args {
    #[command(subcommand)]
    command: Sub,

    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; overrides `output.dir` in the configuration.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Accepted for compatibility; every computation is deterministic.
    #[arg(long, global = true)]
    seedless: bool,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Sample the bath spectrum and optional overlap datasets.
    Spectrum,
    /// Run one thermalization stroke and write its trajectory.
    Thermalize,
    /// Run the limit cycle and report its thermodynamics.
    Cycle,
    /// Sweep the coupling-window length.
    Sweep,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let command = match args.command {
        Sub::Spectrum => Command::Spectrum,
        Sub::Thermalize => Command::Thermalize,
        Sub::Cycle => Command::Cycle,
        Sub::Sweep => Command::Sweep,
    };

    let Some(path) = args.config else {
        eprintln!("error: --config <path> is required");
        return ExitCode::from(EXIT_CONFIG as u8);
    };
    let config = match RunConfig::load(&path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(cli::exit_code(&e) as u8);
        }
    };

    env_logger::Builder::new()
        .parse_filters(&config.output.verbosity)
        .parse_default_env()
        .init();

    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }

    let out = args.out.unwrap_or_else(|| config.output.dir.clone());
    match cli::run(command, &config, &out) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
