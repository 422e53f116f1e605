//! Command-line runner for hsmimo experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hsmimo::harness::presets;
use hsmimo::{emit_csv, run_experiment, Error, ExperimentSpec};

#[derive(Parser)]
#[command(name = "hsmimo", version, about = "Run repetition-coded MIMO link experiments and write CSV")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment spec (TOML) and write the result rows as CSV.
    Run {
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads for Monte Carlo trials (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Overrides the spec's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Bundled figure specs.
    Preset {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    /// List preset ids with the figure each mirrors.
    List,
    /// Print a preset's TOML.
    Show { id: String },
}

/// 1 for bad input, 2 for numerical failures.
fn exit_code(e: &Error) -> u8 {
    if e.is_validation() || matches!(e, Error::Io { .. }) {
        1
    } else {
        2
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { spec, out, threads, seed } => {
            let mut spec = ExperimentSpec::from_file(&spec)?;
            if let Some(s) = seed {
                spec.seed = s;
            }
            let rows = match threads {
                Some(0) => return Err(Error::Validation(vec!["--threads must be >= 1".into()])),
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::Validation(vec![format!("cannot start {n} threads: {e}")]))?
                    .install(|| run_experiment(&spec))?,
                None => run_experiment(&spec)?,
            };
            emit_csv(&rows, &out)?;
            log::info!("wrote {} rows to {}", rows.len(), out.display());
        }
        Command::Preset { action: PresetAction::List } => {
            for id in presets::ids() {
                let spec = presets::load(id)?;
                println!("{id}\t{:?}\t{}", spec.kind, spec.figure.unwrap_or_default());
            }
        }
        Command::Preset { action: PresetAction::Show { id } } => print!("{}", presets::text(&id)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
