use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use optojc::compare::Thresholds;
use optojc::config::{parse_config, Mode};
use optojc::error::{HarnessError, Result};
use optojc::{output, runner, scenarios};
use optojc_core::model::Scenario;
use rayon::prelude::*;

#[derive(Parser)]
#[command(
    name = "optojc",
    version,
    about = "Pumped optomechanical cavity with a two-level atom"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `mode` in the config file.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Output path prefix; files are `<prefix><observable>.csv`.
        #[arg(long)]
        out: Option<String>,
    },
    /// Run one or more built-in scenarios concurrently.
    Scenario {
        #[arg(required = true)]
        names: Vec<String>,
        #[arg(long, value_enum, default_value_t = Mode::Analytic)]
        mode: Mode,
        /// Output prefix; defaults to `<name>_`. Only valid with a single name.
        #[arg(long)]
        out: Option<String>,
    },
    /// Print the built-in scenario names.
    ListScenarios,
}

fn execute_to_disk(s: &Scenario, mode: Mode, thresholds: &Thresholds, prefix: &str) -> Result<()> {
    let started = std::time::Instant::now();
    let out = runner::execute(s, mode, thresholds)?;
    let written = output::write_all(prefix, &out.files)?;
    log::info!("{}: {:?} run in {:.2?}", s.label, mode, started.elapsed());
    for p in written {
        println!("{}", p.display());
    }
    if let Some(report) = out.report {
        print!("{}", report.render());
    }
    Ok(())
}

fn default_prefix(label: &str) -> String {
    format!("{label}_")
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, mode, out } => {
            let text = std::fs::read_to_string(&config).map_err(|source| HarnessError::Io {
                path: config.display().to_string(),
                source,
            })?;
            let cfg = parse_config(&text)?;
            let mode = mode.or(cfg.mode).unwrap_or_default();
            let prefix = out
                .or(cfg.out)
                .unwrap_or_else(|| default_prefix(&cfg.scenario.label));
            execute_to_disk(&cfg.scenario, mode, &cfg.thresholds, &prefix)
        }
        Command::Scenario { names, mode, out } => {
            if out.is_some() && names.len() > 1 {
                return Err(HarnessError::Config {
                    line: 0,
                    key: "--out".into(),
                    message: "a single prefix cannot serve several scenarios".into(),
                });
            }
            let built = names
                .iter()
                .map(|n| scenarios::builtin_scenario(n))
                .collect::<Result<Vec<_>>>()?;
            let thresholds = Thresholds::default();
            let results: Vec<Result<()>> = built
                .par_iter()
                .map(|s| {
                    let prefix = out.clone().unwrap_or_else(|| default_prefix(&s.label));
                    execute_to_disk(s, mode, &thresholds, &prefix)
                })
                .collect();
            // The first failure decides the exit code; later ones are only reported.
            let mut errors = results.into_iter().filter_map(Result::err);
            let first = errors.next();
            for e in errors {
                eprintln!("error: {e}");
            }
            first.map_or(Ok(()), Err)
        }
        Command::ListScenarios => {
            for n in scenarios::NAMES {
                println!("{n:<10} {}", scenarios::describe(n));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
