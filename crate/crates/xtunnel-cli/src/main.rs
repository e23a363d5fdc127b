use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use xtunnel_cli::{parse_config, run, Scenario, ScenarioConfig, EXIT_CONFIG, EXIT_NUMERICAL};

#[derive(Parser)]
#[command(name = "xtunnel", version, about = "Exchange-assisted tunneling in a 1D double well")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides output.dir
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Parse and check a config without running it
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the scenario names
    ListScenarios,
}

fn load(path: &PathBuf) -> Result<ScenarioConfig, ExitCode> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(EXIT_CONFIG as u8)
    })?;
    parse_config(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(EXIT_CONFIG as u8)
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::ListScenarios => {
            for s in Scenario::ALL {
                println!("{s}");
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match load(&config) {
            Ok(cfg) => {
                println!("{}: ok ({})", config.display(), cfg.scenario);
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
        Command::Run { config, out_dir } => {
            let mut cfg = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            if let Some(dir) = out_dir {
                cfg.output_dir = dir;
            }
            let report = run(&cfg);
            match report.write(&cfg.output_dir) {
                Ok(paths) => {
                    for p in paths {
                        println!("{}", p.display());
                    }
                }
                Err(e) => {
                    eprintln!("error: writing outputs to {}: {e}", cfg.output_dir.display());
                    return ExitCode::from(EXIT_NUMERICAL as u8);
                }
            }
            if let Some(err) = &report.error {
                eprintln!("error: {}", err["message"].as_str().unwrap_or("numerical failure"));
            } else if !report.row_errors.is_empty() {
                eprintln!("error: {} scan row(s) failed", report.row_errors.len());
            }
            ExitCode::from(report.exit_code() as u8)
        }
    }
}
