//! Scenario runner CLI.
//!
//! `alexandrov run <config.json>` executes the checks declared in a config
//! (a file path or the name of a bundled scenario) and writes `report.json`
//! plus per-check CSV tables to the output directory. Exit codes: 0 when
//! every non-diagnostic check passes, 1 on check failure, 2 on config or
//! reference errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use alexandrov::scenario::{
    bundled_scenario, bundled_scenarios, emit_tables, parse_config, run_scenario,
    write_report_json, CheckStatus, ScenarioError,
};

#[derive(Parser)]
#[command(name = "alexandrov", about = "Comparison-geometry scenario runner", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config (a JSON file or a bundled scenario name).
    Run {
        /// Path to a config file, or a bundled scenario name.
        config: Option<String>,
        /// Output directory for report.json and CSV tables.
        /// Defaults to $ALEXANDROV_OUT, then `./out`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed override for randomized checks.
        #[arg(long)]
        seed: Option<u64>,
        /// List bundled scenario names and exit.
        #[arg(long)]
        list_scenarios: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out, seed, list_scenarios } => {
            if list_scenarios {
                for (name, _) in bundled_scenarios() {
                    println!("{name}");
                }
                return ExitCode::SUCCESS;
            }
            let Some(config) = config else {
                eprintln!("error: missing config (file path or bundled scenario name)");
                return ExitCode::from(2);
            };
            let out = out
                .or_else(|| std::env::var_os("ALEXANDROV_OUT").map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("out"));
            match run(&config, &out, seed) {
                Ok(all_passed) => {
                    if all_passed {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}

fn run(config_arg: &str, out: &Path, seed: Option<u64>) -> Result<bool, ScenarioError> {
    let (text, base_dir) = match bundled_scenario(config_arg) {
        Some(text) => (text.to_string(), PathBuf::from(".")),
        None => {
            let path = PathBuf::from(config_arg);
            let text = std::fs::read_to_string(&path).map_err(|e| {
                ScenarioError::Config(format!(
                    "`{config_arg}` is neither a bundled scenario nor a readable file: {e}"
                ))
            })?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
            (text, base)
        }
    };
    let config = parse_config(&text)?;
    let report = run_scenario(&config, &base_dir, seed)?;
    let out_dir = out.join(&report.scenario);
    write_report_json(&report, &out_dir)?;
    emit_tables(&report, &out_dir)?;
    for check in &report.checks {
        let status = match check.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Diagnostic => "diag",
        };
        println!("[{status}] {:02} {}", check.index, check.op);
    }
    println!(
        "{}: {} checks, {} failed; outputs in {}",
        report.scenario,
        report.checks.len(),
        report.failed_count(),
        out_dir.display()
    );
    Ok(report.all_passed())
}
