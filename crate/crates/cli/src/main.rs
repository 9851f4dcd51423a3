use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use sma_core::config::{self, SimConfig, PRESETS};
use sma_core::runner::{self, RunError};

const EXIT_CONFIG: u8 = 1;
const EXIT_ABORT: u8 = 2;

#[derive(Parser)]
#[command(name = "sma", version, about = "Shape-memory-alloy bar and slab simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation and write CSV artifacts.
    Run(RunArgs),
    /// Print a built-in preset as a config file (lists presets without a name).
    Preset { name: Option<String> },
}

#[derive(Args)]
struct RunArgs {
    /// Built-in preset to run.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    /// TOML config file to run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "sma-out")]
    out: PathBuf,
    /// Set a config value before validation, e.g. `toggles.gamma=1e-10`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Run once per comma-separated value, concurrently, each into
    /// `<out>/<key>=<value>`, e.g. `toggles.gamma=0,1e-10`.
    #[arg(long, value_name = "KEY=V1,V2,...")]
    sweep: Option<String>,
}

fn load(args: &RunArgs, overrides: &[String]) -> sma_core::Result<SimConfig> {
    match (&args.preset, &args.config) {
        (Some(name), _) => config::load_preset(name, overrides),
        (None, Some(path)) => config::load_config(path, overrides),
        (None, None) => unreachable!("clap requires one of --preset/--config"),
    }
}

/// Runs one configuration and maps the outcome to an exit code.
fn run_one(args: &RunArgs, overrides: &[String], out: &Path) -> u8 {
    let config = match load(args, overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    match runner::run(&config, out) {
        Ok(report) => match report.failure {
            None => {
                println!(
                    "{}: {} steps, {} snapshots written",
                    out.display(),
                    report.steps,
                    report.snapshots
                );
                if let Some(drift) = report.max_energy_drift {
                    println!("{}: max relative energy drift {drift:.3e}", out.display());
                }
                0
            }
            Some(e) => {
                eprintln!("error: {e}; partial output in {}", out.display());
                EXIT_ABORT
            }
        },
        Err(RunError::Config(e)) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

fn parse_sweep(spec: &str) -> anyhow::Result<(String, Vec<String>)> {
    let (key, values) = spec
        .split_once('=')
        .with_context(|| format!("--sweep `{spec}` must have the form key=v1,v2,..."))?;
    let values: Vec<String> = values
        .split(',')
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect();
    if key.trim().is_empty() || values.is_empty() {
        bail!("--sweep `{spec}` needs a key and at least one value");
    }
    Ok((key.trim().to_string(), values))
}

fn run(args: RunArgs) -> anyhow::Result<u8> {
    let Some(spec) = &args.sweep else {
        return Ok(run_one(&args, &args.overrides, &args.out));
    };
    let (key, values) = parse_sweep(spec)?;
    let codes: Vec<u8> = std::thread::scope(|scope| {
        let handles: Vec<_> = values
            .iter()
            .map(|value| {
                let mut overrides = args.overrides.clone();
                overrides.push(format!("{key}={value}"));
                let out = args.out.join(format!("{key}={value}"));
                let args = &args;
                scope.spawn(move || run_one(args, &overrides, &out))
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap_or(EXIT_ABORT)).collect()
    });
    Ok(codes.into_iter().max().unwrap_or(0))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Preset { name: None } => {
            for name in PRESETS {
                println!("{name}");
            }
            Ok(0)
        }
        Command::Preset { name: Some(name) } => match config::preset(&name) {
            Ok(c) => {
                print!("{}", c.to_toml());
                Ok(0)
            }
            Err(e) => {
                eprintln!("error: {e}");
                Ok(EXIT_CONFIG)
            }
        },
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
