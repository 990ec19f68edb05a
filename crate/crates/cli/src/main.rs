//! `nucsl`: oscillation damping under collapse models from the command line.
//!
//! Settings are resolved as defaults, then the `--config` TOML file, then
//! `key=value` overrides, then the `--out`, `--format` and `--seed` flags.
//! Exit status: 0 on success, 1 on invalid input, 2 when a check fails.

mod commands;
mod config;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use toml::Table;

use commands::{CmdError, Outcome};
use config::{apply_override, from_table, read_table, ConfigError, Format, RunConfig};

type Runner = fn(&RunConfig) -> Result<Outcome, CmdError>;

#[derive(Parser)]
#[command(
    name = "nucsl",
    version,
    about = "Neutrino oscillation damping under collapse models"
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Flavor transition probabilities with and without collapse damping.
    Oscillate(Common),
    /// Oscillate over an energy or time grid, next to the competing effects.
    Scan(Common),
    /// Damping exponents for the cosmogenic, solar and laboratory sources.
    Table1(Common),
    /// Gravity-induced damping exponent over a mass grid.
    Dp(Common),
    /// Environmental decoherence along the flight path.
    Decoherence(Common),
    /// Numerical checks of the approximations behind the closed-form rate.
    Check(Common),
    /// Monte Carlo estimate of the dephasing of one eigenstate pair.
    Montecarlo(Common),
}

#[derive(Args, Default)]
struct Common {
    /// TOML configuration file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write results here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    seed: Option<u64>,
    /// Dotted-key overrides such as `collapse.gamma=1e-20`.
    #[arg(value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn resolve(common: &Common) -> Result<RunConfig, ConfigError> {
    let mut table = match &common.config {
        Some(path) => read_table(path)?,
        None => Table::new(),
    };
    for o in &common.overrides {
        apply_override(&mut table, o)?;
    }
    let mut cfg = from_table(table)?;
    if let Some(f) = common.format {
        cfg.output.format = f;
    }
    if let Some(p) = &common.out {
        cfg.output.path = Some(p.clone());
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn emit(outcome: &Outcome, cfg: &RunConfig) -> io::Result<()> {
    let format = cfg.output.format;
    match &cfg.output.path {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            outcome.report.write(&mut w, format, cfg, cfg.seed)?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            outcome.report.write(&mut w, format, cfg, cfg.seed)?;
            w.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (run, common): (Runner, Common) = match cli.command {
        Some(Command::Oscillate(c)) => (commands::oscillate, c),
        Some(Command::Scan(c)) => (commands::scan, c),
        Some(Command::Table1(c)) => (commands::table, c),
        Some(Command::Dp(c)) => (commands::dp, c),
        Some(Command::Decoherence(c)) => (commands::decoherence, c),
        Some(Command::Check(c)) => (commands::check, c),
        Some(Command::Montecarlo(c)) => (commands::montecarlo, c),
        None => (commands::table, Common::default()),
    };
    let cfg = match resolve(&common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = emit(&outcome, &cfg) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        eprintln!("error: one or more checks failed");
        ExitCode::from(2)
    }
}
