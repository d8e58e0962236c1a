//! `polariton`: command-line front end of the polariton toolkit.
//!
//! Exit codes: 0 on success, 1 on invalid input, 2 when a numerical check
//! exceeds its tolerance. Failures are described by a JSON object on
//! standard error; data goes to standard output or to `--out`.

mod commands;
mod error;
mod scenario;
mod table;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::{CliError, CliResult};
use crate::scenario::Scenario;
use crate::table::{pretty, Format, Output};

#[derive(Parser)]
#[command(name = "polariton", version, about = "Polaritons in dispersive absorbing dielectrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (JSON); defaults to the built-in reference scenario.
    #[arg(long, value_name = "FILE")]
    scenario: Option<PathBuf>,
    /// Directory for output files; standard output when omitted.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Table encoding.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads for parameter sweeps (default: all cores).
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Complex polariton roots over a wavenumber sweep.
    Dispersion(Common),
    /// Residue-sum propagators against the Bromwich inversion.
    Propagator(Common),
    /// Sum-rule check of a root set.
    Sumrules(Common),
    /// Dyadic Green tensor components.
    Green(Common),
    /// Lossless normal modes and the diagonal energy check.
    Hopfield(Common),
    /// Windowed commutator integrals of weakly damped modes.
    Quasimode(Common),
    /// Time evolution of the field–bath oscillator network.
    Evolve(Common),
    /// Runs the invariant suite.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Skip the long bath simulations.
        #[arg(long)]
        quick: bool,
    },
}

fn load(common: &Common) -> CliResult<Scenario> {
    match &common.scenario {
        Some(p) => Scenario::load(p),
        None => Ok(Scenario::default()),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let (common, output): (&Common, Box<dyn FnOnce(&Scenario) -> CliResult<Output>>) = match &cli.command {
        Command::Dispersion(c) => (c, Box::new(commands::dispersion)),
        Command::Propagator(c) => (c, Box::new(commands::propagator)),
        Command::Sumrules(c) => (c, Box::new(commands::sumrules)),
        Command::Green(c) => (c, Box::new(commands::green)),
        Command::Hopfield(c) => (c, Box::new(commands::hopfield)),
        Command::Quasimode(c) => (c, Box::new(commands::quasimode)),
        Command::Evolve(c) => (c, Box::new(commands::evolve)),
        Command::Verify { common, quick } => {
            let quick = *quick;
            (common, Box::new(move |_: &Scenario| verify::verify(quick)))
        }
    };
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(CliError::validation("--threads", "must be ≥ 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::validation("--threads", e.to_string()))?;
    }
    let scenario = load(common)?;
    let out = output(&scenario)?;
    out.emit(common.out.as_deref(), common.format)?;
    match out.failure {
        Some(f) => {
            if let Some(dir) = &common.out {
                write_failure(dir, &f);
            }
            Err(f)
        }
        None => Ok(()),
    }
}

fn write_failure(dir: &Path, f: &CliError) {
    let path = dir.join("failure.json");
    if let Err(e) = std::fs::write(&path, pretty(&f.to_json())) {
        log::error!("cannot write {}: {e}", path.display());
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&e.to_json()).expect("JSON values serialize"));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
