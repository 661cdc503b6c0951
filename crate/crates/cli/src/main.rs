//! `sgsim`: runs the lattice sine-Gordon experiments and gate checks from a
//! TOML config and writes a table plus a `.manifest` next to it.

mod commands;
mod config;
mod error;
mod output;

use clap::{Parser, Subcommand};
use config::{OutputFormat, RunConfig};
use error::CliError;
use output::{config_hash, output_path, versions, write_manifest, Manifest, Report};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(name = "sgsim", version, about = "Hybrid qubit-qumode simulator for the lattice sine-Gordon model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Table format (overrides `output.format`).
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Write the circuit of one step in text form.
    #[arg(long)]
    dump_circuit: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Survival probability of the free vacuum under real-time evolution.
    Evolve(RunArgs),
    /// Imaginary-time evolution toward the ground state.
    Qite(RunArgs),
    /// Connected vertex-operator correlator.
    Correlator(RunArgs),
    /// Quantum kink profile around the classical solution.
    Kink(RunArgs),
    /// Circuit error of the compiled trigonometric gates.
    Gatecheck(RunArgs),
}

impl Command {
    fn parts(&self) -> (&'static str, &RunArgs) {
        match self {
            Command::Evolve(a) => ("evolve", a),
            Command::Qite(a) => ("qite", a),
            Command::Correlator(a) => ("correlator", a),
            Command::Kink(a) => ("kink", a),
            Command::Gatecheck(a) => ("gatecheck", a),
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let (name, args) = cli.command.parts();
    let text = fs::read_to_string(&args.config).map_err(|e| CliError::config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = RunConfig::parse(&text)?;
    if let Some(dir) = &args.out {
        cfg.output.dir = dir.clone();
    }
    if let Some(f) = args.format {
        cfg.output.format = f;
    }
    let start = Instant::now();
    let mut report = Report::default();
    let out = match &cli.command {
        Command::Evolve(_) => commands::evolve::run(&cfg, &mut report)?,
        Command::Qite(_) => commands::qite::run(&cfg, &mut report)?,
        Command::Correlator(_) => commands::correlator::run(&cfg, &mut report)?,
        Command::Kink(_) => commands::kink::run(&cfg, &mut report)?,
        Command::Gatecheck(_) => commands::gatecheck::run(&cfg, &mut report)?,
    };
    let elapsed = start.elapsed().as_secs_f64();

    let dir = &cfg.output.dir;
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let base = cfg.output.name.clone().unwrap_or_else(|| name.to_string());
    let ext = match cfg.output.format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    };
    let table_path = output_path(dir, &base, ext);
    out.table.write(&table_path, cfg.output.format)?;
    if let Some(path) = &args.dump_circuit {
        match &out.circuit {
            Some(c) => fs::write(path, c.to_text()).map_err(|e| CliError::io(path, e))?,
            None => eprintln!("sgsim: no circuit to dump for this run"),
        }
    }
    let manifest = Manifest {
        command: name,
        config_sha256: config_hash(&text),
        config: serde_json::to_value(&cfg)?,
        versions: versions(),
        wall_clock_seconds: elapsed,
        table: table_path.display().to_string(),
        derived: &report.derived,
    };
    write_manifest(&output_path(dir, &base, "manifest"), &manifest)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sgsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
