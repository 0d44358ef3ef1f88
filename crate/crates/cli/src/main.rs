use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use magtorus_cli::commands::{self, B_FILE, INVARIANTS_FILE, V_FILE};
use magtorus_cli::ExperimentConfig;

#[derive(Parser, Debug)]
#[command(
    name = "magtorus",
    version,
    about = "Spectral invariants and inverse reconstruction on a magnetic torus"
)]
struct Cli {
    /// Experiment config (TOML); defaults are used for missing keys
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Harmonics per direction
    #[arg(long, global = true)]
    k: Option<usize>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Largest primitive direction (sup norm of its dual coordinates)
    #[arg(long = "max-dir", global = true)]
    max_dir: Option<i64>,

    /// Inversion samples per direction
    #[arg(long, global = true)]
    grid: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a random admissible B and a mean-zero V
    Synth,
    /// Compute the invariants of B and V
    Forward {
        /// Defaults to <out>/B.toml
        b: Option<PathBuf>,
        /// Defaults to <out>/V.toml
        v: Option<PathBuf>,
    },
    /// Reconstruct B and V from an invariant file
    Invert {
        /// Defaults to <out>/invariants.toml
        invariants: Option<PathBuf>,
    },
    /// synth + forward + invert, with a K sweep and plots
    Roundtrip,
    /// Genericity, flux and commutator diagnostics for the lattice
    Check {
        /// Mean field; defaults to one flux quantum
        #[arg(long)]
        b0: Option<f64>,
        #[arg(long)]
        radius: Option<f64>,
    },
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(k) = cli.k {
        cfg.k = k;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    if let Some(d) = cli.max_dir {
        cfg.max_dir = d;
    }
    if let Some(m) = cli.grid {
        cfg.m = m;
    }
    if let Command::Check { b0, radius } = &cli.command {
        cfg.b0 = b0.or(cfg.b0);
        cfg.radius = radius.unwrap_or(cfg.radius);
    }
    Ok(cfg)
}

fn run(cli: &Cli, log: &mut dyn Write) -> Result<()> {
    let cfg = load_config(cli).context("config")?;
    match &cli.command {
        Command::Synth => commands::synth(&cfg, log).context("synth stage").map(drop),
        Command::Forward { b, v } => {
            let b = b.clone().unwrap_or_else(|| cfg.out.join(B_FILE));
            let v = v.clone().unwrap_or_else(|| cfg.out.join(V_FILE));
            commands::forward(&cfg, &b, &v, log).context("forward stage").map(drop)
        }
        Command::Invert { invariants } => {
            let p = invariants.clone().unwrap_or_else(|| cfg.out.join(INVARIANTS_FILE));
            commands::invert(&cfg, &p, log).context("invert stage").map(drop)
        }
        Command::Roundtrip => commands::roundtrip(&cfg, log).map(drop),
        Command::Check { .. } => commands::check(&cfg, log).context("check"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    match run(&cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
