use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bosonstar::io::pipeline::{EXIT_CONFIG, EXIT_OK};
use bosonstar::io::{parse_config, run_pipeline, RunConfig, Stage};

#[derive(Parser)]
#[command(name = "bosonstar", version, about = "Ground state, linearization and halfspace diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Configuration file (dotted `key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Last stage to run (pipeline only).
    #[arg(long, global = true)]
    stage: Option<Stage>,
    /// Artifact directory, overrides output.directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long = "grid-n", global = true)]
    grid_n: Option<usize>,
    #[arg(long = "grid-rmax", global = true)]
    grid_rmax: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Solve for the ground state.
    Solve,
    /// Solve and run the qualitative checks.
    Verify,
    /// ... and the sector spectra of the linearization.
    Linearize,
    /// ... and the halfspace extension diagnostics.
    Extend,
    /// ... and write plot data.
    Report,
    /// Run every stage, or up to --stage.
    Pipeline,
}

fn load(cli: &Cli) -> bosonstar::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => parse_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.output.directory = out.display().to_string();
    }
    if let Some(seed) = cli.seed {
        cfg.solver.seed = seed;
    }
    if let Some(n) = cli.grid_n {
        cfg.grid.n = n;
    }
    if let Some(r) = cli.grid_rmax {
        cfg.grid.r_max = r;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let until = match cli.command {
        Command::Solve => Stage::Solve,
        Command::Verify => Stage::Verify,
        Command::Linearize => Stage::Linearize,
        Command::Extend => Stage::Extend,
        Command::Report => Stage::Report,
        Command::Pipeline => cli.stage.unwrap_or(Stage::Report),
    };
    let outcome = run_pipeline(&cfg, until);
    for stage in &outcome.completed {
        println!("{stage}: ok");
    }
    for (stage, msg) in &outcome.failures {
        eprintln!("{stage}: {msg}");
    }
    println!("artifacts in {}", outcome.directory.display());
    if outcome.exit_code == EXIT_OK {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(outcome.exit_code as u8)
    }
}
