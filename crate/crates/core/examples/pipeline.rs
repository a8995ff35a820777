//! Runs every stage on a small grid and lists the artifacts.
//!
//! `cargo run --example pipeline -- [out_dir]`

use bosonstar::io::pipeline::list_artifacts;
use bosonstar::io::{run_pipeline, RunConfig, Stage};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "pipeline_artifacts".into());
    let text = format!("grid.n = 512\ngrid.r_max = 100\nsolver.seed = 1\noutput.directory = {out:?}\n");
    let cfg = RunConfig::from_str_checked(&text)?;
    println!("config hash {}", cfg.config_hash());
    let outcome = run_pipeline(&cfg, Stage::Report);
    for stage in &outcome.completed {
        println!("{stage}: ok");
    }
    for (stage, msg) in &outcome.failures {
        println!("{stage}: {msg}");
    }
    println!("exit code {}", outcome.exit_code);
    for path in list_artifacts(&outcome.directory)? {
        println!("  {}", path.display());
    }
    Ok(())
}
