//! Runs a study and writes the JSON report, the CSV table and an SVG chart,
//! the same files `fpplab simulate --out DIR --format csv --svg` produces.
//!
//! cargo run --example reports -- /tmp/fpplab-report

use std::path::PathBuf;

use fpplab::cli::chart;
use fpplab::distributions::Distribution;
use fpplab::experiments::{run_study, to_json, ExperimentConfig, Study};

fn main() -> fpplab::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fpplab-report".into()));
    std::fs::create_dir_all(&dir)?;
    let cfg = ExperimentConfig::new(Distribution::gamma(2.0, 2.0)?, 2, vec![8, 16, 32], 200, 7);
    let out = run_study(&cfg, &Study::Scaling)?;
    std::fs::write(dir.join("scaling.json"), to_json(&out.report)?)?;
    std::fs::write(dir.join("scaling.csv"), out.csv().expect("scaling rows"))?;
    if let Some(svg) = chart(&out.report)? {
        std::fs::write(dir.join("scaling.svg"), svg)?;
    }
    println!("wrote scaling.json, scaling.csv and scaling.svg to {}", dir.display());
    print!("{}", out.csv().unwrap());
    Ok(())
}
