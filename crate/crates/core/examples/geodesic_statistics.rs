//! Geodesic length moments and ball-restricted counts.
//!
//! cargo run --release --example geodesic_statistics

use fpplab::distributions::Distribution;
use fpplab::experiments::{geodesic_stats, ExperimentConfig};

fn main() -> fpplab::Result<()> {
    let cfg = ExperimentConfig::new(Distribution::exponential(1.0)?, 2, vec![10, 20, 40], 1000, 1);
    let stats = geodesic_stats(&cfg, &[2, 3, 4])?;
    for row in &stats.rows {
        println!(
            "n = {:>3}: E|gamma| = {:.2}, E|gamma|^2 / n^2 = {:.4} [{:.4}, {:.4}]",
            row.n, row.len_mean, row.ratio, row.ratio_lo, row.ratio_hi
        );
        for b in &row.balls {
            println!(
                "    ball m = {} (radius {}): E|gamma in B| = {:.3}, per m^(d-1) {:.3}",
                b.m, b.radius, b.mean, b.per_surface
            );
        }
    }
    println!("E|gamma|^2 / n^2 bounded across n: {}", stats.ratio_bounded);
    Ok(())
}
