//! Empirical exceedance probabilities of |f - mean| in units of sqrt(n / ln n)
//! with an exponential-rate fit.
//!
//! cargo run --release --example tail_profile -- 2000

use fpplab::distributions::Distribution;
use fpplab::experiments::{tail_profile_on, ExperimentConfig};

fn main() -> fpplab::Result<()> {
    let replicas: usize = std::env::args().nth(1).map_or(2000, |s| s.parse().expect("replicas"));
    let cfg = ExperimentConfig::new(Distribution::exponential(1.0)?, 2, vec![40], replicas, 1);
    let grid: Vec<f64> = (1..=30).map(|i| i as f64 / 10.0).collect();
    let d = tail_profile_on(&cfg, 40, &grid)?;
    println!("n = {}, m = {}, mean {:.4}, scale {:.4}", d.n, d.m, d.mean, d.scale);
    for r in d.tail.iter().filter(|r| r.exceedances > 0) {
        println!(
            "t = {:.1}: {:>5} exceedances, P = {:.5} [{:.5}, {:.5}] ({:?})",
            r.t, r.exceedances, r.prob, r.prob_lo, r.prob_hi, r.interval
        );
    }
    match d.fit {
        Some(f) => println!(
            "rate {:.3} [{:.3}, {:.3}], R^2 {:.4} over {} points",
            f.rate, f.rate_lo, f.rate_hi, f.r_squared, f.points
        ),
        None => println!("too few exceedances for a fit"),
    }
    Ok(())
}
