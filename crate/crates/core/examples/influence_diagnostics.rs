//! r, s and l(K) with and without the random offset, and how the offset
//! spreads the geodesic away from the edges next to the origin.
//!
//! cargo run --release --example influence_diagnostics -- 32

use fpplab::distributions::Distribution;
use fpplab::experiments::{influence_diagnostics, ExperimentConfig, InfluenceOptions, InfluenceSide};

fn show(label: &str, s: &InfluenceSide) {
    println!(
        "{label:<11} m={} r = {:.4} (bound {:.4}), s = {:.4} (bound {:.4}), l(K) = {:?}, max P(e in gamma) near origin {:.3}",
        s.m, s.r_hat, s.r_bound, s.s_hat, s.s_bound, s.l_k, s.max_presence_near_origin
    );
}

fn main() -> fpplab::Result<()> {
    let n: u64 = std::env::args().nth(1).map_or(32, |s| s.parse().expect("n"));
    let cfg = ExperimentConfig::new(Distribution::exponential(1.0)?, 2, vec![n], 400, 1);
    let opts = InfluenceOptions {
        w_replicas: 50,
        ..InfluenceOptions::default()
    };
    let r = influence_diagnostics(&cfg, n, &opts)?;
    show("plain", &r.plain);
    show("randomized", &r.randomized);
    println!("presence lowered by the offset: {}", r.presence_lowered);
    Ok(())
}
