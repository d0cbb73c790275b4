//! The truncated law nu_k: where it starts to differ from the base law and
//! that it is stochastically smaller.
//!
//! cargo run --example truncation -- 100 8

use fpplab::distributions::{Bump, Distribution, Kind};

fn main() -> fpplab::Result<()> {
    let mut args = std::env::args().skip(1);
    let k: u64 = args.next().map_or(100, |s| s.parse().expect("k"));
    let c5: f64 = args.next().map_or(8.0, |s| s.parse().expect("c5"));
    let base = Distribution::exponential(1.0)?;
    for bump in [Bump::default(), Bump::Quartic] {
        let law = Distribution::truncate(&base, k, c5, bump)?;
        let Kind::Truncated(t) = law.kind() else { unreachable!() };
        println!(
            "{law}\n  identical below {:.4}, supported below {:.4}, moved mass {:.3e}",
            t.threshold(),
            t.cutoff(),
            t.repatriated_mass()
        );
        let worst = (0..=10_000)
            .map(|i| 1.2 * t.cutoff() * i as f64 / 10_000.0)
            .map(|x| law.cdf(x) - base.cdf(x))
            .fold(f64::INFINITY, f64::min);
        println!("  min (H_k - H) on the grid: {worst:.3e}");
        let (lo, hi) = (t.threshold(), t.cutoff());
        for x in [lo, 0.5 * (lo + hi), hi] {
            println!("  x = {x:>9.4}: H = {:.17}, H_k = {:.17}", base.cdf(x), law.cdf(x));
        }
    }
    Ok(())
}
