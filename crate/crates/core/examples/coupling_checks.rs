//! Coupled comparisons: truncated against original weights, the Bernoulli
//! energy bound, and the box-margin sensitivity.
//!
//! cargo run --release --example coupling_checks

use fpplab::distributions::{Bump, Distribution};
use fpplab::experiments::{
    bernoulli_energy_check, margin_sensitivity, truncation_experiment, ExperimentConfig, MPolicy,
};

fn main() -> fpplab::Result<()> {
    let exp = ExperimentConfig::new(Distribution::exponential(1.0)?, 2, vec![20], 300, 1);
    for k in [2, 100] {
        let t = truncation_experiment(&exp, 20, k, 8.0, Bump::default())?;
        println!(
            "truncation k = {k}: cutoff {:.3}, weight violations {}, time violations {}, mean gap {:.2e}, max gap {:.2e}",
            t.cutoff, t.weight_violations, t.time_violations, t.mean_gap, t.max_gap
        );
    }

    let mut bern =
        ExperimentConfig::new(Distribution::bernoulli(1.0, 2.0, 0.5)?, 2, vec![9], 300, 1).with_m_policy(MPolicy::Off);
    bern.direction = vec![1, 1];
    bern.margin_factor = 0.0;
    let e = bernoulli_energy_check(&bern)?;
    for r in &e.rows {
        println!(
            "energy bound on 10x10 boxes: {} violations, max V/bound {:.4}",
            r.violations, r.max_ratio
        );
    }

    let m = margin_sensitivity(&exp, 20)?;
    println!(
        "margin {} -> {}: mean {:.5} -> {:.5}, CI half-width {:.5}, pass {}",
        m.margin, m.doubled_margin, m.mean, m.mean_doubled, m.ci_half_width, m.pass
    );
    Ok(())
}
