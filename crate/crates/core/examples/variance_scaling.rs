//! Var(f_n) across n with jackknife intervals, and the linear versus
//! n / ln n model comparison.
//!
//! cargo run --release --example variance_scaling -- 400

use fpplab::distributions::Distribution;
use fpplab::experiments::{fit_scaling, run_variance_scaling, ExperimentConfig};

fn main() -> fpplab::Result<()> {
    let replicas: usize = std::env::args().nth(1).map_or(400, |s| s.parse().expect("replicas"));
    let cfg = ExperimentConfig::new(Distribution::exponential(1.0)?, 2, vec![10, 20, 40, 80], replicas, 1);
    let rows = run_variance_scaling(&cfg)?;
    println!(
        "{:>4} {:>10} {:>9} {:>21} {:>8}",
        "n", "mean", "Var/n", "95% interval", "E|gamma|"
    );
    for r in &rows {
        let n = r.n as f64;
        println!(
            "{:>4} {:>10.4} {:>9.5} [{:>8.5}, {:>8.5}] {:>8.2}",
            r.n,
            r.mean,
            r.var / n,
            r.var_lo / n,
            r.var_hi / n,
            r.geo_len_mean
        );
    }
    let fit = fit_scaling(&rows)?;
    println!(
        "\nVar = c n: c = {:.4}, rss {:.4}\nVar = c n / ln n: c = {:.4}, rss {:.4}\nlog-log slope {:.3} +- {:.3}\npreferred: {:?}; Var/n nonincreasing: {}",
        fit.linear.c,
        fit.linear.residual_ss,
        fit.linear_over_log.c,
        fit.linear_over_log.residual_ss,
        fit.power.slope,
        fit.power.slope_se,
        fit.preferred,
        fit.var_over_n_nonincreasing
    );
    Ok(())
}
