//! Random-table suite for the exact product-space checks.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    jensen_denominators, martingale_increments, martingale_increments_oracle, verify_energy_decomposition,
    verify_fs_bound, verify_modified_poincare, ProductTable, MAX_N,
};
use crate::error::{domain, Result};
use crate::rng::{replica_rng, Stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub tables: usize,
    pub n_min: usize,
    pub n_max: usize,
    /// Each `p_i` is drawn uniformly from this list.
    pub p_choices: Vec<f64>,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            tables: 1000,
            n_min: 2,
            n_max: 12,
            p_choices: vec![0.1, 0.5, 0.9],
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// I.i.d. uniform values on [0, 1].
    Uniform,
    /// `x_i` for a random coordinate.
    Dictator,
    /// `(-1)^{sum_{i in S} x_i}` for a random nonempty `S`.
    Parity,
    /// Indicator of a Hamming ball with random center and radius.
    HammingBall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstTable {
    pub index: usize,
    pub family: Family,
    pub p: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    /// IEEE-754 bit patterns of the values, in index order.
    pub values_hex: Vec<String>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub config: SuiteConfig,
    pub family_counts: [usize; 4],
    pub modified_poincare_violations: usize,
    pub fs_violations: usize,
    pub energy_violations: usize,
    pub jensen_violations: usize,
    pub increment_sum_violations: usize,
    pub oracle_mismatches: usize,
    /// Smallest `slack / rhs` of the modified Poincaré check (0 when `rhs = 0`).
    pub min_poincare_relative_slack: f64,
    pub min_poincare_slack: f64,
    pub min_fs_relative_slack: f64,
    pub min_fs_slack: f64,
    pub max_energy_relative_error: f64,
    /// Table with the smallest modified Poincaré relative slack.
    pub worst: Option<WorstTable>,
    pub all_pass: bool,
}

struct TableOutcome {
    family: Family,
    table: ProductTable,
    mp: super::IneqReport,
    fs_pass: bool,
    fs_rel: f64,
    fs_slack: f64,
    energy_failures: usize,
    energy_err: f64,
    jensen_ok: bool,
    sum_ok: bool,
    oracle_ok: bool,
}

fn relative(slack: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        slack / rhs
    } else {
        slack.min(0.0)
    }
}

fn draw_table(cfg: &SuiteConfig, index: usize) -> Result<(Family, ProductTable)> {
    let mut rng = replica_rng(cfg.seed, index as u64, Stream::Tables);
    let n = rng.random_range(cfg.n_min..=cfg.n_max);
    let p: Vec<f64> = (0..n)
        .map(|_| cfg.p_choices[rng.random_range(0..cfg.p_choices.len())])
        .collect();
    let family = match rng.random_range(0..10) {
        0..=3 => Family::Uniform,
        4 | 5 => Family::Dictator,
        6 | 7 => Family::Parity,
        _ => Family::HammingBall,
    };
    let table = match family {
        Family::Uniform => {
            let values = (0..1usize << n).map(|_| rng.random::<f64>()).collect();
            ProductTable::new(p, values)?
        }
        Family::Dictator => {
            let i = rng.random_range(0..n);
            ProductTable::from_fn(p, |x| x[i] as u8 as f64)?
        }
        Family::Parity => {
            let mut set: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
            if !set.iter().any(|&b| b) {
                set[rng.random_range(0..n)] = true;
            }
            ProductTable::from_fn(p, |x| {
                let odd = x.iter().zip(&set).filter(|(&a, &b)| a && b).count() % 2 == 1;
                if odd {
                    -1.0
                } else {
                    1.0
                }
            })?
        }
        Family::HammingBall => {
            let center: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
            let radius = rng.random_range(0..n);
            ProductTable::from_fn(p, |x| {
                let dist = x.iter().zip(&center).filter(|(a, b)| a != b).count();
                (dist <= radius) as u8 as f64
            })?
        }
    };
    Ok((family, table))
}

fn evaluate(family: Family, table: ProductTable) -> Result<TableOutcome> {
    let values = table.values();
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mean = table.expectation(values);
    let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    let (n, mean_abs) = (table.n() as f64, table.expectation(&abs));
    let inc = martingale_increments(&table);
    let sum_ok = (0..values.len()).all(|x| {
        let s: f64 = inc.iter().map(|v| v[x]).sum();
        (s - (values[x] - mean)).abs() <= 1e-12 * scale
    });
    let oracle = martingale_increments_oracle(&table);
    let oracle_ok = inc
        .iter()
        .flatten()
        .zip(oracle.iter().flatten())
        .all(|(a, b)| (a - b).abs() <= 1e-12 * scale);
    let mp = verify_modified_poincare(&table)?;
    let fs = verify_fs_bound(&table)?;
    let mut energy_failures = 0;
    let mut energy_err = 0.0f64;
    for i in 1..=table.n() {
        let e = verify_energy_decomposition(&table, i)?;
        energy_err = energy_err.max(e.abs_diff / e.energy.max(1.0));
        energy_failures += (!e.pass) as usize;
    }
    let (inc_denom, full_denom) = jensen_denominators(&table);
    Ok(TableOutcome {
        family,
        mp,
        fs_pass: fs.pass,
        fs_rel: relative(fs.slack, fs.rhs),
        fs_slack: fs.slack,
        energy_failures,
        energy_err,
        // Equality is common (e.g. Hamming balls), and the increments carry
        // absolute rounding of order eps E|f| per coordinate.
        jensen_ok: inc_denom.sqrt() <= full_denom.sqrt() * (1.0 + 1e-12) + 16.0 * n * f64::EPSILON * mean_abs,
        sum_ok,
        oracle_ok,
        table,
    })
}

/// Runs every exact check on `cfg.tables` random tables, in parallel.
/// The summary is independent of the worker count.
pub fn random_suite(cfg: &SuiteConfig) -> Result<SuiteSummary> {
    if cfg.n_min == 0 || cfg.n_min > cfg.n_max || cfg.n_max > MAX_N {
        return domain(format!(
            "suite needs 1 <= n_min <= n_max <= {MAX_N} (got {}..{})",
            cfg.n_min, cfg.n_max
        ));
    }
    if cfg.p_choices.is_empty() {
        return domain("suite needs at least one Bernoulli parameter");
    }
    let outcomes: Vec<TableOutcome> = (0..cfg.tables)
        .into_par_iter()
        .map(|t| draw_table(cfg, t).and_then(|(fam, table)| evaluate(fam, table)))
        .collect::<Result<_>>()?;

    let mut s = SuiteSummary {
        config: cfg.clone(),
        family_counts: [0; 4],
        modified_poincare_violations: 0,
        fs_violations: 0,
        energy_violations: 0,
        jensen_violations: 0,
        increment_sum_violations: 0,
        oracle_mismatches: 0,
        min_poincare_relative_slack: f64::INFINITY,
        min_poincare_slack: f64::INFINITY,
        min_fs_relative_slack: f64::INFINITY,
        min_fs_slack: f64::INFINITY,
        max_energy_relative_error: 0.0,
        worst: None,
        all_pass: true,
    };
    for (index, o) in outcomes.iter().enumerate() {
        s.family_counts[o.family as usize] += 1;
        s.modified_poincare_violations += (!o.mp.pass) as usize;
        s.fs_violations += (!o.fs_pass) as usize;
        s.energy_violations += o.energy_failures;
        s.jensen_violations += (!o.jensen_ok) as usize;
        s.increment_sum_violations += (!o.sum_ok) as usize;
        s.oracle_mismatches += (!o.oracle_ok) as usize;
        s.min_poincare_slack = s.min_poincare_slack.min(o.mp.slack);
        s.min_fs_relative_slack = s.min_fs_relative_slack.min(o.fs_rel);
        s.min_fs_slack = s.min_fs_slack.min(o.fs_slack);
        s.max_energy_relative_error = s.max_energy_relative_error.max(o.energy_err);
        let rel = relative(o.mp.slack, o.mp.rhs);
        if rel < s.min_poincare_relative_slack {
            s.min_poincare_relative_slack = rel;
            s.worst = Some(WorstTable {
                index,
                family: o.family,
                p: o.table.p().to_vec(),
                lhs: o.mp.lhs,
                rhs: o.mp.rhs,
                slack: o.mp.slack,
                values_hex: o
                    .table
                    .values()
                    .iter()
                    .map(|v| format!("{:016x}", v.to_bits()))
                    .collect(),
                values: o.table.values().to_vec(),
            });
        }
    }
    s.all_pass = s.modified_poincare_violations == 0
        && s.fs_violations == 0
        && s.energy_violations == 0
        && s.jensen_violations == 0
        && s.increment_sum_violations == 0
        && s.oracle_mismatches == 0;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes_and_is_reproducible() {
        let cfg = SuiteConfig {
            tables: 60,
            n_max: 8,
            ..SuiteConfig::default()
        };
        let a = random_suite(&cfg).unwrap();
        assert!(a.all_pass, "{a:?}");
        assert!(a.family_counts.iter().all(|&c| c > 0));
        let b = random_suite(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bad_configs() {
        let mut cfg = SuiteConfig::default();
        cfg.n_min = 0;
        assert!(random_suite(&cfg).is_err());
        let mut cfg = SuiteConfig::default();
        cfg.p_choices.clear();
        assert!(random_suite(&cfg).is_err());
    }
}
