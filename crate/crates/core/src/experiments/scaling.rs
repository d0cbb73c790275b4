use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{map_replicas, variance_with_ci, ExperimentConfig, Setup};
use crate::error::{domain, Result};
use crate::stats::{least_squares, mean, LinearFit};

/// Per-`n` summary of the passage time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: u64,
    pub m: usize,
    pub mean: f64,
    pub var: f64,
    pub var_lo: f64,
    pub var_hi: f64,
    pub geo_len_mean: f64,
    pub geo_len_sq_mean: f64,
    /// Replicas whose geodesic was not unique.
    pub ties: usize,
    /// Wall time for the row; 0 unless timings are enabled.
    pub seconds: f64,
}

impl ScalingRow {
    /// Mean and standard error of the mean.
    fn mean_se(&self, replicas: usize) -> f64 {
        (self.var / replicas as f64).sqrt()
    }
}

pub(crate) struct Sample {
    pub times: Vec<f64>,
    pub lens: Vec<f64>,
    pub ties: usize,
}

pub(crate) fn sample_times(cfg: &ExperimentConfig, setup: &Setup) -> Result<Sample> {
    let out = map_replicas(cfg, setup, cfg.replicas, |r| {
        Ok((r.result.time, r.result.len(), r.result.unique))
    })?;
    Ok(Sample {
        times: out.iter().map(|o| o.0).collect(),
        lens: out.iter().map(|o| o.1 as f64).collect(),
        ties: out.iter().filter(|o| !o.2).count(),
    })
}

/// One [`ScalingRow`] per `n`, with a jackknife interval on the variance.
pub fn run_variance_scaling(cfg: &ExperimentConfig) -> Result<Vec<ScalingRow>> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.ns.len());
    for &n in &cfg.ns {
        let start = Instant::now();
        let setup = Setup::new(cfg, n, cfg.m_policy.m_for(n))?;
        let s = sample_times(cfg, &setup)?;
        let (var, var_lo, var_hi) = variance_with_ci(&s.times);
        rows.push(ScalingRow {
            n,
            m: setup.m,
            mean: mean(&s.times),
            var,
            var_lo,
            var_hi,
            geo_len_mean: mean(&s.lens),
            geo_len_sq_mean: s.lens.iter().map(|l| l * l).sum::<f64>() / s.lens.len() as f64,
            ties: s.ties,
            seconds: if cfg.timings {
                start.elapsed().as_secs_f64()
            } else {
                0.0
            },
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preference {
    /// `Var = c n`.
    Linear,
    /// `Var = c n / ln n`.
    LinearOverLog,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub c: f64,
    /// Residual sum of squares of `ln Var`.
    pub residual_ss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub linear: ModelFit,
    pub linear_over_log: ModelFit,
    /// Free fit `ln Var = exponent * ln n + const`.
    pub power: LinearFit,
    /// Expected residual scale from the row intervals; differences below it decide nothing.
    pub noise_floor: f64,
    pub preferred: Preference,
    /// `Var / n` is nonincreasing within the row intervals.
    pub var_over_n_nonincreasing: bool,
}

fn fit_model(ln_n: &[f64], ln_var: &[f64], ln_g: impl Fn(f64) -> f64) -> ModelFit {
    let resid: Vec<f64> = ln_n.iter().zip(ln_var).map(|(&x, &y)| y - ln_g(x)).collect();
    let ln_c = mean(&resid);
    ModelFit {
        c: ln_c.exp(),
        residual_ss: resid.iter().map(|r| (r - ln_c).powi(2)).sum(),
    }
}

/// Compares `Var = c n` against `Var = c n / ln n` by least squares on `ln Var`.
pub fn fit_scaling(rows: &[ScalingRow]) -> Result<FitReport> {
    if rows.len() < 3 {
        return domain(format!("fit_scaling needs at least 3 rows, got {}", rows.len()));
    }
    if rows.iter().any(|r| !(r.var > 0.0) || r.n < 2) {
        return domain("fit_scaling needs positive variances and n >= 2");
    }
    let ln_n: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ln_var: Vec<f64> = rows.iter().map(|r| r.var.ln()).collect();
    let linear = fit_model(&ln_n, &ln_var, |x| x);
    let linear_over_log = fit_model(&ln_n, &ln_var, |x| x - x.ln());
    let power = least_squares(&ln_n, &ln_var);
    // variance of ln Var from the 95% interval width
    let noise_floor: f64 = rows
        .iter()
        .filter(|r| r.var_hi.is_finite())
        .map(|r| ((r.var_hi - r.var_lo) / (2.0 * 1.96 * r.var)).powi(2))
        .sum::<f64>()
        .max(1e-12);
    let gap = linear.residual_ss - linear_over_log.residual_ss;
    let preferred = if gap.abs() <= noise_floor {
        Preference::Inconclusive
    } else if gap < 0.0 {
        Preference::Linear
    } else {
        Preference::LinearOverLog
    };
    let var_over_n_nonincreasing = rows.windows(2).all(|w| {
        let (a, b) = (&w[0], &w[1]);
        b.var_lo / b.n as f64 <= a.var_hi / a.n as f64
    });
    Ok(FitReport {
        linear,
        linear_over_log,
        power,
        noise_floor,
        preferred,
        var_over_n_nonincreasing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeConstantRow {
    pub n: u64,
    pub mean: f64,
    /// `mean / n` with a 95% normal interval.
    pub rate: f64,
    pub rate_lo: f64,
    pub rate_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeConstantReport {
    pub direction: Vec<i64>,
    pub rows: Vec<TimeConstantRow>,
    /// `(n, E f_{2n} - 2 E f_n, allowed slack)` for every pair in the grid.
    pub subadditivity: Vec<(u64, f64, f64)>,
    pub subadditive: bool,
}

/// `E f_{n u} / n` across the grid, with the subadditivity check `E f_{2n} <= 2 E f_n`.
pub fn estimate_time_constant(cfg: &ExperimentConfig) -> Result<TimeConstantReport> {
    let rows = run_variance_scaling(cfg)?;
    let tc: Vec<TimeConstantRow> = rows
        .iter()
        .map(|r| {
            let half = 1.96 * r.mean_se(cfg.replicas) / r.n as f64;
            let rate = r.mean / r.n as f64;
            TimeConstantRow {
                n: r.n,
                mean: r.mean,
                rate,
                rate_lo: rate - half,
                rate_hi: rate + half,
            }
        })
        .collect();
    let mut subadditivity = Vec::new();
    for a in &rows {
        if let Some(b) = rows.iter().find(|b| b.n == 2 * a.n) {
            let excess = b.mean - 2.0 * a.mean;
            let slack = 1.96 * (b.mean_se(cfg.replicas).powi(2) + 4.0 * a.mean_se(cfg.replicas).powi(2)).sqrt();
            subadditivity.push((a.n, excess, slack));
        }
    }
    Ok(TimeConstantReport {
        direction: cfg.direction.clone(),
        subadditive: subadditivity.iter().all(|&(_, e, s)| e <= s),
        rows: tc,
        subadditivity,
    })
}
