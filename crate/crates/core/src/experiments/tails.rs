use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use super::scaling::sample_times;
use super::{ExperimentConfig, Setup};
use crate::error::{domain, Error, Result};
use crate::stats::{least_squares, mean};

/// `t` values at which exceedances are counted.
pub const DEFAULT_T_GRID: [f64; 12] = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0];

/// Exceedance counts below this use the exact binomial interval and are left out of the fit.
pub const MIN_EXCEEDANCES: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub t: f64,
    /// `t * sqrt(n / ln n)`.
    pub threshold: f64,
    pub exceedances: usize,
    pub prob: f64,
    pub prob_lo: f64,
    pub prob_hi: f64,
    /// `normal` or `clopper_pearson`.
    pub interval: String,
}

/// Least-squares fit `ln P(|f - mean| > t scale) = intercept - rate * t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub rate: f64,
    pub rate_lo: f64,
    pub rate_hi: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationDiagnostics {
    pub n: u64,
    pub m: usize,
    pub replicas: usize,
    pub mean: f64,
    /// `sqrt(n / ln n)`.
    pub scale: f64,
    pub tail: Vec<TailRow>,
    /// `None` when fewer than two grid points reach the exceedance minimum.
    pub fit: Option<TailFit>,
    /// Some grid points had too few exceedances to enter the fit.
    pub truncated_grid: bool,
}

/// Exact 95% binomial interval for `k` successes out of `n`.
pub fn clopper_pearson(k: usize, n: usize) -> Result<(f64, f64)> {
    if n == 0 || k > n {
        return domain(format!("clopper_pearson needs 0 <= k <= n, n > 0 (k={k}, n={n})"));
    }
    let beta = |a: f64, b: f64, q: f64| -> Result<f64> {
        Ok(Beta::new(a, b)
            .map_err(|e| Error::Numeric(e.to_string()))?
            .inverse_cdf(q))
    };
    let lo = if k == 0 {
        0.0
    } else {
        beta(k as f64, (n - k + 1) as f64, 0.025)?
    };
    let hi = if k == n {
        1.0
    } else {
        beta((k + 1) as f64, (n - k) as f64, 0.975)?
    };
    Ok((lo, hi))
}

/// Empirical exceedance probabilities of `|f - mean|` on [`DEFAULT_T_GRID`] in units of
/// `sqrt(n / ln n)`, with an exponential-rate fit over the well-populated part.
pub fn tail_profile(cfg: &ExperimentConfig, n: u64) -> Result<ConcentrationDiagnostics> {
    tail_profile_on(cfg, n, &DEFAULT_T_GRID)
}

pub fn tail_profile_on(cfg: &ExperimentConfig, n: u64, t_grid: &[f64]) -> Result<ConcentrationDiagnostics> {
    cfg.validate()?;
    if cfg.replicas < 1000 {
        return Err(Error::Config(format!(
            "tail profile needs at least 1000 replicas, got {}",
            cfg.replicas
        )));
    }
    if n < 2 {
        return Err(Error::Config("tail profile needs n >= 2".into()));
    }
    let setup = Setup::new(cfg, n, cfg.m_policy.m_for(n))?;
    let times = sample_times(cfg, &setup)?.times;
    let f_hat = mean(&times);
    let scale = (n as f64 / (n as f64).ln()).sqrt();
    let total = times.len();
    let mut tail = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let threshold = t * scale;
        let k = times.iter().filter(|&&f| (f - f_hat).abs() > threshold).count();
        let p = k as f64 / total as f64;
        let (lo, hi, interval) = if k >= MIN_EXCEEDANCES {
            let half = 1.96 * (p * (1.0 - p) / total as f64).sqrt();
            ((p - half).max(0.0), (p + half).min(1.0), "normal")
        } else {
            let (lo, hi) = clopper_pearson(k, total)?;
            (lo, hi, "clopper_pearson")
        };
        tail.push(TailRow {
            t,
            threshold,
            exceedances: k,
            prob: p,
            prob_lo: lo,
            prob_hi: hi,
            interval: interval.into(),
        });
    }
    let used: Vec<&TailRow> = tail.iter().filter(|r| r.exceedances >= MIN_EXCEEDANCES).collect();
    let fit = (used.len() >= 2).then(|| {
        let ts: Vec<f64> = used.iter().map(|r| r.t).collect();
        let lp: Vec<f64> = used.iter().map(|r| r.prob.ln()).collect();
        let f = least_squares(&ts, &lp);
        TailFit {
            rate: -f.slope,
            rate_lo: -f.slope - 1.96 * f.slope_se,
            rate_hi: -f.slope + 1.96 * f.slope_se,
            intercept: f.intercept,
            r_squared: f.r_squared,
            points: used.len(),
        }
    });
    Ok(ConcentrationDiagnostics {
        n,
        m: setup.m,
        replicas: cfg.replicas,
        mean: f_hat,
        scale,
        truncated_grid: used.len() < tail.len(),
        tail,
        fit,
    })
}
