use serde::{Deserialize, Serialize};

use super::{map_replicas, margin_for, ExperimentConfig, Setup};
use crate::distributions::{Bump, Distribution, Kind};
use crate::error::{Error, Result};
use crate::fpp::{v_e_plus_bernoulli_with, WeightField};
use crate::stats::{mean, sample_variance};

/// Points on which `H_k >= H` is re-checked before sampling.
pub const DOMINATION_GRID: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub n: u64,
    pub k: u64,
    pub c5: f64,
    pub threshold: f64,
    pub cutoff: f64,
    /// `min (H_k - H)` over the grid; should be `>= -1e-12`.
    pub grid_min_gap: f64,
    pub grid_pass: bool,
    pub replicas: usize,
    /// Edges with truncated weight above the original one.
    pub weight_violations: usize,
    /// Replicas with `d_x < d_x~`.
    pub time_violations: usize,
    /// `d_x - d_x~` averaged over replicas.
    pub mean_gap: f64,
    pub max_gap: f64,
    pub zero_gap_replicas: usize,
}

/// Couples `x_e = Q(U_e)` with `x~_e = Q_k(U_e)` for the truncated law and compares passage times.
pub fn truncation_experiment(cfg: &ExperimentConfig, n: u64, k: u64, c5: f64, bump: Bump) -> Result<TruncationReport> {
    cfg.validate()?;
    if !cfg.dist.is_continuous() {
        return Err(Error::Config("truncation needs a continuous base law".into()));
    }
    let trunc = Distribution::truncate(&cfg.dist, k, c5, bump).map_err(|e| Error::Config(e.to_string()))?;
    let Kind::Truncated(t) = trunc.kind() else {
        unreachable!("truncate returns a truncated law")
    };
    let (threshold, cutoff) = (t.threshold(), t.cutoff());
    let top = 1.1 * cutoff;
    let grid_min_gap = (0..DOMINATION_GRID)
        .map(|i| {
            let x = top * i as f64 / (DOMINATION_GRID - 1) as f64;
            trunc.cdf(x) - cfg.dist.cdf(x)
        })
        .fold(f64::INFINITY, f64::min);
    let setup = Setup::new(cfg, n, cfg.m_policy.m_for(n))?;
    let per = map_replicas(cfg, &setup, cfg.replicas, |r| {
        let uniforms = WeightField::uniforms(&setup.lattice, cfg.seed, r.index);
        let small: Vec<f64> = uniforms.iter().map(|&u| trunc.inverse_transform(u)).collect();
        let violations = small.iter().zip(r.field.weights()).filter(|(s, x)| s > x).count();
        let t_small = r
            .solver
            .time_weights(&setup.lattice, &small, r.result.source, r.result.target)?;
        Ok((violations, r.result.time - t_small))
    })?;
    let gaps: Vec<f64> = per.iter().map(|p| p.1).collect();
    Ok(TruncationReport {
        n,
        k,
        c5,
        threshold,
        cutoff,
        grid_min_gap,
        grid_pass: grid_min_gap >= -1e-12,
        replicas: cfg.replicas,
        weight_violations: per.iter().map(|p| p.0).sum(),
        time_violations: gaps.iter().filter(|&&g| g < 0.0).count(),
        mean_gap: mean(&gaps),
        max_gap: gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        zero_gap_replicas: gaps.iter().filter(|&&g| g == 0.0).count(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyCheckRow {
    pub n: u64,
    pub replicas: usize,
    /// Replicas with `V_{E,+} > (b - a)^2 / a * f~`.
    pub violations: usize,
    pub max_ratio: f64,
    pub mean_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyCheckReport {
    pub rows: Vec<EnergyCheckRow>,
    pub pass: bool,
}

/// `V_{E,+} <= (b - a)^2 / a * f~` on every replica, for Bernoulli weights.
pub fn bernoulli_energy_check(cfg: &ExperimentConfig) -> Result<EnergyCheckReport> {
    cfg.validate()?;
    if !matches!(cfg.dist.kind(), Kind::Bernoulli { .. }) {
        return Err(Error::Config(format!(
            "energy check needs bernoulli weights, got {}",
            cfg.dist
        )));
    }
    let mut rows = Vec::new();
    for &n in &cfg.ns {
        let setup = Setup::new(cfg, n, cfg.m_policy.m_for(n))?;
        let per = map_replicas(cfg, &setup, cfg.replicas, |r| {
            let rep = v_e_plus_bernoulli_with(r.solver, &r.field, &r.result)?;
            Ok((rep.pass, rep.value, rep.value / rep.bound))
        })?;
        rows.push(EnergyCheckRow {
            n,
            replicas: cfg.replicas,
            violations: per.iter().filter(|p| !p.0).count(),
            max_ratio: per.iter().map(|p| p.2).fold(0.0, f64::max),
            mean_value: mean(&per.iter().map(|p| p.1).collect::<Vec<_>>()),
        });
    }
    Ok(EnergyCheckReport {
        pass: rows.iter().all(|r| r.violations == 0),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub n: u64,
    pub margin: i64,
    pub doubled_margin: i64,
    pub mean: f64,
    pub mean_doubled: f64,
    /// Half-width of the 95% interval on `mean`.
    pub ci_half_width: f64,
    /// `|mean - mean_doubled| < 0.1 * ci_half_width`.
    pub pass: bool,
}

/// Re-runs `n` with the margin doubled on the same weight fields.
pub fn margin_sensitivity(cfg: &ExperimentConfig, n: u64) -> Result<MarginReport> {
    cfg.validate()?;
    let m = cfg.m_policy.m_for(n);
    let margin = margin_for(cfg.margin_factor, n);
    let run = |margin| -> Result<Vec<f64>> {
        let setup = Setup::with_margin(cfg, n, m, margin)?;
        map_replicas(cfg, &setup, cfg.replicas, |r| Ok(r.result.time))
    };
    let small = run(margin)?;
    let large = run(2 * margin)?;
    let ci_half_width = 1.96 * (sample_variance(&small) / small.len() as f64).sqrt();
    let (a, b) = (mean(&small), mean(&large));
    Ok(MarginReport {
        n,
        margin,
        doubled_margin: 2 * margin,
        mean: a,
        mean_doubled: b,
        ci_half_width,
        pass: (a - b).abs() < 0.1 * ci_half_width,
    })
}
