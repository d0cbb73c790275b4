//! Reproducible Monte Carlo studies of `f_v = d_x(0, v)` and its randomised
//! version `f~ = d_x(z, v + z)`.
//!
//! Every replica is a pure function of `(master seed, replica index)`: edge
//! weights come from a counter-based stream keyed by global edge
//! coordinates, offsets from a per-replica ChaCha8 stream. Replicas run on a
//! rayon pool and are gathered in index order, so outputs do not depend on
//! the worker count.

mod coupling;
mod influence;
mod output;
mod scaling;
mod study;
mod tails;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::averaging::{AveragingMap, ClassOrder};
use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::fpp::{GeodesicResult, LatticeBox, Solver, WeightField};
use crate::rng::{replica_rng, Stream};

pub use coupling::{
    bernoulli_energy_check, margin_sensitivity, truncation_experiment, EnergyCheckReport, EnergyCheckRow, MarginReport,
    TruncationReport, DOMINATION_GRID,
};
pub use influence::{
    geodesic_stats, influence_diagnostics, l_of_k, BallCount, GeodesicRow, GeodesicStats, InfluenceOptions,
    InfluenceReport, InfluenceSide,
};
pub use output::{fmt_f64, scaling_csv, svg_line_chart, to_json, ExperimentReport, Series, SCALING_CSV_HEADER};
pub use scaling::{
    estimate_time_constant, fit_scaling, run_variance_scaling, FitReport, ModelFit, Preference, ScalingRow,
    TimeConstantReport, TimeConstantRow,
};
pub use study::{run_study, Study, StudyOutput};
pub use tails::{
    clopper_pearson, tail_profile, tail_profile_on, ConcentrationDiagnostics, TailFit, TailRow, DEFAULT_T_GRID,
    MIN_EXCEEDANCES,
};

/// Environment variable capping the worker pool.
pub const WORKERS_ENV: &str = "FPPLAB_WORKERS";

/// How the averaging parameter `m` is chosen for a target at distance `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "policy", content = "m")]
pub enum MPolicy {
    /// No offset: plain `f_v`.
    Off,
    Fixed(usize),
    /// `m = ceil(n^(1/4))`.
    #[default]
    QuarterPower,
}

impl MPolicy {
    pub fn m_for(self, n: u64) -> usize {
        match self {
            MPolicy::Off => 0,
            MPolicy::Fixed(m) => m,
            MPolicy::QuarterPower => quarter_power(n),
        }
    }
}

/// `ceil(n^(1/4))`, computed exactly.
pub fn quarter_power(n: u64) -> usize {
    let mut m = (n as f64).powf(0.25).floor() as u64;
    while m.pow(4) < n {
        m += 1;
    }
    while m > 0 && (m - 1).pow(4) >= n {
        m -= 1;
    }
    m as usize
}

impl std::str::FromStr for MPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "off" | "0" => Ok(MPolicy::Off),
            "quarter" | "auto" => Ok(MPolicy::QuarterPower),
            _ => s
                .parse()
                .map(MPolicy::Fixed)
                .map_err(|_| Error::Config(format!("m policy must be off, quarter or an integer, got {s:?}"))),
        }
    }
}

impl std::fmt::Display for MPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MPolicy::Off => write!(f, "off"),
            MPolicy::Fixed(m) => write!(f, "{m}"),
            MPolicy::QuarterPower => write!(f, "quarter"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dist: Distribution,
    pub dim: usize,
    /// Targets are `n * direction` for each `n`.
    pub ns: Vec<u64>,
    pub direction: Vec<i64>,
    pub replicas: usize,
    pub seed: u64,
    pub m_policy: MPolicy,
    /// The box extends `ceil(margin_factor * n)` past the segment on every side.
    pub margin_factor: f64,
    /// Record wall time per row. Off by default so that outputs are reproducible.
    #[serde(default)]
    pub timings: bool,
    /// Worker threads; `None` uses all cores. Not part of the output.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(dist: Distribution, dim: usize, ns: Vec<u64>, replicas: usize, seed: u64) -> Self {
        let mut direction = vec![0; dim];
        if dim > 0 {
            direction[0] = 1;
        }
        Self {
            dist,
            dim,
            ns,
            direction,
            replicas,
            seed,
            m_policy: MPolicy::default(),
            margin_factor: 0.5,
            timings: false,
            workers: None,
        }
    }

    /// The default grid: `n` in {25, 50, 100, 200} with 2000 replicas.
    pub fn desk_scale(dist: Distribution, dim: usize, seed: u64) -> Self {
        Self::new(dist, dim, vec![25, 50, 100, 200], 2000, seed)
    }

    pub fn with_m_policy(mut self, policy: MPolicy) -> Self {
        self.m_policy = policy;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dim == 2 || self.dim == 3) {
            return Err(Error::Config(format!("dimension must be 2 or 3, got {}", self.dim)));
        }
        if self.replicas < 2 {
            return Err(Error::Config(format!(
                "at least 2 replicas are needed for a variance, got {}",
                self.replicas
            )));
        }
        if self.ns.is_empty() || self.ns.contains(&0) {
            return Err(Error::Config("n values must be positive".into()));
        }
        if self.direction.len() != self.dim || self.direction.iter().all(|&c| c == 0) {
            return Err(Error::Config(format!(
                "direction {:?} must be a nonzero vector of length {}",
                self.direction, self.dim
            )));
        }
        if !(self.margin_factor >= 0.0 && self.margin_factor.is_finite()) {
            return Err(Error::Config(format!(
                "margin factor must be >= 0, got {}",
                self.margin_factor
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("worker count must be positive".into()));
        }
        for &n in &self.ns {
            Setup::new(self, n, self.m_policy.m_for(n))?;
        }
        Ok(())
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let env_cap = std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&w| w > 0);
        let workers = match (self.workers, env_cap) {
            (Some(w), Some(c)) => Some(w.min(c)),
            (w, c) => w.or(c),
        };
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers.unwrap_or(0))
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
    }
}

/// Largest box the harness will allocate, in vertices.
pub const MAX_BOX_VERTICES: usize = 20_000_000;

/// Box, target and offset map for one `n`.
#[derive(Debug, Clone)]
pub(crate) struct Setup {
    pub m: usize,
    pub lattice: Arc<LatticeBox>,
    pub target: Vec<i64>,
    pub map: Option<AveragingMap>,
}

impl Setup {
    pub fn new(cfg: &ExperimentConfig, n: u64, m: usize) -> Result<Self> {
        let margin = margin_for(cfg.margin_factor, n);
        Self::with_margin(cfg, n, m, margin)
    }

    pub fn with_margin(cfg: &ExperimentConfig, n: u64, m: usize, margin: i64) -> Result<Self> {
        let target: Vec<i64> = cfg.direction.iter().map(|&c| c * n as i64).collect();
        // offsets live in {0..m}^d, so the upper side gets m extra layers
        let lo: Vec<i64> = target.iter().map(|&c| c.min(0) - margin).collect();
        let hi: Vec<i64> = target.iter().map(|&c| c.max(0) + margin + m as i64).collect();
        let vertices: f64 = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1) as f64).product();
        if vertices > MAX_BOX_VERTICES as f64 {
            return Err(Error::Config(format!(
                "box for n = {n} needs {vertices:.0} vertices (limit {MAX_BOX_VERTICES})"
            )));
        }
        let lattice = LatticeBox::new(&lo, &hi).map_err(|e| Error::Config(e.to_string()))?;
        let map = if m > 0 {
            Some(AveragingMap::new(m, ClassOrder::default()).map_err(|e| Error::Config(e.to_string()))?)
        } else {
            None
        };
        Ok(Self {
            m,
            lattice: Arc::new(lattice),
            target,
            map,
        })
    }
}

pub(crate) fn margin_for(factor: f64, n: u64) -> i64 {
    (factor * n as f64).ceil() as i64
}

/// One replica's field, offset and geodesic, handed to the per-replica closure.
pub(crate) struct Replica<'a> {
    pub index: u64,
    pub field: WeightField,
    pub result: GeodesicResult,
    pub solver: &'a mut Solver,
}

/// Runs `f` on every replica of `setup` and returns the outputs in replica order.
pub(crate) fn map_replicas<T, F>(cfg: &ExperimentConfig, setup: &Setup, replicas: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Replica<'_>) -> Result<T> + Sync,
{
    let pool = cfg.pool()?;
    pool.install(|| {
        (0..replicas as u64)
            .into_par_iter()
            .map_init(Solver::new, |solver, r| {
                let field = WeightField::sample(setup.lattice.clone(), &cfg.dist, cfg.seed, r);
                let offset = match &setup.map {
                    Some(map) => {
                        let mut rng = replica_rng(cfg.seed, r, Stream::Offset);
                        map.sample_offset(&mut rng, cfg.dim)?
                            .z
                            .iter()
                            .map(|&z| z as i64)
                            .collect()
                    }
                    None => vec![0; cfg.dim],
                };
                let end: Vec<i64> = setup.target.iter().zip(&offset).map(|(a, b)| a + b).collect();
                let result = solver.solve_coords(&field, &offset, &end)?;
                f(Replica {
                    index: r,
                    field,
                    result,
                    solver,
                })
            })
            .collect()
    })
}

/// Leave-one-out estimates of the sample variance, computed in one pass.
pub fn jackknife_variances(x: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    let m = crate::stats::mean(x);
    let ss: f64 = x.iter().map(|v| (v - m).powi(2)).sum();
    x.iter()
        .map(|v| {
            let d = v - m;
            // sum of squares about the leave-one-out mean
            (ss - d * d * n / (n - 1.0)) / (n - 2.0)
        })
        .collect()
}

/// Sample variance with a 95% jackknife interval, clipped at 0.
///
/// With two observations the interval is `[0, inf)`.
pub fn variance_with_ci(x: &[f64]) -> (f64, f64, f64) {
    let var = crate::stats::sample_variance(x);
    if x.len() < 3 {
        return (var, 0.0, f64::INFINITY);
    }
    let loo = jackknife_variances(x);
    let n = x.len() as f64;
    let m = crate::stats::mean(&loo);
    let se = ((n - 1.0) / n * loo.iter().map(|v| (v - m).powi(2)).sum::<f64>()).sqrt();
    (var, (var - 1.96 * se).max(0.0), var + 1.96 * se)
}
