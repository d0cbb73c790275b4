use serde::{Deserialize, Serialize};

use super::{
    bernoulli_energy_check, estimate_time_constant, fit_scaling, geodesic_stats, influence_diagnostics,
    margin_sensitivity, run_variance_scaling, scaling_csv, tail_profile, truncation_experiment, ExperimentConfig,
    ExperimentReport, InfluenceOptions, ScalingRow,
};
use crate::distributions::Bump;
use crate::error::Result;

/// Which experiment to run, with its own parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Study {
    Scaling,
    Tails { n: u64 },
    Influence { n: u64, options: InfluenceOptions },
    TimeConstant,
    Geodesics { ball_ms: Vec<usize> },
    Truncation { n: u64, k: u64, c5: f64, bump: Bump },
    Energy,
    Margin { n: u64 },
}

impl Study {
    pub fn name(&self) -> &'static str {
        match self {
            Study::Scaling => "scaling",
            Study::Tails { .. } => "tails",
            Study::Influence { .. } => "influence",
            Study::TimeConstant => "time-constant",
            Study::Geodesics { .. } => "geodesics",
            Study::Truncation { .. } => "truncation",
            Study::Energy => "energy",
            Study::Margin { .. } => "margin",
        }
    }
}

/// Output of [`run_study`]: the report plus the scaling rows when there are any.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyOutput {
    pub report: ExperimentReport,
    pub rows: Option<Vec<ScalingRow>>,
}

impl StudyOutput {
    pub fn csv(&self) -> Option<String> {
        self.rows.as_deref().map(scaling_csv)
    }
}

#[derive(Serialize)]
struct ScalingResults<'a> {
    rows: &'a [ScalingRow],
    fit: Option<super::FitReport>,
}

pub fn run_study(cfg: &ExperimentConfig, study: &Study) -> Result<StudyOutput> {
    let mut rows = None;
    let results = match study {
        Study::Scaling => {
            let r = run_variance_scaling(cfg)?;
            let fit = if r.len() >= 3 && r.iter().all(|x| x.var > 0.0 && x.n >= 2) {
                Some(fit_scaling(&r)?)
            } else {
                None
            };
            let v = serde_json::to_value(ScalingResults { rows: &r, fit })?;
            rows = Some(r);
            v
        }
        Study::Tails { n } => serde_json::to_value(tail_profile(cfg, *n)?)?,
        Study::Influence { n, options } => serde_json::to_value(influence_diagnostics(cfg, *n, options)?)?,
        Study::TimeConstant => serde_json::to_value(estimate_time_constant(cfg)?)?,
        Study::Geodesics { ball_ms } => serde_json::to_value(geodesic_stats(cfg, ball_ms)?)?,
        Study::Truncation { n, k, c5, bump } => serde_json::to_value(truncation_experiment(cfg, *n, *k, *c5, *bump)?)?,
        Study::Energy => serde_json::to_value(bernoulli_energy_check(cfg)?)?,
        Study::Margin { n } => serde_json::to_value(margin_sensitivity(cfg, *n)?)?,
    };
    Ok(StudyOutput {
        report: ExperimentReport::new(study.clone(), cfg, results)?,
        rows,
    })
}
