use serde::{Deserialize, Serialize};

use super::{map_replicas, ExperimentConfig, MPolicy, Setup};
use crate::error::{Error, Result};
use crate::fpp::{edge_breakpoint, edge_influence_exact, LatticeBox};
use crate::stats::{mean, sample_variance};

/// Influence summary for one value of `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceSide {
    pub m: usize,
    /// Replicas used for the `W` quantities.
    pub w_replicas: usize,
    /// `sup_e sqrt(E W_{e,+}^2)`.
    pub r_hat: f64,
    /// `sqrt(E W_+^2)` with `W_+ = sum_e W_{e,+}`.
    pub s_hat: f64,
    /// `E(Y) sqrt(E |gamma|^2)`, an upper bound for `s_hat` on the same replicas.
    pub s_bound: f64,
    /// `E(Y) sqrt(sup_e P(e in gamma))`, an upper bound for `r_hat`.
    pub r_bound: f64,
    pub bounds_hold: bool,
    /// `4 C E(F) + D (1 + 2/C)`.
    pub a_cd: f64,
    /// `A_CD >= e r_hat s_hat`.
    pub a_cd_dominates: bool,
    /// `l(K)` at `K = A_CD`; `None` unless `K > e r_hat s_hat > 0`.
    pub l_k: Option<f64>,
    /// Largest `P(e in gamma)` over edges with lower endpoint in `[-R, R]^d`.
    pub max_presence_near_origin: f64,
    pub max_presence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceReport {
    pub n: u64,
    pub replicas: usize,
    /// Half-width `R` of the near-origin window.
    pub window: usize,
    pub plain: InfluenceSide,
    pub randomized: InfluenceSide,
    /// Averaging strictly lowers the near-origin maximum.
    pub presence_lowered: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfluenceOptions {
    /// Replicas (from the start) on which every `W_{e,+}` is computed.
    pub w_replicas: usize,
    pub acd_c: f64,
    pub acd_d: f64,
}

impl Default for InfluenceOptions {
    fn default() -> Self {
        Self {
            w_replicas: 200,
            acd_c: 1.0,
            acd_d: 1.0,
        }
    }
}

/// `l(K) = K / ln(K / (rs ln(K / rs)))`, defined for `K > e rs` with `rs > 0`.
pub fn l_of_k(k: f64, rs: f64) -> Option<f64> {
    (rs > 0.0 && k > std::f64::consts::E * rs).then(|| k / (k / (rs * (k / rs).ln())).ln())
}

struct Draw {
    edges: Vec<usize>,
    time: f64,
    // (edge, W_{e,+}) on the geodesic, only for the first w_replicas replicas
    w: Option<Vec<(usize, f64)>>,
}

fn near_origin(lattice: &LatticeBox, window: i64) -> Vec<bool> {
    (0..lattice.num_edges())
        .map(|e| {
            let (v, _) = lattice.edge_endpoint_axis(e);
            lattice.vertex_coords(v).iter().all(|c| c.abs() <= window)
        })
        .collect()
}

fn side(cfg: &ExperimentConfig, setup: &Setup, window: &[bool], opts: &InfluenceOptions) -> Result<InfluenceSide> {
    let w_replicas = opts.w_replicas.min(cfg.replicas);
    let draws = map_replicas(cfg, setup, cfg.replicas, |r| {
        let w = if (r.index as usize) < w_replicas {
            let mut out = Vec::with_capacity(r.result.len());
            for &e in &r.result.edges {
                let y_inf = edge_breakpoint(r.solver, &r.field, &r.result, e)?;
                out.push((e, edge_influence_exact(r.field.weight(e), y_inf, &cfg.dist)?));
            }
            Some(out)
        } else {
            None
        };
        Ok(Draw {
            edges: r.result.edges.clone(),
            time: r.result.time,
            w,
        })
    })?;
    let ne = setup.lattice.num_edges();
    let presence = |draws: &[Draw]| {
        let mut count = vec![0u32; ne];
        for d in draws {
            for &e in &d.edges {
                count[e] += 1;
            }
        }
        count
    };
    let all = presence(&draws);
    let total = draws.len() as f64;
    let max_presence = all.iter().copied().max().unwrap_or(0) as f64 / total;
    let max_presence_near_origin = all
        .iter()
        .zip(window)
        .filter(|(_, &w)| w)
        .map(|(&c, _)| c)
        .max()
        .unwrap_or(0) as f64
        / total;

    let head = &draws[..w_replicas];
    let mut w_sq = vec![0.0; ne];
    let mut w_plus_sq = 0.0;
    let mut len_sq = 0.0;
    for d in head {
        let ws = d.w.as_ref().expect("W computed on the head replicas");
        let plus: f64 = ws.iter().map(|p| p.1).sum();
        w_plus_sq += plus * plus;
        for &(e, w) in ws {
            w_sq[e] += w * w;
        }
        len_sq += (d.edges.len() as f64).powi(2);
    }
    let k = head.len() as f64;
    let r_hat = (w_sq.iter().copied().fold(0.0, f64::max) / k).sqrt();
    let s_hat = (w_plus_sq / k).sqrt();
    let mean_y = cfg.dist.mean()?;
    let head_presence = presence(head).into_iter().max().unwrap_or(0) as f64 / k;
    let s_bound = mean_y * (len_sq / k).sqrt();
    let r_bound = mean_y * head_presence.sqrt();
    let slack = 1.0 + 1e-12;
    let e_f = mean(&draws.iter().map(|d| d.time).collect::<Vec<_>>());
    let a_cd = 4.0 * opts.acd_c * e_f + opts.acd_d * (1.0 + 2.0 / opts.acd_c);
    let rs = r_hat * s_hat;
    Ok(InfluenceSide {
        m: setup.m,
        w_replicas,
        r_hat,
        s_hat,
        s_bound,
        r_bound,
        bounds_hold: s_hat <= s_bound * slack && r_hat <= r_bound * slack,
        a_cd,
        a_cd_dominates: a_cd >= std::f64::consts::E * rs,
        l_k: l_of_k(a_cd, rs),
        max_presence_near_origin,
        max_presence,
    })
}

/// Paired comparison of `m = 0` with the configured `m` on the same weight fields.
pub fn influence_diagnostics(cfg: &ExperimentConfig, n: u64, opts: &InfluenceOptions) -> Result<InfluenceReport> {
    cfg.validate()?;
    if cfg.m_policy == MPolicy::Off || cfg.m_policy.m_for(n) == 0 {
        return Err(Error::Config("influence diagnostics need an active m policy".into()));
    }
    if opts.w_replicas == 0 || !(opts.acd_c > 0.0) || !(opts.acd_d > 0.0) {
        return Err(Error::Config(
            "influence options need w_replicas >= 1 and C, D > 0".into(),
        ));
    }
    let randomized = Setup::new(cfg, n, cfg.m_policy.m_for(n))?;
    // same box, no offset
    let plain = Setup {
        m: 0,
        map: None,
        ..randomized.clone()
    };
    let window = near_origin(&randomized.lattice, randomized.m as i64);
    let plain = side(cfg, &plain, &window, opts)?;
    let randomized = side(cfg, &randomized, &window, opts)?;
    Ok(InfluenceReport {
        n,
        replicas: cfg.replicas,
        window: randomized.m,
        presence_lowered: randomized.max_presence_near_origin < plain.max_presence_near_origin,
        plain,
        randomized,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallCount {
    pub m: usize,
    /// `d m`, in the sup norm around the probe edge midpoint.
    pub radius: usize,
    pub mean: f64,
    /// `mean / m^(d - 1)`.
    pub per_surface: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicRow {
    pub n: u64,
    pub len_mean: f64,
    pub len_sq_mean: f64,
    /// `E |gamma|^2 / n^2` with a 95% normal interval.
    pub ratio: f64,
    pub ratio_lo: f64,
    pub ratio_hi: f64,
    /// Geodesic edges near the middle of the segment.
    pub balls: Vec<BallCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicStats {
    pub rows: Vec<GeodesicRow>,
    /// No row's ratio exceeds the first row's interval.
    pub ratio_bounded: bool,
}

/// `E|gamma|`, `E|gamma|^2 / n^2` and geodesic edge counts in balls of radius `d m`
/// around the edge at the middle of the segment.
pub fn geodesic_stats(cfg: &ExperimentConfig, ball_ms: &[usize]) -> Result<GeodesicStats> {
    cfg.validate()?;
    let d = cfg.dim;
    let axis = cfg.direction.iter().position(|&c| c != 0).expect("validated direction");
    let mut rows = Vec::new();
    for &n in &cfg.ns {
        let setup = Setup::new(cfg, n, cfg.m_policy.m_for(n))?;
        let mid: Vec<i64> = cfg.direction.iter().map(|&c| c * (n as i64 / 2)).collect();
        let probe = setup
            .lattice
            .edge_at(&mid, axis)
            .ok_or_else(|| Error::Config("probe edge outside the box".into()))?;
        let centre = setup.lattice.edge_midpoint2(probe);
        let lattice = setup.lattice.clone();
        let per = map_replicas(cfg, &setup, cfg.replicas, |r| {
            let counts: Vec<usize> = ball_ms
                .iter()
                .map(|&m| {
                    let radius2 = 2 * (d * m) as i64;
                    r.result
                        .edges
                        .iter()
                        .filter(|&&e| {
                            let p = lattice.edge_midpoint2(e);
                            p.iter().zip(&centre).all(|(a, b)| (a - b).abs() <= radius2)
                        })
                        .count()
                })
                .collect();
            Ok((r.result.len() as f64, counts))
        })?;
        let nn = (n * n) as f64;
        let sq: Vec<f64> = per.iter().map(|p| p.0 * p.0 / nn).collect();
        let ratio = mean(&sq);
        let half = 1.96 * (sample_variance(&sq) / sq.len() as f64).sqrt();
        let balls = ball_ms
            .iter()
            .enumerate()
            .map(|(i, &m)| {
                let mean = per.iter().map(|p| p.1[i] as f64).sum::<f64>() / per.len() as f64;
                BallCount {
                    m,
                    radius: d * m,
                    mean,
                    per_surface: mean / (m as f64).powi(d as i32 - 1),
                }
            })
            .collect();
        rows.push(GeodesicRow {
            n,
            len_mean: mean(&per.iter().map(|p| p.0).collect::<Vec<_>>()),
            len_sq_mean: ratio * nn,
            ratio,
            ratio_lo: ratio - half,
            ratio_hi: ratio + half,
            balls,
        });
    }
    let first_hi = rows.first().map_or(f64::INFINITY, |r| r.ratio_hi);
    Ok(GeodesicStats {
        ratio_bounded: rows.iter().all(|r| r.ratio_lo <= first_hi),
        rows,
    })
}
