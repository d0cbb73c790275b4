//! Grid-based check of the nearly-gamma conditions.
//!
//! The direct check evaluates `psi(y) / sqrt(y)` on a geometric grid that
//! accumulates at both ends of the support. The sufficient check fits the
//! power-law exponents of the density at finite endpoints and tests the
//! hazard ratio `S(t) / h(t)` for boundedness on an infinite upper tail.

use serde::{Deserialize, Serialize};

use super::{psi, Distribution, Probability};
use crate::error::{Error, Result};
use crate::stats::least_squares;

/// Slope (in log-log coordinates) beyond which `psi(y)/sqrt(y)` is read as diverging.
const DIVERGENCE_SLOPE: f64 = 0.05;
/// Largest admissible spread of `ln h - alpha ln(distance)`, i.e. `C2/C1 < 4`.
const THETA_SPREAD: f64 = 1.386_294_361_119_890_6;
/// Largest admissible log-log slope of the hazard ratio.
const HAZARD_SLOPE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub points_per_decade: usize,
    /// Smallest distance to a finite endpoint, relative to the endpoint-median gap.
    pub endpoint_floor: f64,
    /// An infinite upper tail is scanned until the survival function reaches this.
    pub tail_sf_floor: f64,
    /// The bound `A` is the grid supremum times this factor.
    pub safety_factor: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points_per_decade: 200,
            endpoint_floor: 1e-12,
            tail_sf_floor: 1e-290,
            safety_factor: 1.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UpperTail {
    /// `h(x) ~ (upper - x)^beta` near a finite upper end.
    Finite { beta: f64, spread: f64, pass: bool },
    /// `C1 h(t) <= S(t) <= C2 h(t)` for `t` in `[start, end]`.
    Infinite {
        start: f64,
        end: f64,
        c1: f64,
        c2: f64,
        slope: f64,
        pass: bool,
    },
}

impl UpperTail {
    pub fn pass(&self) -> bool {
        match self {
            UpperTail::Finite { pass, .. } | UpperTail::Infinite { pass, .. } => *pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SufficientDiagnostics {
    /// (i): the density is positive at every grid point.
    pub interval: bool,
    /// (ii): no jump detected at grid points or known breakpoints.
    pub continuity: bool,
    /// (iii): `psi(y)/sqrt(y)` bounded on the grid with no divergent trend at the ends.
    pub bound: bool,
    pub grid_sup: f64,
    pub lower_slope: f64,
    pub upper_slope: f64,
    /// (iv): fitted `alpha` with `h(x) ~ (x - lower)^alpha`.
    pub alpha: f64,
    pub alpha_spread: f64,
    pub lower_tail: bool,
    /// (v)
    pub upper_tail: UpperTail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridUsed {
    pub spec: GridSpec,
    pub points: usize,
    pub first: f64,
    pub last: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearlyGammaVerdict {
    pub direct_pass: bool,
    /// The bound `A`; present iff `direct_pass`.
    pub bound: Option<f64>,
    pub sufficient_pass: bool,
    pub diagnostics: SufficientDiagnostics,
    pub grid: GridUsed,
}

fn geometric(from: f64, to: f64, per_decade: usize) -> Vec<f64> {
    let decades = (to / from).log10();
    let steps = (decades * per_decade as f64).ceil().max(1.0) as usize;
    (0..=steps)
        .map(|j| from * 10f64.powf(decades * j as f64 / steps as f64))
        .collect()
}

/// Power-law fit of `h` against the distance to an endpoint.
fn endpoint_exponent(d: &Distribution, pts: &[(f64, f64)]) -> (f64, f64) {
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts
        .iter()
        .map(|&(dist, y)| (dist.ln(), d.pdf(y).ln()))
        .filter(|(_, l)| l.is_finite())
        .unzip();
    if xs.len() < 3 {
        return (f64::NAN, f64::INFINITY);
    }
    let fit = least_squares(&xs, &ys);
    let resid: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - fit.slope * x).collect();
    let spread =
        resid.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - resid.iter().cloned().fold(f64::INFINITY, f64::min);
    (fit.slope, spread)
}

fn jump_free(d: &Distribution, y: f64, eta: f64) -> bool {
    let (a, b) = (d.pdf(y - eta), d.pdf(y + eta));
    (a - b).abs() <= 1e-4 * a.max(b)
}

/// Classifies a continuous law against the nearly-gamma conditions.
pub fn classify_nearly_gamma(d: &Distribution, grid: &GridSpec) -> Result<NearlyGammaVerdict> {
    if !d.is_continuous() {
        return Err(Error::UnsupportedKind(format!(
            "nearly-gamma check of discrete law {d}"
        )));
    }
    if grid.points_per_decade == 0 || !(grid.endpoint_floor > 0.0 && grid.endpoint_floor < 1.0) {
        return Err(Error::Domain(
            "grid spec needs points_per_decade >= 1 and floor in (0, 1)".into(),
        ));
    }
    let (lo, hi) = d.support();
    let median = d.quantile(0.5)?;
    let ppd = grid.points_per_decade;

    // (distance to the nearest endpoint, y) pairs
    let s_lo = median - lo;
    let lower: Vec<(f64, f64)> = geometric(grid.endpoint_floor * s_lo, s_lo, ppd)
        .into_iter()
        .map(|t| (t, lo + t))
        .filter(|&(_, y)| y > lo)
        .collect();
    let upper: Vec<(f64, f64)> = if hi.is_finite() {
        let s_hi = hi - median;
        geometric(grid.endpoint_floor * s_hi, s_hi, ppd)
            .into_iter()
            .rev()
            .map(|t| (t, hi - t))
            .filter(|&(_, y)| y < hi && y > median)
            .collect()
    } else {
        let y_max = d.quantile(Probability::from_upper(grid.tail_sf_floor)?)?;
        geometric(median, y_max, ppd)
            .into_iter()
            .skip(1)
            .map(|y| (y, y))
            .collect()
    };

    let mut interval = true;
    let mut continuity = true;
    let mut sup = 0.0f64;
    let mut ratios_lo = Vec::with_capacity(lower.len());
    let mut ratios_hi = Vec::with_capacity(upper.len());
    for (side, pts) in [(&mut ratios_lo, &lower), (&mut ratios_hi, &upper)] {
        for &(_, y) in pts.iter() {
            let eta = 1e-9 * (y - lo).min(hi - y);
            continuity &= jump_free(d, y, eta);
            match psi(d, y) {
                Ok(v) => {
                    let r = v / y.sqrt();
                    sup = sup.max(r);
                    side.push(r);
                }
                Err(Error::Singularity { .. }) => {
                    interval = false;
                    side.push(f64::NAN);
                }
                Err(e) => return Err(e),
            }
        }
    }
    for b in d.breakpoints(lo, hi) {
        if b > lo && b < hi {
            continuity &= jump_free(d, b, 1e-9 * b.max(1.0));
        }
    }

    // Trend of ln(psi/sqrt y) over the outermost decade at each end.
    let outer_slope = |pts: &[(f64, f64)], ratios: &[f64], near: bool| -> f64 {
        let n = ppd.min(pts.len());
        let idx: Vec<usize> = if near {
            (0..n).collect()
        } else {
            (pts.len() - n..pts.len()).collect()
        };
        let (xs, ys): (Vec<f64>, Vec<f64>) = idx
            .iter()
            .map(|&i| (pts[i].0.ln(), ratios[i].ln()))
            .filter(|(_, r)| r.is_finite())
            .unzip();
        if xs.len() < 3 {
            0.0
        } else {
            least_squares(&xs, &ys).slope
        }
    };
    let lower_slope = outer_slope(&lower, &ratios_lo, true);
    let upper_slope = if hi.is_finite() {
        outer_slope(&upper, &ratios_hi, true)
    } else {
        outer_slope(&upper, &ratios_hi, false)
    };
    let diverges_hi = if hi.is_finite() {
        upper_slope < -DIVERGENCE_SLOPE
    } else {
        upper_slope > DIVERGENCE_SLOPE
    };
    let bound = interval && sup.is_finite() && lower_slope >= -DIVERGENCE_SLOPE && !diverges_hi;
    let direct_pass = bound && continuity;

    // (iv)
    let in_fit_window = |&&(t, _): &&(f64, f64), s: f64| t >= 1e-11 * s && t <= 1e-5 * s;
    let lower_fit: Vec<(f64, f64)> = lower.iter().filter(|p| in_fit_window(p, s_lo)).copied().collect();
    let (alpha, alpha_spread) = endpoint_exponent(d, &lower_fit);
    let lower_tail = alpha > -0.999 && alpha_spread < THETA_SPREAD;

    // (v)
    let upper_tail = if hi.is_finite() {
        let s_hi = hi - median;
        let fit: Vec<(f64, f64)> = upper.iter().filter(|p| in_fit_window(p, s_hi)).copied().collect();
        let (beta, spread) = endpoint_exponent(d, &fit);
        UpperTail::Finite {
            beta,
            spread,
            pass: beta > -0.999 && spread < THETA_SPREAD,
        }
    } else {
        hazard_test(d)?
    };

    let sufficient_pass = interval && continuity && lower_tail && upper_tail.pass();
    let all: Vec<f64> = lower.iter().chain(&upper).map(|p| p.1).collect();
    Ok(NearlyGammaVerdict {
        direct_pass,
        bound: direct_pass.then_some(grid.safety_factor * sup),
        sufficient_pass,
        diagnostics: SufficientDiagnostics {
            interval,
            continuity,
            bound,
            grid_sup: sup,
            lower_slope,
            upper_slope,
            alpha,
            alpha_spread,
            lower_tail,
            upper_tail,
        },
        grid: GridUsed {
            spec: *grid,
            points: all.len(),
            first: all.iter().cloned().fold(f64::INFINITY, f64::min),
            last: all.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        },
    })
}

/// Hazard-ratio test from the 0.9-quantile until the survival function has dropped 50 decades.
fn hazard_test(d: &Distribution) -> Result<UpperTail> {
    let start = d.quantile(0.9)?;
    let end = d.quantile(Probability::from_upper(1e-50 * d.sf(start))?)?;
    let steps = 2000;
    let mut c1 = f64::INFINITY;
    let mut c2 = 0.0f64;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for j in 0..=steps {
        let t = start + (end - start) * j as f64 / steps as f64;
        let h = d.pdf(t);
        let ratio = d.sf(t) / h;
        if !(ratio.is_finite() && ratio > 0.0) {
            c1 = 0.0;
            continue;
        }
        c1 = c1.min(ratio);
        c2 = c2.max(ratio);
        if 2 * j >= steps {
            xs.push(t.ln());
            ys.push(ratio.ln());
        }
    }
    let slope = if xs.len() >= 3 {
        least_squares(&xs, &ys).slope
    } else {
        f64::NAN
    };
    Ok(UpperTail::Infinite {
        start,
        end,
        c1,
        c2,
        slope,
        pass: c1 > 0.0 && c2.is_finite() && slope.abs() <= HAZARD_SLOPE,
    })
}
