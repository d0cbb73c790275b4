//! Tail-accurate standard Gaussian primitives.
//!
//! Probabilities travel as [`Probability`], which keeps the lower tail and
//! its complement separately, so that `gauss_quantile(gauss_cdf(x))`
//! recovers `x` in both tails instead of losing the upper tail to `1 - p`.

use libm::erfc;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// A probability together with its complement, each held to full relative precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probability {
    lower: f64,
    upper: f64,
}

impl Probability {
    /// Wraps `p`; the complement is computed as `1 - p`.
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return domain(format!("probability {p} outside [0, 1]"));
        }
        Ok(Self {
            lower: p,
            upper: 1.0 - p,
        })
    }

    /// Builds from the upper tail `q = 1 - p`.
    pub fn from_upper(q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return domain(format!("probability {q} outside [0, 1]"));
        }
        Ok(Self {
            lower: 1.0 - q,
            upper: q,
        })
    }

    /// Both tails computed independently, e.g. from a CDF and a survival function.
    pub(crate) fn from_parts(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    pub fn value(self) -> f64 {
        self.lower
    }

    pub fn complement(self) -> f64 {
        self.upper
    }

    /// `min(p, 1 - p)`.
    pub fn smaller_tail(self) -> f64 {
        self.lower.min(self.upper)
    }

    pub fn is_interior(self) -> bool {
        self.lower > 0.0 && self.upper > 0.0
    }
}

/// Standard normal density `g`.
pub fn gauss_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

pub fn gauss_log_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

// G(x) for x <= 0.
fn lower_tail(x: f64) -> f64 {
    debug_assert!(x <= 0.0 || x.is_nan());
    0.5 * erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Standard normal CDF `G`, with its complement.
pub fn gauss_cdf(x: f64) -> Probability {
    if x <= 0.0 {
        let p = lower_tail(x);
        Probability::from_parts(p, 1.0 - p)
    } else {
        let q = lower_tail(-x);
        Probability::from_parts(1.0 - q, q)
    }
}

/// `1 - G(x)` to full relative precision.
pub fn gauss_sf(x: f64) -> f64 {
    gauss_cdf(x).complement()
}

/// `ln G(x)`, finite for every finite `x`.
pub fn gauss_log_cdf(x: f64) -> f64 {
    if x > -30.0 {
        return gauss_cdf(x).value().ln();
    }
    // Mills-ratio expansion; the first omitted term is below 2e-12 relative at x = -30.
    let z = 1.0 / (x * x);
    let series = 1.0 - z * (1.0 - z * (3.0 - z * (15.0 - z * 105.0)));
    gauss_log_pdf(x) - (-x).ln() + series.ln()
}

// Quantile of a lower-tail probability p in (0, 1/2], by Newton iterations on ln G.
fn lower_quantile(p: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    let log_p = p.ln();
    // Abramowitz & Stegun 26.2.23 starting point (error < 4.5e-4).
    let t = (-2.0 * log_p).sqrt();
    let mut x = -(t
        - (2.515_517 + 0.802_853 * t + 0.010_328 * t * t)
            / (1.0 + 1.432_788 * t + 0.189_269 * t * t + 0.001_308 * t * t * t));
    for _ in 0..100 {
        let log_g = gauss_log_cdf(x);
        // d/dx ln G = g / G
        let inv_hazard = (log_g - gauss_log_pdf(x)).exp();
        let step = (log_g - log_p) * inv_hazard;
        let next = (x - step).min(0.0);
        let done = (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300);
        x = next;
        if done {
            break;
        }
    }
    x
}

/// Standard normal quantile `G^{-1}`, using whichever tail of `p` is smaller.
pub fn gauss_quantile(p: impl Into<ProbabilityArg>) -> Result<f64> {
    let p = p.into().0?;
    if !p.is_interior() {
        return domain(format!("gaussian quantile needs p in (0, 1), got {}", p.value()));
    }
    if p.lower <= p.upper {
        Ok(lower_quantile(p.lower))
    } else {
        Ok(-lower_quantile(p.upper))
    }
}

/// `g(G^{-1}(p))`, the Gaussian isoperimetric profile.
pub fn gauss_profile(p: Probability) -> Result<f64> {
    Ok(gauss_pdf(gauss_quantile(p)?))
}

/// `g(G^{-1}(y)) / (y * sqrt(-2 ln y))`, which tends to 1 as `y -> 0`.
pub fn tail_asymptotic_ratio(y: f64) -> Result<f64> {
    if !(y > 0.0 && y < 0.1) {
        return domain(format!("tail ratio needs y in (0, 0.1), got {y}"));
    }
    let x = gauss_quantile(y)?;
    // Ratio of tiny numbers taken in log space.
    Ok((gauss_log_pdf(x) - y.ln()).exp() / (-2.0 * y.ln()).sqrt())
}

/// Accepts either an `f64` (validated) or a ready [`Probability`].
pub struct ProbabilityArg(Result<Probability>);

impl ProbabilityArg {
    pub(crate) fn resolve(self) -> Result<Probability> {
        self.0
    }
}

impl From<f64> for ProbabilityArg {
    fn from(p: f64) -> Self {
        Self(Probability::new(p))
    }
}

impl From<Probability> for ProbabilityArg {
    fn from(p: Probability) -> Self {
        Self(Ok(p))
    }
}
