//! Edge-time laws.
//!
//! A [`Distribution`] exposes density, CDF, survival function, quantile and
//! an inverse-transform sampler. Continuous kinds also feed [`psi`] and the
//! nearly-gamma classifier.

mod gauss;
mod nearly_gamma;
mod psi;
mod spec;

pub use gauss::{
    gauss_cdf, gauss_log_cdf, gauss_log_pdf, gauss_pdf, gauss_profile, gauss_quantile, gauss_sf, tail_asymptotic_ratio,
    Probability, ProbabilityArg, INV_SQRT_2PI,
};
pub use nearly_gamma::{classify_nearly_gamma, GridSpec, NearlyGammaVerdict, SufficientDiagnostics};
pub use psi::{psi, DENSITY_FLOOR};

use libm::erf;
use rand::RngCore;
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_pieces, QuadOptions};
use crate::rng::open01;

/// Logarithmic Sobolev constant of Bernoulli(p):
/// `(ln p - ln(1-p)) / (p - (1-p))`, equal to 2 at `p = 1/2`.
pub fn lsi_constant_bernoulli(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("c_LS needs p in (0, 1), got {p}"));
    }
    // Symmetric in p <-> 1-p by evaluating on the lower half only.
    let p = p.min(1.0 - p);
    let d = 1.0 - 2.0 * p;
    if d < 1e-4 {
        // atanh(d)/d series around d = 0: 2 (1 + d^2/3 + d^4/5 + ...)
        let d2 = d * d;
        return Ok(2.0 * (1.0 + d2 / 3.0 + d2 * d2 / 5.0 + d2 * d2 * d2 / 7.0));
    }
    // ln((1-p)/p) = 2 atanh(1 - 2p), without the cancellation of two logarithms.
    Ok(2.0 * d.atanh() / d)
}

/// Bump density used to spread repatriated tail mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bump {
    /// `6 s (1 - s)` on `[lo, hi]`, rescaled.
    Hat { lo: f64, hi: f64 },
    /// `30 s^2 (1 - s)^2` on [0, 1].
    Quartic,
}

impl Default for Bump {
    fn default() -> Self {
        Bump::Hat { lo: 0.0, hi: 1.0 }
    }
}

impl Bump {
    fn validate(&self) -> Result<()> {
        if let Bump::Hat { lo, hi } = *self {
            if !(lo >= 0.0 && hi <= 1.0 && lo < hi) {
                return domain(format!("bump support [{lo}, {hi}] not inside [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn pdf(&self, s: f64) -> f64 {
        match *self {
            Bump::Hat { lo, hi } => {
                if s <= lo || s >= hi {
                    return 0.0;
                }
                let w = hi - lo;
                let t = (s - lo) / w;
                6.0 * t * (1.0 - t) / w
            }
            Bump::Quartic => {
                if s <= 0.0 || s >= 1.0 {
                    return 0.0;
                }
                30.0 * s * s * (1.0 - s) * (1.0 - s)
            }
        }
    }

    pub fn cdf(&self, s: f64) -> f64 {
        match *self {
            Bump::Hat { lo, hi } => {
                if s <= lo {
                    return 0.0;
                }
                if s >= hi {
                    return 1.0;
                }
                let t = (s - lo) / (hi - lo);
                t * t * (3.0 - 2.0 * t)
            }
            Bump::Quartic => {
                if s <= 0.0 {
                    return 0.0;
                }
                if s >= 1.0 {
                    return 1.0;
                }
                s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
            }
        }
    }
}

/// The law `nu_k`: equal to the base law below `C5 ln k`, supported in
/// `[0, 2 C5 ln k]`, with the mass beyond `2 C5 ln k` spread over
/// `[C5 ln k, 2 C5 ln k]` by a bump density.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncated {
    base: Box<Distribution>,
    k: u64,
    c5: f64,
    bump: Bump,
    scale: f64,
    mass: f64,
    cdf_at_scale: f64,
}

impl Truncated {
    pub fn base(&self) -> &Distribution {
        &self.base
    }
    pub fn k(&self) -> u64 {
        self.k
    }
    pub fn c5(&self) -> f64 {
        self.c5
    }
    pub fn bump(&self) -> Bump {
        self.bump
    }
    /// `C5 ln k`; the law agrees with the base law below this point.
    pub fn threshold(&self) -> f64 {
        self.scale
    }
    /// Upper end of the support, `2 C5 ln k`.
    pub fn cutoff(&self) -> f64 {
        2.0 * self.scale
    }
    /// Base-law mass beyond the cutoff, now spread over `[threshold, cutoff]`.
    pub fn repatriated_mass(&self) -> f64 {
        self.mass
    }
}

/// A tabulated continuous law: piecewise-linear density through the given nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    xs: Vec<f64>,
    density: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Tabulated {
    pub fn new(xs: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != density.len() {
            return domain("tabulated law needs at least two (x, density) nodes");
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) || xs[0] < 0.0 {
            return domain("tabulated nodes must be nonnegative and strictly increasing");
        }
        if density.iter().any(|&d| !(d >= 0.0) || !d.is_finite()) {
            return domain("tabulated density must be finite and nonnegative");
        }
        let mut cumulative = vec![0.0; xs.len()];
        for i in 1..xs.len() {
            cumulative[i] = cumulative[i - 1] + 0.5 * (density[i - 1] + density[i]) * (xs[i] - xs[i - 1]);
        }
        let total = *cumulative.last().unwrap();
        if !(total > 0.0) {
            return domain("tabulated density has zero mass");
        }
        let density = density.into_iter().map(|d| d / total).collect();
        let cumulative = cumulative.into_iter().map(|c| c / total).collect();
        Ok(Self {
            xs,
            density,
            cumulative,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.xs
    }

    /// Normalised density values at the nodes.
    pub fn densities(&self) -> &[f64] {
        &self.density
    }

    fn segment(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.xs.len() - 2),
        }
    }

    fn pdf(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x < self.xs[0] || x > self.xs[n - 1] {
            return 0.0;
        }
        let i = self.segment(x);
        let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.density[i] + t * (self.density[i + 1] - self.density[i])
    }

    fn cdf(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return 0.0;
        }
        if x >= self.xs[n - 1] {
            return 1.0;
        }
        let i = self.segment(x);
        let dx = x - self.xs[i];
        let slope = (self.density[i + 1] - self.density[i]) / (self.xs[i + 1] - self.xs[i]);
        (self.cumulative[i] + self.density[i] * dx + 0.5 * slope * dx * dx).min(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    /// Density `b^a / Gamma(a) y^{a-1} e^{-b y}`; `b` is a rate.
    Gamma {
        shape: f64,
        rate: f64,
    },
    Exponential {
        rate: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// `(1-p) delta_a + p delta_b`.
    Bernoulli {
        a: f64,
        b: f64,
        p: f64,
    },
    /// Law of `|N|`, `N` standard normal.
    HalfNormal,
    /// Point mass.
    Constant {
        value: f64,
    },
    Truncated(Truncated),
    Tabulated(Tabulated),
}

/// A one-dimensional edge-time law on `[0, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    kind: Kind,
}

impl Distribution {
    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        if !(shape > 0.0 && rate > 0.0 && shape.is_finite() && rate.is_finite()) {
            return domain(format!("gamma needs a > 0, b > 0 (got a={shape}, b={rate})"));
        }
        Ok(Self {
            kind: Kind::Gamma { shape, rate },
        })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return domain(format!("exponential rate must be positive, got {rate}"));
        }
        Ok(Self {
            kind: Kind::Exponential { rate },
        })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            return domain(format!("uniform needs 0 <= lo < hi (got [{lo}, {hi}])"));
        }
        Ok(Self {
            kind: Kind::Uniform { lo, hi },
        })
    }

    pub fn bernoulli(a: f64, b: f64, p: f64) -> Result<Self> {
        if !(a >= 0.0 && b > a && b.is_finite()) {
            return domain(format!("bernoulli needs 0 <= a < b (got a={a}, b={b})"));
        }
        if !(p > 0.0 && p < 1.0) {
            return domain(format!("bernoulli needs p in (0, 1), got {p}"));
        }
        Ok(Self {
            kind: Kind::Bernoulli { a, b, p },
        })
    }

    pub fn half_normal() -> Self {
        Self { kind: Kind::HalfNormal }
    }

    pub fn constant(value: f64) -> Result<Self> {
        if !(value >= 0.0 && value.is_finite()) {
            return domain(format!("constant edge time must be finite and >= 0, got {value}"));
        }
        Ok(Self {
            kind: Kind::Constant { value },
        })
    }

    pub fn tabulated(xs: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        Ok(Self {
            kind: Kind::Tabulated(Tabulated::new(xs, density)?),
        })
    }

    /// Builds `nu_k` from a continuous base law on `[0, inf)`.
    pub fn truncate(base: &Distribution, k: u64, c5: f64, bump: Bump) -> Result<Self> {
        if k < 2 {
            return domain(format!("truncation needs k >= 2, got {k}"));
        }
        if !(c5 > 0.0 && c5.is_finite()) {
            return domain(format!("truncation needs C5 > 0, got {c5}"));
        }
        bump.validate()?;
        if !base.is_continuous() {
            return Err(Error::UnsupportedKind(format!("truncation of discrete law {base}")));
        }
        let scale = c5 * (k as f64).ln();
        Ok(Self {
            kind: Kind::Truncated(Truncated {
                mass: base.sf(2.0 * scale),
                cdf_at_scale: base.cdf(scale),
                base: Box::new(base.clone()),
                k,
                c5,
                bump,
                scale,
            }),
        })
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn is_continuous(&self) -> bool {
        !matches!(self.kind, Kind::Bernoulli { .. } | Kind::Constant { .. })
    }

    /// Endpoints `(lower, upper)` of the support; `upper` may be infinite.
    pub fn support(&self) -> (f64, f64) {
        match &self.kind {
            Kind::Gamma { .. } | Kind::Exponential { .. } | Kind::HalfNormal => (0.0, f64::INFINITY),
            Kind::Uniform { lo, hi } => (*lo, *hi),
            Kind::Bernoulli { a, b, .. } => (*a, *b),
            Kind::Constant { value } => (*value, *value),
            Kind::Truncated(t) => {
                let (lo, hi) = t.base.support();
                (lo, hi.min(t.cutoff()))
            }
            Kind::Tabulated(t) => (t.xs[0], *t.xs.last().unwrap()),
        }
    }

    /// Density (continuous kinds) or point mass at `x` (discrete kinds).
    pub fn pdf(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Gamma { shape, rate } => {
                if x < 0.0 {
                    return 0.0;
                }
                if x == 0.0 {
                    return match shape.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => *rate,
                        _ => 0.0,
                    };
                }
                (shape * rate.ln() - ln_gamma(*shape) + (shape - 1.0) * x.ln() - rate * x).exp()
            }
            Kind::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
            Kind::Uniform { lo, hi } => {
                if x < *lo || x > *hi {
                    0.0
                } else {
                    1.0 / (hi - lo)
                }
            }
            Kind::HalfNormal => {
                if x < 0.0 {
                    0.0
                } else {
                    2.0 * gauss_pdf(x)
                }
            }
            Kind::Bernoulli { a, b, p } => {
                if x == *a {
                    1.0 - p
                } else if x == *b {
                    *p
                } else {
                    0.0
                }
            }
            Kind::Constant { value } => {
                if x == *value {
                    1.0
                } else {
                    0.0
                }
            }
            Kind::Truncated(t) => {
                if x > t.cutoff() {
                    return 0.0;
                }
                let base = t.base.pdf(x);
                if t.mass == 0.0 {
                    return base;
                }
                base + t.bump.pdf((x - t.scale) / t.scale) * t.mass / t.scale
            }
            Kind::Tabulated(t) => t.pdf(x),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Gamma { shape, rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    gamma_lr(*shape, rate * x)
                }
            }
            Kind::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Kind::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Kind::HalfNormal => {
                if x <= 0.0 {
                    0.0
                } else if x < 1.0 {
                    erf(x * std::f64::consts::FRAC_1_SQRT_2)
                } else {
                    1.0 - 2.0 * gauss_sf(x)
                }
            }
            Kind::Bernoulli { a, b, p } => {
                if x < *a {
                    0.0
                } else if x < *b {
                    1.0 - p
                } else {
                    1.0
                }
            }
            Kind::Constant { value } => {
                if x < *value {
                    0.0
                } else {
                    1.0
                }
            }
            Kind::Truncated(t) => {
                if x >= t.cutoff() {
                    return 1.0;
                }
                let base = t.base.cdf(x);
                if x <= t.scale || t.mass == 0.0 {
                    return base;
                }
                (base + t.mass * t.bump.cdf((x - t.scale) / t.scale)).min(1.0)
            }
            Kind::Tabulated(t) => t.cdf(x),
        }
    }

    /// Survival function `1 - CDF(x)`, accurate in the upper tail.
    pub fn sf(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Gamma { shape, rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    gamma_ur(*shape, rate * x)
                }
            }
            Kind::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            Kind::Uniform { lo, hi } => ((hi - x) / (hi - lo)).clamp(0.0, 1.0),
            Kind::HalfNormal => {
                if x <= 0.0 {
                    1.0
                } else {
                    2.0 * gauss_sf(x)
                }
            }
            Kind::Truncated(t) => {
                if x >= t.cutoff() {
                    return 0.0;
                }
                let base = t.base.sf(x);
                if x <= t.scale || t.mass == 0.0 {
                    return base;
                }
                (base - t.mass * t.bump.cdf((x - t.scale) / t.scale)).max(0.0)
            }
            _ => 1.0 - self.cdf(x),
        }
    }

    /// `(CDF(x), 1 - CDF(x))` with both tails accurate.
    pub fn prob(&self, x: f64) -> Probability {
        Probability::from_parts(self.cdf(x), self.sf(x))
    }

    /// Generalised inverse `inf { x : CDF(x) >= p }`.
    pub fn quantile(&self, p: impl Into<ProbabilityArg>) -> Result<f64> {
        self.quantile_prob(p.into().resolve()?)
    }

    fn quantile_prob(&self, p: Probability) -> Result<f64> {
        let (lo, hi) = self.support();
        if p.value() == 0.0 {
            return Ok(lo);
        }
        if p.complement() == 0.0 {
            return Ok(hi);
        }
        let lower_side = p.value() <= p.complement();
        match &self.kind {
            Kind::Exponential { rate } => Ok(if lower_side {
                -(-p.value()).ln_1p() / rate
            } else {
                -p.complement().ln() / rate
            }),
            Kind::Uniform { lo, hi } => Ok(if lower_side {
                lo + p.value() * (hi - lo)
            } else {
                hi - p.complement() * (hi - lo)
            }),
            Kind::Bernoulli { a, b, p: pb } => Ok(if p.value() <= 1.0 - pb { *a } else { *b }),
            Kind::Constant { value } => Ok(*value),
            Kind::HalfNormal if !lower_side => Ok(-gauss_quantile(0.5 * p.complement())?),
            Kind::Truncated(t) if p.value() <= t.cdf_at_scale => t.base.quantile_prob(p),
            Kind::Truncated(t) => self.solve_quantile(p, t.scale, t.cutoff()),
            _ => self.solve_quantile(p, lo, hi),
        }
    }

    /// Safeguarded Newton on whichever tail of `p` is smaller.
    fn solve_quantile(&self, p: Probability, lo: f64, hi: f64) -> Result<f64> {
        let lower_side = p.value() <= p.complement();
        // residual > 0  <=>  x is above the quantile
        let residual = |x: f64| {
            if lower_side {
                self.cdf(x) - p.value()
            } else {
                p.complement() - self.sf(x)
            }
        };
        let mut a = lo;
        let mut b = if hi.is_finite() {
            hi
        } else {
            let mut b = lo.max(0.0) + 1.0;
            let mut n = 0;
            while residual(b) < 0.0 {
                a = b;
                b *= 2.0;
                n += 1;
                if n > 2000 || !b.is_finite() {
                    return Err(Error::Numeric("quantile bracket diverged".into()));
                }
            }
            b
        };
        let mut x = 0.5 * (a + b);
        for _ in 0..300 {
            let r = residual(x);
            if r == 0.0 {
                return Ok(x);
            }
            if r > 0.0 {
                b = x;
            } else {
                a = x;
            }
            let d = self.pdf(x);
            let newton = if d > 0.0 && d.is_finite() { x - r / d } else { f64::NAN };
            let next = if newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs() || b - a <= 2.0 * f64::EPSILON * b.abs() {
                return Ok(next);
            }
            x = next;
        }
        Ok(x)
    }

    /// Maps a uniform draw in (0, 1) through the quantile.
    pub fn inverse_transform(&self, u: f64) -> f64 {
        match &self.kind {
            Kind::Bernoulli { a, b, p } => {
                if u <= 1.0 - p {
                    *a
                } else {
                    *b
                }
            }
            Kind::Constant { value } => *value,
            _ => self.quantile(u).expect("uniform draw is a valid probability"),
        }
    }

    /// Inverse-transform sample driven by `rng`.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        self.inverse_transform(open01(rng.next_u64()))
    }

    /// Expectation `E(Y)`.
    pub fn mean(&self) -> Result<f64> {
        Ok(match &self.kind {
            Kind::Gamma { shape, rate } => shape / rate,
            Kind::Exponential { rate } => 1.0 / rate,
            Kind::Uniform { lo, hi } => 0.5 * (lo + hi),
            Kind::Bernoulli { a, b, p } => (1.0 - p) * a + p * b,
            Kind::HalfNormal => (2.0 / std::f64::consts::PI).sqrt(),
            Kind::Constant { value } => *value,
            Kind::Truncated(_) | Kind::Tabulated(_) => {
                let (lo, hi) = self.support();
                integrate_pieces(|x| self.sf(x), &self.breakpoints(lo, hi), QuadOptions::default())?.value + lo
            }
        })
    }

    /// Points where the density may have kinks or jumps, within `[lo, hi]`.
    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut pts = vec![lo];
        match &self.kind {
            Kind::Truncated(t) => pts.extend([t.threshold(), t.cutoff()]),
            Kind::Tabulated(t) => pts.extend(t.xs.iter().copied()),
            _ => {}
        }
        pts.push(hi);
        pts.retain(|&x| x >= lo && x <= hi);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

impl std::fmt::Display for Distribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        spec::write_spec(self, f)
    }
}

impl std::str::FromStr for Distribution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        spec::parse_spec(s)
    }
}

impl serde::Serialize for Distribution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Distribution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl serde::Serialize for Bump {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Bump {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests;
