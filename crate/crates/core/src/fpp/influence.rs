use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{GeodesicResult, LatticeBox, Solver, WeightField};
use crate::distributions::{Distribution, Kind};
use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_pieces, QuadOptions};
use crate::rng::open01;

/// `y_inf = d_x(u, v)|_{x_e = inf} - d_x(u, v) + x_e` for an edge of the geodesic.
///
/// Along the geodesic the passage time as a function of `x_e` is
/// `min(y, y_inf) - x_e + time`, so `y_inf` is where it stops growing.
pub fn edge_breakpoint(solver: &mut Solver, w: &WeightField, result: &GeodesicResult, e: usize) -> Result<f64> {
    if !result.contains_edge(e) {
        return domain(format!("edge {e} is not on the geodesic"));
    }
    let mut weights = w.weights().to_vec();
    weights[e] = f64::INFINITY;
    let without = solver.time_weights(w.lattice(), &weights, result.source, result.target)?;
    Ok(without - result.time + w.weight(e))
}

fn check_edge(lattice: &LatticeBox, e: usize) -> Result<()> {
    if e >= lattice.num_edges() {
        return domain(format!("edge {e} outside the box ({} edges)", lattice.num_edges()));
    }
    Ok(())
}

/// Monte Carlo estimate of `W_{e,+} = E[(F(x^{-e}, Y) - F(x))_+]` with `Y ~ dist`.
///
/// Edges off the geodesic contribute 0 since raising them cannot raise the
/// time. Bernoulli laws are integrated exactly over both atoms, constants give 0, and
/// continuous laws use `resamples` antithetic pairs `Q(U), Q(1 - U)`.
pub fn edge_influence<R: RngCore + ?Sized>(
    w: &WeightField,
    result: &GeodesicResult,
    e: usize,
    dist: &Distribution,
    resamples: usize,
    rng: &mut R,
) -> Result<f64> {
    check_edge(w.lattice(), e)?;
    if resamples < 1 {
        return domain("edge_influence needs at least one resample");
    }
    if !result.contains_edge(e) {
        return Ok(0.0);
    }
    let x = w.weight(e);
    let y_inf = edge_breakpoint(&mut Solver::new(), w, result, e)?;
    let gain = |y: f64| (y.min(y_inf) - x).max(0.0);
    match dist.kind() {
        Kind::Constant { value } => Ok(gain(*value)),
        Kind::Bernoulli { a, b, p } => Ok((1.0 - p) * gain(*a) + p * gain(*b)),
        _ => {
            let mut acc = 0.0;
            for _ in 0..resamples {
                let u = open01(rng.next_u64());
                acc += gain(dist.inverse_transform(u)) + gain(dist.inverse_transform(1.0 - u));
            }
            Ok(acc / (2 * resamples) as f64)
        }
    }
}

/// `W_{e,+} = int_{x_e}^{y_inf} P(Y > y) dy` without sampling: atoms are summed
/// and continuous laws integrated by quadrature.
pub fn edge_influence_exact(x_e: f64, y_inf: f64, dist: &Distribution) -> Result<f64> {
    if y_inf <= x_e {
        return Ok(0.0);
    }
    let gain = |y: f64| (y.min(y_inf) - x_e).max(0.0);
    match dist.kind() {
        Kind::Constant { value } => return Ok(gain(*value)),
        Kind::Bernoulli { a, b, p } => return Ok((1.0 - p) * gain(*a) + p * gain(*b)),
        _ => {}
    }
    let (_, hi) = dist.support();
    let top = y_inf.min(hi);
    if top <= x_e {
        return Ok(0.0);
    }
    let points = dist.breakpoints(x_e, top);
    Ok(integrate_pieces(|y| dist.sf(y), &points, QuadOptions::default())?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBoundReport {
    /// `V_{E,+} = sum_e int (F(x^{-e}, y) - F(x))_+^2 dnu(y)`.
    pub value: f64,
    /// `(b - a)^2 / a * F(x)`.
    pub bound: f64,
    pub geodesic_len: usize,
    pub pass: bool,
}

/// `V_{E,+}` for Bernoulli{a, b, p} weights, evaluated by re-solving with each
/// geodesic edge at `a` raised to `b`.
pub fn v_e_plus_bernoulli(w: &WeightField, result: &GeodesicResult) -> Result<EnergyBoundReport> {
    v_e_plus_bernoulli_with(&mut Solver::new(), w, result)
}

pub fn v_e_plus_bernoulli_with(
    solver: &mut Solver,
    w: &WeightField,
    result: &GeodesicResult,
) -> Result<EnergyBoundReport> {
    let Kind::Bernoulli { a, b, p } = *w.distribution().kind() else {
        return Err(Error::UnsupportedKind(format!(
            "V_E,+ bound needs bernoulli weights, got {}",
            w.distribution()
        )));
    };
    if a <= 0.0 {
        return Err(Error::UnsupportedParameter("V_E,+ bound needs a > 0".into()));
    }
    let mut weights = w.weights().to_vec();
    let mut value = 0.0;
    for &e in &result.edges {
        if weights[e] != a {
            continue;
        }
        weights[e] = b;
        let raised = solver.time_weights(w.lattice(), &weights, result.source, result.target)?;
        weights[e] = a;
        let gain = (raised - result.time).max(0.0);
        value += p * gain * gain;
    }
    let bound = (b - a) * (b - a) / a * result.time;
    Ok(EnergyBoundReport {
        value,
        bound,
        geodesic_len: result.len(),
        pass: value <= bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The geodesic is not unique, so the derivative is not defined.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeReport {
    pub edge: usize,
    pub on_geodesic: bool,
    pub epsilon: f64,
    pub delta_time: f64,
    /// `min(epsilon, y_inf - x_e)` on the geodesic, 0 off it.
    pub expected: f64,
    pub breakpoint: Option<f64>,
    pub status: CheckStatus,
}

/// Raises `x_e` by `epsilon` and compares the change in time with `epsilon * 1_{e in gamma}`.
pub fn geodesic_derivative_check(
    w: &WeightField,
    result: &GeodesicResult,
    e: usize,
    epsilon: f64,
) -> Result<DerivativeReport> {
    check_edge(w.lattice(), e)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return domain(format!("epsilon must be positive, got {epsilon}"));
    }
    let mut solver = Solver::new();
    let on_geodesic = result.contains_edge(e);
    let breakpoint = if on_geodesic {
        Some(edge_breakpoint(&mut solver, w, result, e)?)
    } else {
        None
    };
    let mut weights = w.weights().to_vec();
    weights[e] += epsilon;
    let delta_time = solver.time_weights(w.lattice(), &weights, result.source, result.target)? - result.time;
    let expected = breakpoint.map_or(0.0, |y| epsilon.min(y - w.weight(e)));
    let status = if !result.unique {
        CheckStatus::Inconclusive
    } else if (delta_time - expected).abs() <= 1e-12 * result.time.max(1.0) {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    Ok(DerivativeReport {
        edge: e,
        on_geodesic,
        epsilon,
        delta_time,
        expected,
        breakpoint,
        status,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub edge: usize,
    pub ys: Vec<f64>,
    pub times: Vec<f64>,
    /// Time with the edge removed.
    pub plateau: f64,
    /// Value of `x_e` where the slope drops from 1 to 0.
    pub breakpoint: f64,
    /// Largest distance to `min(plateau, times(0) + y)`.
    pub max_deviation: f64,
    pub pass: bool,
}

/// Passage time as `x_e` runs over `ys`, checked against the slope-1-then-flat shape.
pub fn sweep_edge_weight(w: &WeightField, s: usize, t: usize, e: usize, ys: &[f64]) -> Result<SweepReport> {
    check_edge(w.lattice(), e)?;
    if ys.iter().any(|y| !(*y >= 0.0)) {
        return domain("sweep values must be nonnegative");
    }
    let mut solver = Solver::new();
    let mut weights = w.weights().to_vec();
    let mut solve_at = |y: f64, solver: &mut Solver| -> Result<f64> {
        weights[e] = y;
        solver.time_weights(w.lattice(), &weights, s, t)
    };
    let plateau = solve_at(f64::INFINITY, &mut solver)?;
    let base = solve_at(0.0, &mut solver)?;
    let times = ys
        .iter()
        .map(|&y| solve_at(y, &mut solver))
        .collect::<Result<Vec<_>>>()?;
    let max_deviation = ys
        .iter()
        .zip(&times)
        .map(|(&y, &f)| (f - plateau.min(base + y)).abs())
        .fold(0.0, f64::max);
    Ok(SweepReport {
        edge: e,
        ys: ys.to_vec(),
        times,
        plateau,
        breakpoint: plateau - base,
        max_deviation,
        pass: max_deviation <= 1e-12 * plateau.max(1.0),
    })
}
