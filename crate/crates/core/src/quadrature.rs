//! Adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Global subdivision: the interval with the largest error estimate is
//! bisected until the summed estimate meets the tolerance. Infinite ranges
//! are mapped onto finite ones; the nodes never touch interval endpoints,
//! so integrable endpoint singularities are handled by repeated bisection.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-11,
            abs_tol: 1e-300,
            max_intervals: 4000,
        }
    }
}

impl QuadOptions {
    pub fn rel(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.abs() * WGK[7];
    for (i, &x) in XGK.iter().take(7).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[i] * (f1 + f2);
        abs_sum += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let raw = ((kronrod - gauss) * half).abs();
    let floor = 50.0 * f64::EPSILON * abs_sum * half.abs();
    (value, raw.max(floor))
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, opts: QuadOptions) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            abs_error: 0.0,
            intervals: 0,
        });
    }
    let (value, error) = gk15(f, a, b);
    if !value.is_finite() {
        return Err(Error::Numeric(format!("non-finite integrand on [{a}, {b}]")));
    }
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Numeric(format!(
                "quadrature did not converge on [{a}, {b}]: estimate {total:e} ± {total_err:e}"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted at machine resolution; keep its estimate.
            total_err -= worst.error;
            heap.push(Piece { error: 0.0, ..worst });
            continue;
        }
        let (v1, e1) = gk15(f, worst.a, mid);
        let (v2, e2) = gk15(f, mid, worst.b);
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite integrand near [{}, {}]",
                worst.a, worst.b
            )));
        }
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Piece {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum to shed the drift of incremental updates.
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let abs_error: f64 = heap.iter().map(|p| p.error).sum();
    Ok(Quadrature {
        value,
        abs_error,
        intervals: heap.len(),
    })
}

/// Integrates `f` over `[a, b]`; either bound may be infinite.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Quadrature> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::Domain("NaN integration bound".into()));
    }
    if a > b {
        let q = integrate(f, b, a, opts)?;
        return Ok(Quadrature { value: -q.value, ..q });
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => adaptive(&f, a, b, opts),
        (true, false) => adaptive(
            &|t: f64| {
                let s = 1.0 - t;
                let v = f(a + t / s);
                if v == 0.0 {
                    0.0
                } else {
                    v / (s * s)
                }
            },
            0.0,
            1.0,
            opts,
        ),
        (false, true) => adaptive(
            &|t: f64| {
                let s = 1.0 - t;
                let v = f(b - t / s);
                if v == 0.0 {
                    0.0
                } else {
                    v / (s * s)
                }
            },
            0.0,
            1.0,
            opts,
        ),
        (false, false) => adaptive(
            &|t: f64| {
                let s = 1.0 - t * t;
                let v = f(t / s);
                if v == 0.0 {
                    0.0
                } else {
                    v * (1.0 + t * t) / (s * s)
                }
            },
            -1.0,
            1.0,
            opts,
        ),
    }
}

/// Integrates over consecutive segments `points[i]..points[i+1]`.
///
/// Use this to put kinks and jumps of the integrand on segment boundaries.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, points: &[f64], opts: QuadOptions) -> Result<Quadrature> {
    let mut out = Quadrature {
        value: 0.0,
        abs_error: 0.0,
        intervals: 0,
    };
    for w in points.windows(2) {
        let q = integrate(&f, w[0], w[1], opts)?;
        out.value += q.value;
        out.abs_error += q.abs_error;
        out.intervals += q.intervals;
    }
    Ok(out)
}
