//! Exact checks of entropy inequalities on finite Bernoulli product spaces,
//! and quadrature checks of one-dimensional log-Sobolev inequalities.
//!
//! A [`ProductTable`] stores `f` on `{0,1}^n` with `x_1` as the most
//! significant bit of the index, so for `n = 2` the order is `00, 01, 10, 11`.
//! Coordinate `i` is Bernoulli with `P(x_i = 1) = p_i`.

mod lsi;
mod suite;

pub use lsi::{gaussian_lsi_check, onedim_lsi_check, OneDimLaw};
pub use suite::{random_suite, Family, SuiteConfig, SuiteSummary, WorstTable};

use serde::{Deserialize, Serialize};

use crate::distributions::lsi_constant_bernoulli;
use crate::error::{domain, Result};

pub const MAX_N: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct ProductTable {
    n: usize,
    p: Vec<f64>,
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl ProductTable {
    pub fn new(p: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let n = p.len();
        if n == 0 || n > MAX_N {
            return domain(format!("product table needs 1 <= n <= {MAX_N}, got {n}"));
        }
        if let Some(bad) = p.iter().find(|&&q| !(q > 0.0 && q < 1.0)) {
            return domain(format!("Bernoulli parameter {bad} outside (0, 1)"));
        }
        if values.len() != 1 << n {
            return domain(format!(
                "table has {} values, expected 2^{n} = {}",
                values.len(),
                1usize << n
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return domain("table values must be finite");
        }
        let mut weights = vec![1.0; 1 << n];
        for (x, w) in weights.iter_mut().enumerate() {
            for (i, &q) in p.iter().enumerate() {
                *w *= if x & mask(n, i) != 0 { q } else { 1.0 - q };
            }
        }
        Ok(Self { n, p, values, weights })
    }

    /// Tabulates `f` over `{0,1}^n`; `f` receives `x_1..x_n`.
    pub fn from_fn(p: Vec<f64>, f: impl Fn(&[bool]) -> f64) -> Result<Self> {
        let n = p.len();
        if n > MAX_N {
            return domain(format!("product table needs n <= {MAX_N}, got {n}"));
        }
        let values = (0..1usize << n)
            .map(|x| f(&(0..n).map(|i| x & mask(n, i) != 0).collect::<Vec<_>>()))
            .collect();
        Self::new(p, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn p(&self) -> &[f64] {
        &self.p
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    /// Probability of each configuration under the product measure.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Same measure, different function.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.p.clone(), values)
    }

    pub fn expectation(&self, g: &[f64]) -> f64 {
        self.weights.iter().zip(g).map(|(w, v)| w * v).sum()
    }

    pub fn variance(&self, g: &[f64]) -> f64 {
        let m = self.expectation(g);
        self.weights.iter().zip(g).map(|(w, v)| w * (v - m) * (v - m)).sum()
    }

    /// `||g||_1 = E|g|`.
    pub fn l1(&self, g: &[f64]) -> f64 {
        self.weights.iter().zip(g).map(|(w, v)| w * v.abs()).sum()
    }

    /// `Ent(g) = E(g ln g) - E(g) ln E(g)` for `g >= 0`, not identically zero.
    pub fn entropy(&self, g: &[f64]) -> Result<f64> {
        if let Some(v) = g.iter().find(|&&v| !(v >= 0.0)) {
            return domain(format!("entropy needs nonnegative values, found {v}"));
        }
        let m = self.expectation(g);
        if m == 0.0 {
            return domain("entropy of the zero function is undefined");
        }
        // E(g ln(g / m)) rather than E(g ln g) - m ln m, which cancels badly for small g.
        Ok(self
            .weights
            .iter()
            .zip(g)
            .filter(|(_, &v)| v > 0.0)
            .map(|(w, &v)| w * v * (v / m).ln())
            .sum())
    }

    /// `E_i g`: integrates out coordinate `i` (0-based).
    pub fn integrate_coordinate(&self, g: &[f64], i: usize) -> Vec<f64> {
        let bit = mask(self.n, i);
        let q = self.p[i];
        (0..g.len()).map(|x| (1.0 - q) * g[x & !bit] + q * g[x | bit]).collect()
    }

    /// `Delta_i g = g - E_i g`.
    pub fn delta(&self, g: &[f64], i: usize) -> Vec<f64> {
        let e = self.integrate_coordinate(g, i);
        g.iter().zip(e).map(|(a, b)| a - b).collect()
    }
}

// Index bit of coordinate i (0-based), with x_1 the most significant.
#[inline]
fn mask(n: usize, i: usize) -> usize {
    1 << (n - 1 - i)
}

/// Entropy of the table's own values.
pub fn entropy(f: &ProductTable) -> Result<f64> {
    f.entropy(f.values())
}

/// `V_j = F_{j-1} - F_j` with `F_j` the integral of `f` over coordinates `1..j`.
pub fn martingale_increments(f: &ProductTable) -> Vec<Vec<f64>> {
    let mut prev = f.values().to_vec();
    (0..f.n())
        .map(|j| {
            let next = f.integrate_coordinate(&prev, j);
            let v = prev.iter().zip(&next).map(|(a, b)| a - b).collect();
            prev = next;
            v
        })
        .collect()
}

/// Independent route to the increments: `E(f | x_j..x_n) - E(f | x_{j+1}..x_n)`,
/// each conditional expectation summed directly over the integrated prefix.
pub fn martingale_increments_oracle(f: &ProductTable) -> Vec<Vec<f64>> {
    let n = f.n();
    let size = 1usize << n;
    // cond[j][x] = E(f | coordinates j+1..n of x), j = 0..=n (0-based prefix length)
    let cond: Vec<Vec<f64>> = (0..=n)
        .map(|j| {
            let suffix_bits = n - j;
            let suffix_mask = (1usize << suffix_bits) - 1;
            let mut num = vec![0.0; 1 << suffix_bits];
            let mut den = vec![0.0; 1 << suffix_bits];
            for x in 0..size {
                let mut w = 1.0;
                for i in 0..j {
                    w *= if x & mask(n, i) != 0 { f.p[i] } else { 1.0 - f.p[i] };
                }
                num[x & suffix_mask] += w * f.values[x];
                den[x & suffix_mask] += w;
            }
            (0..size).map(|x| num[x & suffix_mask] / den[x & suffix_mask]).collect()
        })
        .collect();
    (0..n)
        .map(|j| cond[j].iter().zip(&cond[j + 1]).map(|(a, b)| a - b).collect())
        .collect()
}

/// Outcome of an inequality check `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IneqReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`, unclamped.
    pub slack: f64,
    pub variance: f64,
    /// Per increment: `Ent(V_j^2)` (Falik-Samorodnitsky check only).
    pub entropy_terms: Vec<f64>,
    /// Per coordinate: `c_LS(p_i) E((Delta_i f)^2)`.
    pub energy_terms: Vec<f64>,
    /// Per coordinate: `||Delta_i f||_1` (or `||V_j||_1` for the increment bound).
    pub l1_norms: Vec<f64>,
    pub pass: bool,
}

/// Relative tolerance on the slack for exact table checks.
pub const SLACK_TOL: f64 = 1e-9;

// Var log(Var / denom), with 0 when either factor vanishes.
fn var_log_ratio(var: f64, denom: f64) -> f64 {
    if var == 0.0 || denom == 0.0 {
        0.0
    } else {
        var * (var / denom).ln()
    }
}

// Both sides come out of cancelling sums of size E(f^2) with weights that are
// products of n factors, so tables where both sides vanish (a dictator at
// p = 1/2, say) need an absolute floor as well as the relative one.
fn finish(lhs: f64, rhs: f64, tol: f64, abs_floor: f64) -> (f64, bool) {
    let slack = rhs - lhs;
    (slack, slack >= -(tol * rhs.abs() + abs_floor))
}

fn rounding_floor(f: &ProductTable) -> f64 {
    let sq: Vec<f64> = f.values().iter().map(|v| v * v).collect();
    32.0 * f.n() as f64 * f64::EPSILON * f.expectation(&sq)
}

/// `Var log(Var / sum_i ||Delta_i f||_1^2) <= sum_i c_LS(p_i) E((Delta_i f)^2)`.
pub fn verify_modified_poincare(f: &ProductTable) -> Result<IneqReport> {
    let var = f.variance(f.values());
    let mut energy_terms = Vec::with_capacity(f.n());
    let mut l1_norms = Vec::with_capacity(f.n());
    for i in 0..f.n() {
        let d = f.delta(f.values(), i);
        let sq: Vec<f64> = d.iter().map(|v| v * v).collect();
        energy_terms.push(lsi_constant_bernoulli(f.p[i])? * f.expectation(&sq));
        l1_norms.push(f.l1(&d));
    }
    let denom: f64 = l1_norms.iter().map(|v| v * v).sum();
    let lhs = var_log_ratio(var, denom);
    let rhs: f64 = energy_terms.iter().sum();
    let (slack, pass) = finish(lhs, rhs, SLACK_TOL, rounding_floor(f));
    Ok(IneqReport {
        lhs,
        rhs,
        slack,
        variance: var,
        entropy_terms: Vec::new(),
        energy_terms,
        l1_norms,
        pass,
    })
}

/// `sum_j Ent(V_j^2) >= Var log(Var / sum_j ||V_j||_1^2)`; here `lhs` is the
/// logarithmic term and `rhs` the entropy sum.
pub fn verify_fs_bound(f: &ProductTable) -> Result<IneqReport> {
    let var = f.variance(f.values());
    let increments = martingale_increments(f);
    let mut entropy_terms = Vec::with_capacity(f.n());
    let mut l1_norms = Vec::with_capacity(f.n());
    for v in &increments {
        let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
        entropy_terms.push(if sq.iter().all(|&x| x == 0.0) {
            0.0
        } else {
            f.entropy(&sq)?
        });
        l1_norms.push(f.l1(v));
    }
    let denom: f64 = l1_norms.iter().map(|v| v * v).sum();
    let lhs = var_log_ratio(var, denom);
    let rhs: f64 = entropy_terms.iter().sum();
    let (slack, pass) = finish(lhs, rhs, SLACK_TOL, rounding_floor(f));
    Ok(IneqReport {
        lhs,
        rhs,
        slack,
        variance: var,
        entropy_terms,
        energy_terms: Vec::new(),
        l1_norms,
        pass,
    })
}

/// The Jensen step: `sum_j ||V_j||_1^2 <= sum_j ||Delta_j f||_1^2`. Returns both sides.
pub fn jensen_denominators(f: &ProductTable) -> (f64, f64) {
    let inc: f64 = martingale_increments(f).iter().map(|v| f.l1(v).powi(2)).sum();
    let full: f64 = (0..f.n()).map(|j| f.l1(&f.delta(f.values(), j)).powi(2)).sum();
    (inc, full)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub coordinate: usize,
    /// `sum_j E((Delta_i V_j)^2)`
    pub increments_energy: f64,
    /// `E((Delta_i f)^2)`
    pub energy: f64,
    pub abs_diff: f64,
    pub pass: bool,
}

/// Checks `sum_j E((Delta_i V_j)^2) = E((Delta_i f)^2)` for a 1-based coordinate `i`.
pub fn verify_energy_decomposition(f: &ProductTable, i: usize) -> Result<EnergyReport> {
    if i == 0 || i > f.n() {
        return domain(format!("coordinate {i} outside 1..={}", f.n()));
    }
    let c = i - 1;
    let energy_of = |g: &[f64]| {
        let d = f.delta(g, c);
        f.expectation(&d.iter().map(|v| v * v).collect::<Vec<_>>())
    };
    let increments_energy: f64 = martingale_increments(f).iter().map(|v| energy_of(v)).sum();
    let energy = energy_of(f.values());
    let abs_diff = (increments_energy - energy).abs();
    Ok(EnergyReport {
        coordinate: i,
        increments_energy,
        energy,
        abs_diff,
        pass: abs_diff <= 1e-10 * energy.max(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half(n: usize) -> Vec<f64> {
        vec![0.5; n]
    }

    #[test]
    fn index_convention() {
        let f = ProductTable::from_fn(half(2), |x| 2.0 * x[0] as u8 as f64 + x[1] as u8 as f64).unwrap();
        assert_eq!(f.values(), &[0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(ProductTable::new(vec![0.5, 1.0], vec![0.0; 4]).is_err());
        assert!(ProductTable::new(vec![0.5], vec![0.0; 4]).is_err());
        assert!(ProductTable::new(vec![0.5; 21], vec![]).is_err());
    }

    #[test]
    fn entropy_examples() {
        let t = ProductTable::new(half(1), vec![1.0, 3.0]).unwrap();
        let expected = 1.5 * 3f64.ln() - 2.0 * 2f64.ln();
        assert!((entropy(&t).unwrap() - expected).abs() < 1e-15);
        // 50-digit reference
        assert!((entropy(&t).unwrap() - 0.261_624_071_882_273_9).abs() < 1e-15);
        let c = ProductTable::new(half(2), vec![2.5; 4]).unwrap();
        assert!(entropy(&c).unwrap().abs() < 1e-15);
        assert!(t.entropy(&[-1.0, 1.0]).is_err());
        assert!(t.entropy(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn increments_of_worked_example() {
        let f = ProductTable::new(half(2), vec![0.0, 1.0, 2.0, 5.0]).unwrap();
        let v = martingale_increments(&f);
        // E f = 2; F_1 = (1, 3) in x2; V_1 = f - F_1, V_2 = F_1 - 2
        assert_eq!(v[0], vec![-1.0, -2.0, 1.0, 2.0]);
        assert_eq!(v[1], vec![-1.0, 1.0, -1.0, 1.0]);
        let oracle = martingale_increments_oracle(&f);
        assert_eq!(v, oracle);
    }

    #[test]
    fn increments_of_first_coordinate_function() {
        let f = ProductTable::from_fn(vec![0.3, 0.6, 0.1], |x| if x[0] { 4.0 } else { 1.0 }).unwrap();
        let v = martingale_increments(&f);
        let m = f.expectation(f.values());
        for (x, &val) in f.values().iter().enumerate() {
            assert!((v[0][x] - (val - m)).abs() < 1e-15);
        }
        assert!(v[1..].iter().flatten().all(|&t| t.abs() < 1e-15));
    }

    #[test]
    fn dictator_reports() {
        let f = ProductTable::from_fn(half(3), |x| x[0] as u8 as f64).unwrap();
        let mp = verify_modified_poincare(&f).unwrap();
        assert!((mp.variance - 0.25).abs() < 1e-15);
        assert!(mp.lhs.abs() < 1e-15);
        assert!((mp.rhs - 0.5).abs() < 1e-15);
        assert!(mp.pass);
        let fs = verify_fs_bound(&f).unwrap();
        assert!(fs.pass && fs.lhs.abs() < 1e-15);
        // V_1 = x_1 - 1/2 so V_1^2 = 1/4 is constant.
        assert!(fs.entropy_terms[0].abs() < 1e-15);
        let e = verify_energy_decomposition(&f, 1).unwrap();
        assert!((e.energy - 0.25).abs() < 1e-15 && (e.increments_energy - 0.25).abs() < 1e-15);
    }

    #[test]
    fn constant_function_conventions() {
        let f = ProductTable::new(half(2), vec![3.0; 4]).unwrap();
        let mp = verify_modified_poincare(&f).unwrap();
        assert_eq!((mp.lhs, mp.rhs, mp.pass), (0.0, 0.0, true));
        let fs = verify_fs_bound(&f).unwrap();
        assert_eq!((fs.lhs, fs.rhs, fs.pass), (0.0, 0.0, true));
        assert!(martingale_increments(&f).iter().flatten().all(|&v| v == 0.0));
        let e = verify_energy_decomposition(&f, 2).unwrap();
        assert_eq!((e.energy, e.increments_energy), (0.0, 0.0));
    }

    #[test]
    fn energy_coordinate_bounds() {
        let f = ProductTable::new(half(2), vec![0.0, 1.0, 2.0, 5.0]).unwrap();
        assert!(verify_energy_decomposition(&f, 0).is_err());
        assert!(verify_energy_decomposition(&f, 3).is_err());
    }
}
