//! The randomising offset map.
//!
//! Bit strings of length `n = m^2` are listed by Hamming weight and then, within
//! a weight class, in a fixed lexicographic order. `g_m(x) = floor(rank(x) / k(m))`
//! with `k(m) = ceil(2^n / m)`, and the random offset is
//! `z(a) = sum_i g_m(a_i) e_i` for a `d x n` bit matrix `a`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Largest `m` accepted by [`AveragingMap::new`] (binomial tables grow as `m^4`).
pub const MAX_M: usize = 16;
/// Largest `m` for exhaustive verification (`2^{m^2}` strings).
pub const MAX_VERIFY_M: usize = 4;

/// Order inside a Hamming-weight class. Position 1 (leftmost) is the most significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassOrder {
    /// Largest string first within each class.
    #[default]
    Descending,
    /// Smallest string first (`0...01` precedes `0...10`).
    Ascending,
}

#[derive(Debug, Clone)]
pub struct AveragingMap {
    m: usize,
    order: ClassOrder,
    k: BigUint,
    /// `binom[a][b] = C(a, b)` for `a <= n`.
    binom: Vec<Vec<BigUint>>,
    /// `before[w]` = number of strings of weight `< w`.
    before: Vec<BigUint>,
}

impl AveragingMap {
    pub fn new(m: usize, order: ClassOrder) -> Result<Self> {
        if m == 0 {
            return domain("averaging map needs m >= 1");
        }
        if m > MAX_M {
            return Err(Error::ResourceGuard(format!(
                "averaging map limited to m <= {MAX_M}, got {m}"
            )));
        }
        let n = m * m;
        let mut binom: Vec<Vec<BigUint>> = Vec::with_capacity(n + 1);
        for a in 0..=n {
            let mut row = vec![BigUint::one(); a + 1];
            for b in 1..a {
                row[b] = &binom[a - 1][b - 1] + &binom[a - 1][b];
            }
            binom.push(row);
        }
        let mut before = Vec::with_capacity(n + 2);
        let mut acc = BigUint::zero();
        for w in 0..=n {
            before.push(acc.clone());
            acc += &binom[n][w];
        }
        let total = BigUint::one() << n;
        let m_big = BigUint::from(m);
        let k = (&total + &m_big - 1u32) / &m_big;
        Ok(Self {
            m,
            order,
            k,
            binom,
            before,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Bit count `m^2`.
    pub fn n(&self) -> usize {
        self.m * self.m
    }

    pub fn order(&self) -> ClassOrder {
        self.order
    }

    /// Block size `k(m) = ceil(2^{m^2} / m)`.
    pub fn k(&self) -> &BigUint {
        &self.k
    }

    fn binom(&self, a: usize, b: usize) -> &BigUint {
        static ZERO: std::sync::OnceLock<BigUint> = std::sync::OnceLock::new();
        if b > a {
            ZERO.get_or_init(BigUint::zero)
        } else {
            &self.binom[a][b]
        }
    }

    fn check_len(&self, x: &[bool]) -> Result<()> {
        if x.len() != self.n() {
            return domain(format!(
                "bit string has length {}, expected m^2 = {}",
                x.len(),
                self.n()
            ));
        }
        Ok(())
    }

    // Zero-based index of x among the strings of its weight, smallest first.
    fn ascending_index(&self, x: &[bool], complement: bool) -> BigUint {
        let n = x.len();
        let mut remaining = x.iter().filter(|&&b| b != complement).count();
        let mut idx = BigUint::zero();
        for (i, &bit) in x.iter().enumerate() {
            if remaining == 0 {
                break;
            }
            if bit != complement {
                // strings sharing the prefix but with a 0 here come first
                idx += self.binom(n - i - 1, remaining);
                remaining -= 1;
            }
        }
        idx
    }

    /// Position of `x` in the listing, from 1 (all zeros) to `2^{m^2}` (all ones).
    pub fn rank(&self, x: &[bool]) -> Result<BigUint> {
        self.check_len(x)?;
        let w = x.iter().filter(|&&b| b).count();
        let within = match self.order {
            ClassOrder::Ascending => self.ascending_index(x, false),
            // Complementing reverses the numeric order and maps weight w to n - w.
            ClassOrder::Descending => self.ascending_index(x, true),
        };
        Ok(&self.before[w] + within + 1u32)
    }

    /// `g_m(x) = floor(rank(x) / k(m))`, in `{0, ..., m}`.
    pub fn g(&self, x: &[bool]) -> Result<usize> {
        let level = self.rank(x)? / &self.k;
        Ok(level.to_usize().expect("level is at most m"))
    }

    /// Offset `z(a)` from a `d x m^2` bit matrix.
    pub fn offset(&self, a: &[Vec<bool>]) -> Result<Vec<usize>> {
        a.iter().map(|row| self.g(row)).collect()
    }

    /// Draws `a` uniformly and returns it with `z(a)`.
    pub fn sample_offset<R: RngCore + ?Sized>(&self, rng: &mut R, d: usize) -> Result<OffsetSample> {
        if d < 2 {
            return domain(format!("offset needs dimension d >= 2, got {d}"));
        }
        let n = self.n();
        let a: Vec<Vec<bool>> = (0..d)
            .map(|_| {
                let mut row = Vec::with_capacity(n);
                while row.len() < n {
                    let word = rng.next_u64();
                    row.extend((0..64.min(n - row.len())).map(|j| (word >> j) & 1 == 1));
                }
                row
            })
            .collect();
        let z = self.offset(&a)?;
        Ok(OffsetSample { a, z })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OffsetSample {
    /// `d` rows of `m^2` bits.
    pub a: Vec<Vec<bool>>,
    /// `z_i = g_m(a_i)`.
    pub z: Vec<usize>,
}

/// Draws an offset with the default class order.
pub fn sample_offset<R: RngCore + ?Sized>(rng: &mut R, m: usize, d: usize) -> Result<OffsetSample> {
    AveragingMap::new(m, ClassOrder::default())?.sample_offset(rng, d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragingReport {
    pub m: usize,
    pub n_bits: usize,
    pub order: ClassOrder,
    pub k: String,
    pub strings: u64,
    /// Number of `(x, q)` with bit `q` of `x` clear.
    pub flips_checked: u64,
    /// Flips whose change of `g_m` is outside `{0, 1}`.
    pub gradient_violations: u64,
    pub gradient_holds: bool,
    /// First violating `(x, q)` as (bit string, 1-based position, g before, g after).
    pub first_violation: Option<(String, usize, usize, usize)>,
    pub rank_is_bijection: bool,
    pub rank_monotone_in_weight: bool,
    pub level_sizes: Vec<u64>,
    pub max_level_measure: f64,
    /// `m * max_level_measure`, the smallest `c` with `max measure <= c / m`.
    pub implied_c: f64,
    pub within_4_over_m: bool,
}

fn bits_of(v: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| (v >> (n - 1 - i)) & 1 == 1).collect()
}

fn bit_string(x: &[bool]) -> String {
    x.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Exhaustive check of the gradient and level-set properties for `m <= 4`.
pub fn verify_averaging_properties(m: usize, order: ClassOrder) -> Result<AveragingReport> {
    if m > MAX_VERIFY_M {
        return Err(Error::ResourceGuard(format!(
            "exhaustive verification needs m <= {MAX_VERIFY_M}, got {m}"
        )));
    }
    let map = AveragingMap::new(m, order)?;
    let n = map.n();
    let total = 1u64 << n;
    // Strings are encoded with position 1 as the most significant bit of the integer.
    let mut ranks = vec![0u64; total as usize];
    let mut g = vec![0usize; total as usize];
    for v in 0..total {
        let x = bits_of(v, n);
        ranks[v as usize] = map.rank(&x)?.to_u64().expect("m <= 4 fits in u64");
        g[v as usize] = map.g(&x)?;
    }

    let mut seen = vec![false; total as usize];
    let mut bijection = true;
    for &r in &ranks {
        if r == 0 || r > total || seen[(r - 1) as usize] {
            bijection = false;
        } else {
            seen[(r - 1) as usize] = true;
        }
    }
    let mut by_rank = vec![0u32; total as usize];
    for v in 0..total {
        if bijection {
            by_rank[(ranks[v as usize] - 1) as usize] = v.count_ones();
        }
    }
    let monotone = bijection && by_rank.windows(2).all(|w| w[0] <= w[1]);

    let (mut flips, mut violations, mut first) = (0u64, 0u64, None);
    for v in 0..total {
        for q in 0..n {
            let mask = 1u64 << (n - 1 - q);
            if v & mask != 0 {
                continue;
            }
            flips += 1;
            let (lo, hi) = (g[v as usize], g[(v | mask) as usize]);
            if !(hi == lo || hi == lo + 1) {
                violations += 1;
                if first.is_none() {
                    first = Some((bit_string(&bits_of(v, n)), q + 1, lo, hi));
                }
            }
        }
    }

    let mut level_sizes = vec![0u64; m + 1];
    for &l in &g {
        level_sizes[l] += 1;
    }
    let max_level_measure = *level_sizes.iter().max().unwrap() as f64 / total as f64;
    let implied_c = m as f64 * max_level_measure;
    Ok(AveragingReport {
        m,
        n_bits: n,
        order,
        k: map.k().to_string(),
        strings: total,
        flips_checked: flips,
        gradient_violations: violations,
        gradient_holds: violations == 0,
        first_violation: first,
        rank_is_bijection: bijection,
        rank_monotone_in_weight: monotone,
        level_sizes,
        max_level_measure,
        implied_c,
        within_4_over_m: max_level_measure <= 4.0 / m as f64,
    })
}
