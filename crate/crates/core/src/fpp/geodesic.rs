use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{LatticeBox, WeightField};
use crate::averaging::{AveragingMap, ClassOrder};
use crate::error::{domain, Error, Result};

/// Two path times closer than this fraction of the passage time count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

const UNSET: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicResult {
    pub source: usize,
    pub target: usize,
    /// `d_x(source, target)`.
    pub time: f64,
    /// Vertex indices from source to target.
    pub path: Vec<usize>,
    /// Edge indices along the path, in path order.
    pub edges: Vec<usize>,
    /// No other path is within the tie tolerance of `time`.
    pub unique: bool,
}

impl GeodesicResult {
    /// Number of edges `|gamma|`.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains_edge(&self, e: usize) -> bool {
        self.edges.contains(&e)
    }

    /// Membership bitset over all edges of the box.
    pub fn edge_set(&self, num_edges: usize) -> Vec<bool> {
        let mut set = vec![false; num_edges];
        for &e in &self.edges {
            set[e] = true;
        }
        set
    }
}

/// Reusable Dijkstra state.
#[derive(Debug, Default)]
pub struct Solver {
    dist: Vec<f64>,
    pred: Vec<u32>,
    pred_edge: Vec<u32>,
    order: Vec<u32>,
    mark: Vec<u8>,
    touched: Vec<u32>,
    heap: BinaryHeap<Reverse<(u64, u32)>>,
}

impl Solver {
    pub fn new() -> Self {
        Self::default()
    }

    fn prepare(&mut self, nv: usize) {
        if self.dist.len() < nv {
            self.dist = vec![f64::INFINITY; nv];
            self.pred = vec![UNSET; nv];
            self.pred_edge = vec![UNSET; nv];
            self.order = vec![UNSET; nv];
            self.mark = vec![0; nv];
            self.touched.clear();
        } else {
            for &v in &self.touched {
                let v = v as usize;
                self.dist[v] = f64::INFINITY;
                self.pred[v] = UNSET;
                self.pred_edge[v] = UNSET;
                self.order[v] = UNSET;
                self.mark[v] = 0;
            }
            self.touched.clear();
        }
        self.heap.clear();
    }

    // Dijkstra from s, settling every vertex up to d(s, t) (1 + tie tolerance).
    // Heap ties are broken by vertex index, equal tentative distances by the smaller predecessor.
    fn run(&mut self, lattice: &LatticeBox, weights: &[f64], s: usize, t: usize) -> Result<f64> {
        self.prepare(lattice.num_vertices());
        self.dist[s] = 0.0;
        self.touched.push(s as u32);
        self.heap.push(Reverse((0f64.to_bits(), s as u32)));
        let mut settled = 0u32;
        let mut limit = f64::INFINITY;
        let mut time = f64::NAN;
        while let Some(Reverse((bits, u))) = self.heap.pop() {
            let u = u as usize;
            let du = f64::from_bits(bits);
            if self.order[u] != UNSET || du > self.dist[u] {
                continue;
            }
            if du > limit {
                break;
            }
            self.order[u] = settled;
            settled += 1;
            if u == t {
                time = du;
                limit = du + TIE_TOLERANCE * du;
            }
            for &(v, e) in lattice.neighbors(u) {
                let v = v as usize;
                if self.order[v] != UNSET {
                    continue;
                }
                let nd = du + weights[e as usize];
                let old = self.dist[v];
                if nd < old || (nd == old && (u as u32) < self.pred[v]) {
                    if old == f64::INFINITY {
                        self.touched.push(v as u32);
                    }
                    self.dist[v] = nd;
                    self.pred[v] = u as u32;
                    self.pred_edge[v] = e;
                    if nd < old {
                        self.heap.push(Reverse((nd.to_bits(), v as u32)));
                    }
                }
            }
        }
        if time.is_nan() {
            return Err(Error::Numeric("target unreachable".into()));
        }
        Ok(time)
    }

    // Number of tight paths from s to t, saturated at 2.
    fn count_geodesics(&mut self, lattice: &LatticeBox, weights: &[f64], s: usize, t: usize, time: f64) -> u8 {
        let tol = TIE_TOLERANCE * time;
        let mut members = vec![t];
        self.mark[t] = 1;
        let mut i = 0;
        while i < members.len() {
            let v = members[i];
            i += 1;
            for &(u, e) in lattice.neighbors(v) {
                let u = u as usize;
                if self.tight(u, v, weights[e as usize], tol) && self.mark[u] == 0 {
                    self.mark[u] = 1;
                    members.push(u);
                }
            }
        }
        members.sort_by_key(|&v| self.order[v]);
        // mark now holds 1 + path count (saturated)
        for &v in &members {
            let c = if v == s {
                1
            } else {
                lattice
                    .neighbors(v)
                    .iter()
                    .filter(|&&(u, e)| self.tight(u as usize, v, weights[e as usize], tol))
                    .map(|&(u, _)| self.mark[u as usize].saturating_sub(1))
                    .fold(0u8, |a, b| a.saturating_add(b).min(2))
            };
            self.mark[v] = 1 + c;
        }
        self.mark[t] - 1
    }

    #[inline]
    fn tight(&self, u: usize, v: usize, w: f64, tol: f64) -> bool {
        self.order[u] != UNSET && self.order[u] < self.order[v] && (self.dist[u] + w - self.dist[v]).abs() <= tol
    }

    /// Passage time, geodesic and uniqueness flag between vertex indices `s` and `t`.
    pub fn solve_weights(
        &mut self,
        lattice: &LatticeBox,
        weights: &[f64],
        s: usize,
        t: usize,
    ) -> Result<GeodesicResult> {
        let time = self.run(lattice, weights, s, t)?;
        let mut path = vec![t];
        let mut edges = Vec::new();
        let mut v = t;
        while v != s {
            edges.push(self.pred_edge[v] as usize);
            v = self.pred[v] as usize;
            path.push(v);
        }
        path.reverse();
        edges.reverse();
        let unique = self.count_geodesics(lattice, weights, s, t, time) == 1;
        Ok(GeodesicResult {
            source: s,
            target: t,
            time,
            path,
            edges,
            unique,
        })
    }

    /// Passage time only.
    pub fn time_weights(&mut self, lattice: &LatticeBox, weights: &[f64], s: usize, t: usize) -> Result<f64> {
        self.run(lattice, weights, s, t)
    }

    pub fn solve(&mut self, w: &WeightField, s: usize, t: usize) -> Result<GeodesicResult> {
        self.solve_weights(w.lattice(), w.weights(), s, t)
    }

    /// Solve between coordinates.
    pub fn solve_coords(&mut self, w: &WeightField, u: &[i64], v: &[i64]) -> Result<GeodesicResult> {
        let (s, t) = endpoints(w.lattice(), u, v)?;
        self.solve(w, s, t)
    }
}

fn endpoints(lattice: &LatticeBox, u: &[i64], v: &[i64]) -> Result<(usize, usize)> {
    let s = lattice
        .vertex_index(u)
        .ok_or_else(|| Error::Domain(format!("vertex {u:?} outside the box")))?;
    let t = lattice
        .vertex_index(v)
        .ok_or_else(|| Error::Domain(format!("vertex {v:?} outside the box")))?;
    Ok((s, t))
}

/// `d_x(u, v)` with an optimal path.
pub fn passage_time(w: &WeightField, u: &[i64], v: &[i64]) -> Result<GeodesicResult> {
    Solver::new().solve_coords(w, u, v)
}

/// `f~ = d_x(z(a), v + z(a))` with the offset `z(a)` built from the bit matrix `a`.
pub fn randomized_passage_time(w: &WeightField, a: &[Vec<bool>], v: &[i64], m: usize) -> Result<GeodesicResult> {
    let map = AveragingMap::new(m, ClassOrder::default())?;
    randomized_passage_time_with(&mut Solver::new(), w, &map, a, v)
}

pub fn randomized_passage_time_with(
    solver: &mut Solver,
    w: &WeightField,
    map: &AveragingMap,
    a: &[Vec<bool>],
    v: &[i64],
) -> Result<GeodesicResult> {
    let d = w.lattice().dim();
    if a.len() != d || v.len() != d {
        return domain(format!("offset matrix and target need {d} rows/coordinates"));
    }
    let z: Vec<i64> = map.offset(a)?.into_iter().map(|c| c as i64).collect();
    let target: Vec<i64> = v.iter().zip(&z).map(|(a, b)| a + b).collect();
    if !w.lattice().contains(&z) || !w.lattice().contains(&target) {
        return domain(format!(
            "offset {z:?} pushes the endpoints outside the box; enlarge it for m = {}",
            map.m()
        ));
    }
    solver.solve_coords(w, &z, &target)
}

/// Largest box (vertex count) accepted by [`brute_force_passage_time`].
pub const BRUTE_FORCE_MAX_VERTICES: usize = 16;

/// Minimum over all self-avoiding paths of the left-to-right sum of weights,
/// by exhaustive enumeration. Also returns the number of optimal paths.
pub fn brute_force_passage_time(lattice: &LatticeBox, weights: &[f64], s: usize, t: usize) -> Result<(f64, usize)> {
    if lattice.num_vertices() > BRUTE_FORCE_MAX_VERTICES {
        return Err(Error::ResourceGuard(format!(
            "path enumeration limited to {BRUTE_FORCE_MAX_VERTICES} vertices"
        )));
    }
    fn walk(
        lattice: &LatticeBox,
        weights: &[f64],
        v: usize,
        t: usize,
        acc: f64,
        visited: &mut Vec<bool>,
        best: &mut (f64, usize),
    ) {
        if v == t {
            if acc < best.0 {
                *best = (acc, 1);
            } else if acc == best.0 {
                best.1 += 1;
            }
            return;
        }
        for &(u, e) in lattice.neighbors(v) {
            let u = u as usize;
            if !visited[u] {
                visited[u] = true;
                walk(lattice, weights, u, t, acc + weights[e as usize], visited, best);
                visited[u] = false;
            }
        }
    }
    let mut visited = vec![false; lattice.num_vertices()];
    visited[s] = true;
    let mut best = (f64::INFINITY, 0);
    walk(lattice, weights, s, t, 0.0, &mut visited, &mut best);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use proptest::prelude::*;

    use super::*;
    use crate::distributions::Distribution;

    fn field(lo: &[i64], hi: &[i64], seed: u64, replica: u64) -> WeightField {
        let b = Arc::new(LatticeBox::new(lo, hi).unwrap());
        WeightField::sample(b, &Distribution::exponential(1.0).unwrap(), seed, replica)
    }

    fn path_sum(w: &WeightField, r: &GeodesicResult) -> f64 {
        r.edges.iter().map(|&e| w.weight(e)).sum()
    }

    #[test]
    fn unit_weights_give_l1_distance() {
        let b = Arc::new(LatticeBox::new(&[0, 0], &[6, 6]).unwrap());
        let w = WeightField::constant(b, 1.0).unwrap();
        let r = passage_time(&w, &[1, 2], &[5, 6]).unwrap();
        assert_eq!(r.time, 8.0);
        assert_eq!(r.len(), 8);
        assert!(!r.unique);
        let straight = passage_time(&w, &[0, 0], &[6, 0]).unwrap();
        assert!(straight.unique);
    }

    #[test]
    fn scaling_weights_scales_time() {
        let w = field(&[0, 0], &[8, 8], 2, 0);
        let r = passage_time(&w, &[0, 0], &[8, 5]).unwrap();
        let r2 = passage_time(&w.scaled(4.0), &[0, 0], &[8, 5]).unwrap();
        assert_eq!(r2.time, 4.0 * r.time);
    }

    #[test]
    fn result_is_consistent() {
        let w = field(&[-3, -3, -3], &[3, 3, 3], 5, 1);
        let r = passage_time(&w, &[-2, 0, 1], &[2, 1, -1]).unwrap();
        assert_eq!(r.path.first(), Some(&r.source));
        assert_eq!(r.path.last(), Some(&r.target));
        assert_eq!(r.path.len(), r.edges.len() + 1);
        assert!(((path_sum(&w, &r) - r.time) / r.time).abs() < 1e-9);
        for (k, &e) in r.edges.iter().enumerate() {
            let (a, b) = w.lattice().edge_endpoints(e);
            assert!((a, b) == (r.path[k], r.path[k + 1]) || (b, a) == (r.path[k], r.path[k + 1]));
        }
        assert!(r.unique);
    }

    #[test]
    fn outside_box_is_a_domain_error() {
        let w = field(&[0, 0], &[3, 3], 1, 0);
        assert!(matches!(passage_time(&w, &[0, 0], &[4, 0]), Err(Error::Domain(_))));
    }

    #[test]
    fn agrees_with_enumeration_on_small_boxes() {
        for (lo, hi) in [
            (vec![0, 0], vec![1, 1]),
            (vec![0, 0], vec![2, 1]),
            (vec![0, 0], vec![2, 2]),
            (vec![0, 0, 0], vec![1, 1, 1]),
        ] {
            for rep in 0..100 {
                let w = field(&lo, &hi, 77, rep);
                let nv = w.lattice().num_vertices();
                let mut solver = Solver::new();
                for (s, t) in [(0, nv - 1), (1, nv - 2)] {
                    let r = solver.solve(&w, s, t).unwrap();
                    let (best, count) = brute_force_passage_time(w.lattice(), w.weights(), s, t).unwrap();
                    assert_eq!(r.time, best);
                    assert_eq!(r.unique, count == 1);
                }
            }
        }
    }

    #[test]
    fn ties_are_detected() {
        // Two equal routes around a unit square.
        let b = Arc::new(LatticeBox::new(&[0, 0], &[1, 1]).unwrap());
        let w =
            WeightField::from_weights(b, vec![1.0, 2.0, 1.0, 2.0], Distribution::exponential(1.0).unwrap()).unwrap();
        let r = passage_time(&w, &[0, 0], &[1, 1]).unwrap();
        assert_eq!(r.time, 3.0);
        assert!(!r.unique);
    }

    #[test]
    fn zero_offset_gives_plain_passage_time() {
        let w = field(&[-2, -2], &[12, 8], 4, 0);
        let a = vec![vec![false; 4]; 2];
        let r = randomized_passage_time(&w, &a, &[8, 3], 2).unwrap();
        assert_eq!(r.time, passage_time(&w, &[0, 0], &[8, 3]).unwrap().time);
        let b = Arc::new(LatticeBox::new(&[0, 0], &[12, 12]).unwrap());
        let unit = WeightField::constant(b, 1.0).unwrap();
        let ones = vec![vec![true; 4]; 2];
        assert_eq!(randomized_passage_time(&unit, &ones, &[8, 3], 2).unwrap().time, 11.0);
        let small = field(&[0, 0], &[8, 3], 4, 0);
        assert!(matches!(
            randomized_passage_time(&small, &ones, &[8, 3], 2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn brute_force_guard() {
        let b = LatticeBox::new(&[0, 0], &[4, 4]).unwrap();
        let w = vec![1.0; b.num_edges()];
        assert!(matches!(
            brute_force_passage_time(&b, &w, 0, 1),
            Err(Error::ResourceGuard(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn metric_axioms(rep in 0u64..1000, a in 0usize..49, b in 0usize..49, c in 0usize..49) {
            let w = field(&[0, 0], &[6, 6], 31, rep);
            let mut s = Solver::new();
            let d = |s: &mut Solver, x, y| s.solve(&w, x, y).unwrap().time;
            prop_assert_eq!(d(&mut s, a, a), 0.0);
            let ab = d(&mut s, a, b);
            prop_assert!((ab - d(&mut s, b, a)).abs() <= 1e-12 * ab.max(1.0));
            prop_assert!(ab <= (d(&mut s, a, c) + d(&mut s, c, b)) * (1.0 + 1e-12));
        }

        #[test]
        fn raising_a_weight_never_lowers_time(rep in 0u64..1000, e in 0usize..84, bump in 0.0f64..3.0) {
            let w = field(&[0, 0], &[6, 6], 8, rep);
            let before = passage_time(&w, &[0, 0], &[6, 4]).unwrap().time;
            let mut up = w.clone();
            up.set_weight(e, w.weight(e) + bump);
            prop_assert!(passage_time(&up, &[0, 0], &[6, 4]).unwrap().time >= before);
        }
    }
}
