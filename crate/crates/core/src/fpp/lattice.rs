use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Coordinate offset used when packing global edge keys (20 bits per axis).
const KEY_OFFSET: i64 = 1 << 19;

/// A finite box of `Z^d` (`d` = 2 or 3) with nearest-neighbour edges.
///
/// Vertices are numbered lexicographically with the first coordinate most
/// significant; edges are numbered lexicographically by (lower endpoint, axis).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "BoxSpec", try_from = "BoxSpec")]
pub struct LatticeBox {
    d: usize,
    lo: Vec<i64>,
    hi: Vec<i64>,
    side: Vec<usize>,
    stride: Vec<usize>,
    first_edge: Vec<u32>,
    axes: Vec<u8>,
    num_edges: usize,
    // CSR adjacency: (neighbour, edge) pairs
    adj_start: Vec<u32>,
    adj: Vec<(u32, u32)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoxSpec {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl From<LatticeBox> for BoxSpec {
    fn from(b: LatticeBox) -> Self {
        BoxSpec { lo: b.lo, hi: b.hi }
    }
}

impl TryFrom<BoxSpec> for LatticeBox {
    type Error = crate::Error;
    fn try_from(s: BoxSpec) -> Result<Self> {
        LatticeBox::new(&s.lo, &s.hi)
    }
}

impl LatticeBox {
    /// The box `[lo, hi]` (inclusive corners).
    pub fn new(lo: &[i64], hi: &[i64]) -> Result<Self> {
        let d = lo.len();
        if !(d == 2 || d == 3) || hi.len() != d {
            return domain(format!(
                "lattice box needs d = 2 or 3 matching corners, got {lo:?}, {hi:?}"
            ));
        }
        if lo.iter().zip(hi).any(|(a, b)| a > b) {
            return domain(format!("box corners out of order: {lo:?} > {hi:?}"));
        }
        if lo.iter().chain(hi).any(|c| c.abs() >= KEY_OFFSET) {
            return domain("box coordinates must stay below 2^19 in absolute value");
        }
        let side: Vec<usize> = lo.iter().zip(hi).map(|(a, b)| (b - a + 1) as usize).collect();
        let nv: usize = side.iter().product();
        if nv > u32::MAX as usize / 4 {
            return domain(format!("box with {nv} vertices is too large"));
        }
        let mut stride = vec![1usize; d];
        for k in (0..d - 1).rev() {
            stride[k] = stride[k + 1] * side[k + 1];
        }
        let mut first_edge = Vec::with_capacity(nv);
        let mut axes = Vec::with_capacity(nv);
        let mut count = 0u32;
        for v in 0..nv {
            first_edge.push(count);
            let mut mask = 0u8;
            for k in 0..d {
                if (v / stride[k]) % side[k] + 1 < side[k] {
                    mask |= 1 << k;
                    count += 1;
                }
            }
            axes.push(mask);
        }
        let mut b = Self {
            d,
            lo: lo.to_vec(),
            hi: hi.to_vec(),
            side,
            stride,
            first_edge,
            axes,
            num_edges: count as usize,
            adj_start: Vec::new(),
            adj: Vec::new(),
        };
        let mut adj_start = Vec::with_capacity(nv + 1);
        let mut adj = Vec::with_capacity(2 * b.num_edges);
        for v in 0..nv {
            adj_start.push(adj.len() as u32);
            for k in 0..d {
                let c = (v / b.stride[k]) % b.side[k];
                if c > 0 {
                    let u = v - b.stride[k];
                    adj.push((u as u32, b.edge_from(u, k) as u32));
                }
                if c + 1 < b.side[k] {
                    adj.push(((v + b.stride[k]) as u32, b.edge_from(v, k) as u32));
                }
            }
        }
        adj_start.push(adj.len() as u32);
        b.adj_start = adj_start;
        b.adj = adj;
        Ok(b)
    }

    /// Smallest box containing `0` and `v`, widened by `margin` on every side.
    pub fn around_segment(v: &[i64], margin: i64) -> Result<Self> {
        if margin < 0 {
            return domain("margin must be nonnegative");
        }
        let lo: Vec<i64> = v.iter().map(|&c| c.min(0) - margin).collect();
        let hi: Vec<i64> = v.iter().map(|&c| c.max(0) + margin).collect();
        Self::new(&lo, &hi)
    }

    pub fn dim(&self) -> usize {
        self.d
    }
    pub fn lo(&self) -> &[i64] {
        &self.lo
    }
    pub fn hi(&self) -> &[i64] {
        &self.hi
    }
    pub fn num_vertices(&self) -> usize {
        self.first_edge.len()
    }
    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.d && x.iter().enumerate().all(|(k, &c)| c >= self.lo[k] && c <= self.hi[k])
    }

    pub fn vertex_index(&self, x: &[i64]) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        Some(
            x.iter()
                .enumerate()
                .map(|(k, &c)| (c - self.lo[k]) as usize * self.stride[k])
                .sum(),
        )
    }

    pub fn vertex_coords(&self, v: usize) -> Vec<i64> {
        (0..self.d)
            .map(|k| self.lo[k] + ((v / self.stride[k]) % self.side[k]) as i64)
            .collect()
    }

    // Index of the edge (v, v + e_k); the caller guarantees it exists.
    fn edge_from(&self, v: usize, k: usize) -> usize {
        let below = self.axes[v] & ((1u8 << k) - 1);
        self.first_edge[v] as usize + below.count_ones() as usize
    }

    /// Edge from vertex `v` in the positive direction of `axis`, if inside the box.
    pub fn edge_index(&self, v: usize, axis: usize) -> Option<usize> {
        if v >= self.num_vertices() || axis >= self.d || self.axes[v] & (1 << axis) == 0 {
            return None;
        }
        Some(self.edge_from(v, axis))
    }

    /// Edge `x -> x + e_axis` by coordinates.
    pub fn edge_at(&self, x: &[i64], axis: usize) -> Option<usize> {
        self.edge_index(self.vertex_index(x)?, axis)
    }

    /// `(lower endpoint, axis)` of edge `e`.
    pub fn edge_endpoint_axis(&self, e: usize) -> (usize, usize) {
        assert!(e < self.num_edges, "edge {e} out of range");
        let v = self.first_edge.partition_point(|&f| f as usize <= e) - 1;
        let mut left = e - self.first_edge[v] as usize;
        for k in 0..self.d {
            if self.axes[v] & (1 << k) != 0 {
                if left == 0 {
                    return (v, k);
                }
                left -= 1;
            }
        }
        unreachable!("edge numbering is consistent")
    }

    pub fn edge_endpoints(&self, e: usize) -> (usize, usize) {
        let (v, k) = self.edge_endpoint_axis(e);
        (v, v + self.stride[k])
    }

    /// Packs the global coordinates of an edge into a key independent of the box.
    pub fn global_edge_key(&self, e: usize) -> u64 {
        let (v, k) = self.edge_endpoint_axis(e);
        let x = self.vertex_coords(v);
        let mut key = 0u64;
        for c in 0..3 {
            let coord = x.get(c).copied().unwrap_or(0);
            key = (key << 20) | (coord + KEY_OFFSET) as u64;
        }
        (key << 2) | k as u64
    }

    /// Global keys of all edges, in edge-index order.
    pub fn global_edge_keys(&self) -> Vec<u64> {
        let mut keys = Vec::with_capacity(self.num_edges);
        for v in 0..self.num_vertices() {
            let x = self.vertex_coords(v);
            let mut base = 0u64;
            for c in 0..3 {
                base = (base << 20) | (x.get(c).copied().unwrap_or(0) + KEY_OFFSET) as u64;
            }
            for k in 0..self.d {
                if self.axes[v] & (1 << k) != 0 {
                    keys.push((base << 2) | k as u64);
                }
            }
        }
        keys
    }

    /// `(neighbour, edge)` pairs of vertex `v`.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[(u32, u32)] {
        &self.adj[self.adj_start[v] as usize..self.adj_start[v + 1] as usize]
    }

    /// Graph distance `|x - y|_1` between two vertices.
    pub fn l1_distance(&self, a: usize, b: usize) -> i64 {
        let (x, y) = (self.vertex_coords(a), self.vertex_coords(b));
        x.iter().zip(&y).map(|(p, q)| (p - q).abs()).sum()
    }

    /// Midpoint of edge `e` (coordinates doubled to stay integral).
    pub fn edge_midpoint2(&self, e: usize) -> Vec<i64> {
        let (v, k) = self.edge_endpoint_axis(e);
        let mut x: Vec<i64> = self.vertex_coords(v).iter().map(|c| 2 * c).collect();
        x[k] += 1;
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let b = LatticeBox::new(&[0, 0], &[2, 2]).unwrap();
        assert_eq!(b.num_vertices(), 9);
        assert_eq!(b.num_edges(), 12);
        let c = LatticeBox::new(&[0, 0, 0], &[1, 1, 1]).unwrap();
        assert_eq!(c.num_edges(), 12);
        let r = LatticeBox::new(&[-3, 1], &[4, 2]).unwrap();
        assert_eq!(r.num_edges(), 7 * 2 + 8);
    }

    #[test]
    fn edge_order_is_vertex_then_axis() {
        let b = LatticeBox::new(&[0, 0], &[1, 1]).unwrap();
        // vertices: (0,0)=0 (0,1)=1 (1,0)=2 (1,1)=3
        assert_eq!(b.edge_at(&[0, 0], 0), Some(0));
        assert_eq!(b.edge_at(&[0, 0], 1), Some(1));
        assert_eq!(b.edge_at(&[0, 1], 0), Some(2));
        assert_eq!(b.edge_at(&[1, 0], 1), Some(3));
        assert_eq!(b.edge_at(&[1, 1], 0), None);
    }

    #[test]
    fn edge_index_round_trip() {
        for b in [
            LatticeBox::new(&[-2, 3], &[4, 7]).unwrap(),
            LatticeBox::new(&[0, -1, 2], &[2, 1, 4]).unwrap(),
        ] {
            for e in 0..b.num_edges() {
                let (v, k) = b.edge_endpoint_axis(e);
                assert_eq!(b.edge_index(v, k), Some(e));
                let (a, c) = b.edge_endpoints(e);
                assert!(b.contains(&b.vertex_coords(a)) && b.contains(&b.vertex_coords(c)));
                assert_eq!(b.l1_distance(a, c), 1);
            }
            for v in 0..b.num_vertices() {
                assert_eq!(b.vertex_index(&b.vertex_coords(v)), Some(v));
                for &(u, e) in b.neighbors(v) {
                    let (x, y) = b.edge_endpoints(e as usize);
                    assert!((x, y) == (v, u as usize) || (x, y) == (u as usize, v));
                }
            }
            let keys = b.global_edge_keys();
            for e in 0..b.num_edges() {
                assert_eq!(keys[e], b.global_edge_key(e));
            }
        }
    }

    #[test]
    fn global_keys_agree_between_nested_boxes() {
        let small = LatticeBox::new(&[0, 0], &[3, 3]).unwrap();
        let big = LatticeBox::new(&[-5, -2], &[9, 8]).unwrap();
        for e in 0..small.num_edges() {
            let (v, k) = small.edge_endpoint_axis(e);
            let x = small.vertex_coords(v);
            let f = big.edge_at(&x, k).unwrap();
            assert_eq!(small.global_edge_key(e), big.global_edge_key(f));
        }
    }

    #[test]
    fn rejects_bad_boxes() {
        assert!(LatticeBox::new(&[0], &[1]).is_err());
        assert!(LatticeBox::new(&[0, 0], &[1]).is_err());
        assert!(LatticeBox::new(&[2, 0], &[1, 1]).is_err());
        assert!(LatticeBox::new(&[0, 0, 0, 0], &[1, 1, 1, 1]).is_err());
    }
}
