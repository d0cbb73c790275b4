use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::LatticeBox;
use crate::distributions::Distribution;
use crate::error::{domain, Result};
use crate::rng::{open01, replica_seed, splitmix_at, Stream};

/// Where a sampled field came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub master_seed: u64,
    pub replica: u64,
    /// Seed of the weight stream derived from the two above.
    pub stream_seed: u64,
}

/// Passage times on the edges of a box.
///
/// Sampled weights are a function of the global edge coordinates, so two
/// boxes sampled with the same seed and replica agree on shared edges.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightField {
    lattice: Arc<LatticeBox>,
    weights: Vec<f64>,
    dist: Distribution,
    provenance: Option<Provenance>,
}

impl WeightField {
    /// Samples `x_e = Q(U_e)` with `U_e` the SplitMix64 output at the edge's global key.
    pub fn sample(lattice: Arc<LatticeBox>, dist: &Distribution, master_seed: u64, replica: u64) -> Self {
        let stream_seed = replica_seed(master_seed, replica, Stream::Weights);
        let weights = lattice
            .global_edge_keys()
            .into_iter()
            .map(|key| dist.inverse_transform(open01(splitmix_at(stream_seed, key))))
            .collect();
        Self {
            lattice,
            weights,
            dist: dist.clone(),
            provenance: Some(Provenance {
                master_seed,
                replica,
                stream_seed,
            }),
        }
    }

    /// The uniforms `U_e` that drive [`WeightField::sample`], in edge-index order.
    pub fn uniforms(lattice: &LatticeBox, master_seed: u64, replica: u64) -> Vec<f64> {
        let stream_seed = replica_seed(master_seed, replica, Stream::Weights);
        lattice
            .global_edge_keys()
            .into_iter()
            .map(|key| open01(splitmix_at(stream_seed, key)))
            .collect()
    }

    /// Wraps explicit weights; `dist` records the law they are meant to follow.
    pub fn from_weights(lattice: Arc<LatticeBox>, weights: Vec<f64>, dist: Distribution) -> Result<Self> {
        if weights.len() != lattice.num_edges() {
            return domain(format!("{} weights for {} edges", weights.len(), lattice.num_edges()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
            return domain(format!("edge weights must be nonnegative, found {w}"));
        }
        Ok(Self {
            lattice,
            weights,
            dist,
            provenance: None,
        })
    }

    /// Every edge set to `value`.
    pub fn constant(lattice: Arc<LatticeBox>, value: f64) -> Result<Self> {
        let dist = Distribution::constant(value)?;
        let n = lattice.num_edges();
        Self::from_weights(lattice, vec![value; n], dist)
    }

    pub fn lattice(&self) -> &LatticeBox {
        &self.lattice
    }
    pub fn lattice_arc(&self) -> &Arc<LatticeBox> {
        &self.lattice
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn distribution(&self) -> &Distribution {
        &self.dist
    }
    pub fn provenance(&self) -> Option<Provenance> {
        self.provenance
    }

    pub fn weight(&self, e: usize) -> f64 {
        self.weights[e]
    }

    /// Replaces one weight; `+inf` removes the edge. Provenance is dropped.
    pub fn set_weight(&mut self, e: usize, value: f64) {
        assert!(value >= 0.0, "edge weights must be nonnegative");
        self.weights[e] = value;
        self.provenance = None;
    }

    /// Multiplies every weight by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            weights: self.weights.iter().map(|w| w * c).collect(),
            provenance: None,
            ..self.clone()
        }
    }

    /// Writes `<stem>.bin` (little-endian f64 in edge order) and `<stem>.json`.
    pub fn export(&self, stem: &Path) -> Result<()> {
        let mut bin = std::io::BufWriter::new(std::fs::File::create(stem.with_extension("bin"))?);
        for w in &self.weights {
            bin.write_all(&w.to_le_bytes())?;
        }
        bin.flush()?;
        let sidecar = Sidecar {
            lo: self.lattice.lo().to_vec(),
            hi: self.lattice.hi().to_vec(),
            edges: self.weights.len(),
            edge_order: "lexicographic by (lower endpoint, axis); first coordinate most significant".into(),
            distribution: self.dist.to_string(),
            provenance: self.provenance,
        };
        std::fs::write(
            stem.with_extension("json"),
            serde_json::to_string_pretty(&sidecar)? + "\n",
        )?;
        Ok(())
    }

    /// Reads a field written by [`WeightField::export`].
    pub fn import(stem: &Path) -> Result<Self> {
        let sidecar: Sidecar = serde_json::from_str(&std::fs::read_to_string(stem.with_extension("json"))?)?;
        let bytes = std::fs::read(stem.with_extension("bin"))?;
        if bytes.len() != 8 * sidecar.edges {
            return domain(format!(
                "binary holds {} bytes, expected {}",
                bytes.len(),
                8 * sidecar.edges
            ));
        }
        let weights = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        let lattice = Arc::new(LatticeBox::new(&sidecar.lo, &sidecar.hi)?);
        let mut f = Self::from_weights(lattice, weights, sidecar.distribution.parse()?)?;
        f.provenance = sidecar.provenance;
        Ok(f)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    lo: Vec<i64>,
    hi: Vec<i64>,
    edges: usize,
    edge_order: String,
    distribution: String,
    provenance: Option<Provenance>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp1() -> Distribution {
        Distribution::exponential(1.0).unwrap()
    }

    #[test]
    fn sampling_is_reproducible() {
        let b = Arc::new(LatticeBox::new(&[0, 0], &[5, 5]).unwrap());
        let a = WeightField::sample(b.clone(), &exp1(), 9, 4);
        let c = WeightField::sample(b.clone(), &exp1(), 9, 4);
        assert!(a
            .weights()
            .iter()
            .zip(c.weights())
            .all(|(x, y)| x.to_bits() == y.to_bits()));
        let other = WeightField::sample(b, &exp1(), 9, 5);
        assert_ne!(a.weights(), other.weights());
    }

    #[test]
    fn nested_boxes_share_weights() {
        let small = Arc::new(LatticeBox::new(&[0, 0], &[4, 4]).unwrap());
        let big = Arc::new(LatticeBox::new(&[-3, -3], &[8, 6]).unwrap());
        let ws = WeightField::sample(small.clone(), &exp1(), 1, 0);
        let wb = WeightField::sample(big.clone(), &exp1(), 1, 0);
        for e in 0..small.num_edges() {
            let (v, k) = small.edge_endpoint_axis(e);
            let f = big.edge_at(&small.vertex_coords(v), k).unwrap();
            assert_eq!(ws.weight(e), wb.weight(f));
        }
    }

    #[test]
    fn export_import_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let b = Arc::new(LatticeBox::new(&[0, 0, 0], &[2, 3, 1]).unwrap());
        let w = WeightField::sample(b, &exp1(), 3, 2);
        let stem = dir.path().join("field");
        w.export(&stem).unwrap();
        let bytes = std::fs::read(stem.with_extension("bin")).unwrap();
        assert_eq!(bytes.len(), 8 * w.weights().len());
        assert_eq!(f64::from_le_bytes(bytes[..8].try_into().unwrap()), w.weight(0));
        assert_eq!(WeightField::import(&stem).unwrap(), w);
    }

    #[test]
    fn rejects_negative_weights() {
        let b = Arc::new(LatticeBox::new(&[0, 0], &[1, 1]).unwrap());
        assert!(WeightField::from_weights(b.clone(), vec![1.0, -1.0, 1.0, 1.0], exp1()).is_err());
        assert!(WeightField::from_weights(b, vec![1.0; 3], exp1()).is_err());
    }
}
