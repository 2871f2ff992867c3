use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distance::VertexId;

/// The sampled virtual vertices `V'`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VirtualSet {
    /// Sorted.
    pub members: Vec<VertexId>,
    pub q: f64,
    /// Always included (the sources). Sorted.
    pub forced: Vec<VertexId>,
}

impl VirtualSet {
    /// An explicit set, bypassing sampling. `q` is taken as `|members| / n`.
    pub fn explicit(n: usize, members: &[VertexId]) -> Self {
        let mut m = members.to_vec();
        m.sort_unstable();
        m.dedup();
        VirtualSet { q: m.len() as f64 / n.max(1) as f64, forced: m.clone(), members: m }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// Membership bitmap over `0..n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in &self.members {
            m[v] = true;
        }
        m
    }
}

/// Includes each vertex independently with probability `q`, plus `forced`.
/// A coin is drawn for every vertex, forced or not, so the sample of the
/// other vertices does not depend on which ones are forced.
pub fn sample_virtual(n: usize, q: f64, seed: u64, forced: &[VertexId]) -> VirtualSet {
    assert!((0.0..=1.0).contains(&q), "q = {q} is not a probability");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut is_forced = vec![false; n];
    for &f in forced {
        is_forced[f] = true;
    }
    let members = (0..n).filter(|&v| rng.gen_bool(q) | is_forced[v]).collect();
    let mut forced = forced.to_vec();
    forced.sort_unstable();
    forced.dedup();
    VirtualSet { members, q, forced }
}
