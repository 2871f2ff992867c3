//! Bellman-Ford records and per-vertex k-nearest sets.

use serde::{Deserialize, Serialize};

use crate::distance::{Distance, PathLen, VertexId};

/// One Bellman-Ford record held at some vertex `v`: the best known path from
/// `v` to `origin`, its length and hop count, and `v`'s first hop on it
/// (`v` itself when `v == origin`). This is the unit of bandwidth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DistTuple {
    pub origin: VertexId,
    pub dist: Distance,
    pub hops: u32,
    pub pred: VertexId,
}

impl DistTuple {
    pub fn len(&self) -> PathLen {
        PathLen::new(self.dist, self.hops)
    }

    /// The zero-hop record a vertex holds for itself.
    pub fn own(v: VertexId) -> Self {
        DistTuple { origin: v, dist: Distance::ZERO, hops: 0, pred: v }
    }
}

/// Up to `k` records with distinct origins, sorted by the tie-break order of
/// the holding vertex: distance, then hop count, then the vertex-id sequence
/// of the path read from the holder outward.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KNearestSet {
    pub entries: Vec<DistTuple>,
}

impl KNearestSet {
    pub fn new(entries: Vec<DistTuple>) -> Self {
        KNearestSet { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, origin: VertexId) -> Option<&DistTuple> {
        self.entries.iter().find(|t| t.origin == origin)
    }

    pub fn origins(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.entries.iter().map(|t| t.origin)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, DistTuple> {
        self.entries.iter()
    }
}

impl<'a> IntoIterator for &'a KNearestSet {
    type Item = &'a DistTuple;
    type IntoIter = std::slice::Iter<'a, DistTuple>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}
