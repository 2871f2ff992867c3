//! The collection of tie-broken i-limited shortest paths that Bellman-Ford
//! from every vertex would produce, and the sampling event checked against it.

use crate::distance::VertexId;
use crate::error::OracleScaleError;
use crate::graph::UndirectedGraph;
use crate::oracle::limited::OriginHistory;

/// Default size guard for the all-origins oracles.
pub const DEFAULT_ORACLE_CAP: usize = 256;

/// `P^(i)(x, v)` for every origin `x`, holder `v` and level `i` in `[1, n-1]`.
#[derive(Clone, Debug)]
pub struct CanonicalPathCollection {
    n: usize,
    runs: Vec<OriginHistory>,
}

impl CanonicalPathCollection {
    pub fn n(&self) -> usize {
        self.n
    }

    /// The best `i`-limited path between `origin` and `holder` as Bellman-Ford
    /// from `origin` computes it, listed from `holder` to `origin`.
    pub fn path(&self, origin: VertexId, holder: VertexId, i: usize) -> Option<Vec<VertexId>> {
        self.runs[origin].path_at(holder, i)
    }

    pub fn history(&self, origin: VertexId) -> &OriginHistory {
        &self.runs[origin]
    }

    /// Every distinct path in the collection, listed from holder to origin.
    pub fn distinct_paths(&self) -> impl Iterator<Item = Vec<VertexId>> + '_ {
        self.runs.iter().flat_map(move |run| {
            (0..self.n)
                .flat_map(move |v| run.distinct_at(v).map(move |(level, _)| run.path_at(v, level).expect("recorded")))
        })
    }
}

pub fn canonical_paths_oracle(g: &UndirectedGraph) -> Result<CanonicalPathCollection, OracleScaleError> {
    canonical_paths_oracle_capped(g, DEFAULT_ORACLE_CAP)
}

pub fn canonical_paths_oracle_capped(
    g: &UndirectedGraph,
    cap: usize,
) -> Result<CanonicalPathCollection, OracleScaleError> {
    if g.n() > cap {
        return Err(OracleScaleError { what: "canonical path collection", n: g.n(), cap });
    }
    let levels = g.n().saturating_sub(1);
    let runs = (0..g.n()).map(|x| OriginHistory::run(g, x, levels)).collect();
    Ok(CanonicalPathCollection { n: g.n(), runs })
}

/// True iff every collection path with more than `h` edges has an internal
/// vertex in `virtuals`. Under this event consecutive virtuals on any
/// collection path are at most `h` edges apart, which is what the skeleton
/// hop limit requires.
pub fn event_a_holds(coll: &CanonicalPathCollection, virtuals: &[VertexId], h: usize) -> bool {
    let mut is_virtual = vec![false; coll.n()];
    for &v in virtuals {
        is_virtual[v] = true;
    }
    coll.runs.iter().all(|run| {
        (0..coll.n()).all(|v| {
            run.distinct_at(v).all(|(level, len)| {
                if (len.hops as usize) <= h {
                    return true;
                }
                let p = run.path_at(v, level).expect("recorded");
                p[1..p.len() - 1].iter().any(|&x| is_virtual[x])
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::path_graph;

    #[test]
    fn p5_event() {
        let coll = canonical_paths_oracle(&path_graph(5, 1)).unwrap();
        assert!(!event_a_holds(&coll, &[0, 4], 2));
        assert!(event_a_holds(&coll, &[0, 2, 4], 2));
        assert!(event_a_holds(&coll, &[0, 4], 4));
    }

    #[test]
    fn size_guard() {
        let g = path_graph(10, 1);
        assert!(canonical_paths_oracle_capped(&g, 9).is_err());
        assert!(canonical_paths_oracle_capped(&g, 10).is_ok());
    }

    #[test]
    fn p5_paths() {
        let coll = canonical_paths_oracle(&path_graph(5, 1)).unwrap();
        assert_eq!(coll.path(0, 4, 4), Some(vec![4, 3, 2, 1, 0]));
        assert_eq!(coll.path(0, 4, 3), None);
        assert_eq!(coll.distinct_paths().count(), 20);
    }
}
