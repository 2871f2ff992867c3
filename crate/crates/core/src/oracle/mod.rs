//! Centralized reference computations. Everything the distributed and
//! streaming algorithms claim is checked against these.

mod canonical;
mod dijkstra;
mod limited;
mod skeleton;

pub use canonical::{
    canonical_paths_oracle, canonical_paths_oracle_capped, event_a_holds, CanonicalPathCollection, DEFAULT_ORACLE_CAP,
};
pub use dijkstra::{bellman_ford, bellman_ford_directed, dijkstra, dijkstra_directed, limited_distances};
pub use limited::{compare_at, limited_bf_oracle, OriginHistory};
pub use skeleton::{build_skeleton_oracle, SkeletonEdge, SkeletonGraph};

pub(crate) use limited::run_all;

pub use crate::graph::hop_diameter;
