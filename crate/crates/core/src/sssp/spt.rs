use crate::distance::{Distance, VertexId, Weight};
use crate::error::SptError;

/// Checks that `parent` is a shortest-path tree for `dist` rooted at `root`:
/// every parent edge exists (`weight(parent, child)`), every finite non-root
/// vertex has a parent, the pointers are acyclic, and walking the tree from
/// the root reproduces `dist` exactly.
pub fn check_spt(
    root: VertexId,
    dist: &[Distance],
    parent: &[Option<VertexId>],
    weight: impl Fn(VertexId, VertexId) -> Option<Weight>,
) -> Result<(), SptError> {
    let n = dist.len();
    if parent[root].is_some() {
        return Err(SptError::Cycle(root));
    }
    for v in 0..n {
        match parent[v] {
            Some(p) if weight(p, v).is_none() => return Err(SptError::NotAnEdge(p, v)),
            None if v != root && dist[v].is_finite() => return Err(SptError::MissingParent(v)),
            _ => {}
        }
    }
    // 0 unvisited, 1 on the current walk, 2 finished with tree distance known.
    let mut state = vec![0u8; n];
    let mut tree = vec![Distance::INFINITY; n];
    state[root] = 2;
    tree[root] = Distance::ZERO;
    let mut walk = Vec::new();
    for start in 0..n {
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            walk.push(v);
            match parent[v] {
                Some(p) => v = p,
                None => break,
            }
        }
        if state[v] == 1 && parent[v].is_some() {
            return Err(SptError::Cycle(v));
        }
        while let Some(u) = walk.pop() {
            tree[u] = match parent[u] {
                Some(p) => tree[p].add_weight(weight(p, u).unwrap()),
                None => Distance::INFINITY,
            };
            state[u] = 2;
        }
    }
    for v in 0..n {
        if dist[v].is_finite() && tree[v] != dist[v] {
            return Err(SptError::TreeDistance { v, tree: tree[v].to_string(), label: dist[v].to_string() });
        }
    }
    Ok(())
}

/// Number of parent edges.
pub fn tree_edges(parent: &[Option<VertexId>]) -> usize {
    parent.iter().filter(|p| p.is_some()).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::path_graph;

    fn d(xs: &[i64]) -> Vec<Distance> {
        xs.iter().map(|&x| Distance::new(x)).collect()
    }

    #[test]
    fn path_tree_passes() {
        let g = path_graph(4, 2);
        let parent = vec![None, Some(0), Some(1), Some(2)];
        assert!(check_spt(0, &d(&[0, 2, 4, 6]), &parent, |u, v| g.weight(u, v)).is_ok());
    }

    #[test]
    fn faults_are_named() {
        let g = path_graph(4, 2);
        let w = |u, v| g.weight(u, v);
        assert!(matches!(
            check_spt(0, &d(&[0, 2, 4, 6]), &[None, Some(0), Some(3), Some(2)], w),
            Err(SptError::Cycle(_))
        ));
        assert_eq!(
            check_spt(0, &d(&[0, 2, 4, 6]), &[None, Some(0), None, Some(2)], w),
            Err(SptError::MissingParent(2))
        );
        assert_eq!(
            check_spt(0, &d(&[0, 2, 4, 6]), &[None, Some(0), Some(0), Some(2)], w),
            Err(SptError::NotAnEdge(0, 2))
        );
        assert!(matches!(
            check_spt(0, &d(&[0, 2, 5, 7]), &[None, Some(0), Some(1), Some(2)], w),
            Err(SptError::TreeDistance { v: 2, .. })
        ));
    }
}
