//! Enumeration of transversal cliques: complete subgraphs picking exactly one
//! vertex from every part.

use alloc::vec::Vec;
use core::fmt;

use crate::bitset::BitSet;
use crate::graph::{KPartiteGraph, VertexRef};

/// Default ceiling on how many cliques an enumeration may produce.
pub const DEFAULT_CLIQUE_CAP: usize = 5_000_000;

/// One vertex per part, pairwise adjacent, ordered by part.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Clique {
    verts: Vec<VertexRef>,
}

impl fmt::Debug for Clique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Clique{:?}", self.verts)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliqueError {
    /// More cliques than the configured cap.
    CapacityExceeded { cap: usize },
    /// The vertex list is not one-per-part in part order.
    NotTransversal,
    /// Two chosen vertices are not adjacent.
    MissingEdge { u: VertexRef, v: VertexRef },
}

impl fmt::Display for CliqueError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliqueError::CapacityExceeded { cap } => {
                write!(f, "clique enumeration exceeded cap of {}", cap)
            }
            CliqueError::NotTransversal => {
                write!(f, "clique must list exactly one vertex from each part, in part order")
            }
            CliqueError::MissingEdge { u, v } => {
                write!(f, "vertices {} and {} are not adjacent", u, v)
            }
        }
    }
}

impl Clique {
    /// Validates that `verts` is one vertex per part (in part order) and
    /// pairwise adjacent in `g`.
    pub fn new(g: &KPartiteGraph, verts: Vec<VertexRef>) -> Result<Self, CliqueError> {
        if verts.len() != g.k() || verts.iter().enumerate().any(|(i, v)| v.part != i + 1) {
            return Err(CliqueError::NotTransversal);
        }
        for (i, &u) in verts.iter().enumerate() {
            for &v in &verts[i + 1..] {
                if !g.has_edge(u, v) {
                    return Err(CliqueError::MissingEdge { u, v });
                }
            }
        }
        Ok(Clique { verts })
    }

    pub fn vertices(&self) -> &[VertexRef] {
        &self.verts
    }

    /// The clique's vertex in part `i` (1-based).
    pub fn vertex_in_part(&self, i: usize) -> VertexRef {
        self.verts[i - 1]
    }

    pub fn contains(&self, v: VertexRef) -> bool {
        self.verts[v.part - 1] == v
    }
}

/// All transversal cliques of `g` in lexicographic order of their index
/// tuples. Fails once more than `cap` cliques are found.
pub fn enumerate_transversal_cliques(
    g: &KPartiteGraph,
    cap: usize,
) -> Result<Vec<Clique>, CliqueError> {
    let total = g.total_vertices();
    let mut out = Vec::new();
    let mut chosen: Vec<VertexRef> = Vec::with_capacity(g.k());
    // candidates[d] = vertices compatible with the first d chosen parts
    let mut full = BitSet::new(total);
    for i in 0..total {
        full.insert(i);
    }
    let mut candidates: Vec<BitSet> = Vec::with_capacity(g.k());
    candidates.push(full);

    fn descend(
        g: &KPartiteGraph,
        cap: usize,
        chosen: &mut Vec<VertexRef>,
        candidates: &mut Vec<BitSet>,
        out: &mut Vec<Clique>,
    ) -> Result<(), CliqueError> {
        let depth = chosen.len();
        if depth == g.k() {
            if out.len() == cap {
                return Err(CliqueError::CapacityExceeded { cap });
            }
            out.push(Clique {
                verts: chosen.clone(),
            });
            return Ok(());
        }
        let part = depth + 1;
        let range = g.part_range(part);
        let ids: Vec<usize> = candidates[depth].iter_range(range.start, range.end).collect();
        for id in ids {
            let v = g.vertex(id);
            let mut next = candidates[depth].clone();
            next.intersect_with(g.adjacency_row_id(id));
            chosen.push(v);
            candidates.push(next);
            let r = descend(g, cap, chosen, candidates, out);
            candidates.pop();
            chosen.pop();
            r?;
        }
        Ok(())
    }

    descend(g, cap, &mut chosen, &mut candidates, &mut out)?;
    Ok(out)
}

/// The cliques of `all` containing `v`, in their original order.
pub fn cliques_through_vertex(v: VertexRef, all: &[Clique]) -> Vec<Clique> {
    all.iter().filter(|c| c.contains(v)).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{catlin_graph, random_min_degree_graph, KPartiteGraph};
    use proptest::prelude::*;

    fn v(p: usize, i: usize) -> VertexRef {
        VertexRef::new(p, i)
    }

    fn indices(c: &Clique) -> Vec<usize> {
        c.vertices().iter().map(|v| v.index).collect()
    }

    #[test]
    fn complete_graph_counts() {
        let g = KPartiteGraph::complete(3, 2).unwrap();
        let cs = enumerate_transversal_cliques(&g, DEFAULT_CLIQUE_CAP).unwrap();
        assert_eq!(cs.len(), 8);
        let g = KPartiteGraph::complete(2, 3).unwrap();
        let cs = enumerate_transversal_cliques(&g, DEFAULT_CLIQUE_CAP).unwrap();
        assert_eq!(cs.len(), 9);
    }

    #[test]
    fn lexicographic_order() {
        let g = KPartiteGraph::complete(2, 2).unwrap();
        let cs = enumerate_transversal_cliques(&g, DEFAULT_CLIQUE_CAP).unwrap();
        let tuples: Vec<Vec<usize>> = cs.iter().map(indices).collect();
        assert_eq!(tuples, vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
        let mut sorted = tuples.clone();
        sorted.sort();
        assert_eq!(tuples, sorted);
    }

    #[test]
    fn gap_witness_has_exactly_eight() {
        let g = catlin_graph(3, 3).unwrap();
        let cs = enumerate_transversal_cliques(&g, DEFAULT_CLIQUE_CAP).unwrap();
        let tuples: Vec<Vec<usize>> = cs.iter().map(indices).collect();
        // label patterns: (2,2,2), (3,3,3), and all arrangements of {1,2,2}
        // and {1,3,3}
        assert_eq!(
            tuples,
            vec![
                vec![1, 2, 2],
                vec![1, 3, 3],
                vec![2, 1, 2],
                vec![2, 2, 1],
                vec![2, 2, 2],
                vec![3, 1, 3],
                vec![3, 3, 1],
                vec![3, 3, 3],
            ]
        );
        // blown-up instance: each base clique becomes 2^3 copies
        let big = catlin_graph(3, 6).unwrap();
        let cs6 = enumerate_transversal_cliques(&big, DEFAULT_CLIQUE_CAP).unwrap();
        assert_eq!(cs6.len(), 64);
    }

    #[test]
    fn through_vertex_counts() {
        let g = catlin_graph(3, 3).unwrap();
        let cs = enumerate_transversal_cliques(&g, DEFAULT_CLIQUE_CAP).unwrap();
        assert_eq!(cliques_through_vertex(v(1, 1), &cs).len(), 2);
        assert_eq!(cliques_through_vertex(v(1, 2), &cs).len(), 3);
        assert_eq!(cliques_through_vertex(v(1, 3), &cs).len(), 3);
    }

    #[test]
    fn capacity_error() {
        let g = KPartiteGraph::complete(3, 10).unwrap();
        let err = enumerate_transversal_cliques(&g, 999).unwrap_err();
        assert_eq!(err, CliqueError::CapacityExceeded { cap: 999 });
        assert!(enumerate_transversal_cliques(&g, 1000).is_ok());
    }

    #[test]
    fn clique_validation() {
        let g = catlin_graph(3, 3).unwrap();
        assert!(Clique::new(&g, vec![v(1, 2), v(2, 2), v(3, 2)]).is_ok());
        let e = Clique::new(&g, vec![v(1, 1), v(2, 1), v(3, 1)]).unwrap_err();
        assert_eq!(
            e,
            CliqueError::MissingEdge { u: v(1, 1), v: v(2, 1) }
        );
        assert!(matches!(
            Clique::new(&g, vec![v(1, 1), v(1, 2), v(3, 1)]),
            Err(CliqueError::NotTransversal)
        ));
        assert!(matches!(
            Clique::new(&g, vec![v(1, 1), v(2, 2)]),
            Err(CliqueError::NotTransversal)
        ));
    }

    #[test]
    fn edgeless_and_single_part() {
        let g = KPartiteGraph::edgeless(3, 3).unwrap();
        assert!(enumerate_transversal_cliques(&g, 10).unwrap().is_empty());
        let g1 = KPartiteGraph::edgeless(1, 4).unwrap();
        assert_eq!(enumerate_transversal_cliques(&g1, 10).unwrap().len(), 4);
    }

    proptest! {
        #[test]
        fn double_counting_identity(seed in 0u64..200, k in 2usize..4, n in 1usize..5) {
            let g = random_min_degree_graph(k, n, 0, seed, Some(k * k * n * n / 2)).unwrap();
            let cs = enumerate_transversal_cliques(&g, DEFAULT_CLIQUE_CAP).unwrap();
            let total: usize = g.vertices().map(|v| cliques_through_vertex(v, &cs).len()).sum();
            prop_assert_eq!(total, k * cs.len());
            for c in &cs {
                prop_assert!(Clique::new(&g, c.vertices().to_vec()).is_ok());
            }
        }
    }
}
