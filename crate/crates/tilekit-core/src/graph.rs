//! Balanced k-partite graphs with bitset adjacency.
//!
//! Parts are numbered `1..=k` and vertices within a part `1..=n`. All edges
//! cross parts; the adjacency relation is kept symmetric by construction.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;

/// Hard cap on total vertex count; bitset rows are quadratic in this.
pub const MAX_VERTICES: usize = 100_000;

/// A vertex identified by `(part, index)`, both 1-based.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexRef {
    pub part: usize,
    pub index: usize,
}

impl VertexRef {
    pub fn new(part: usize, index: usize) -> Self {
        VertexRef { part, index }
    }
}

impl fmt::Debug for VertexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.part, self.index)
    }
}

impl fmt::Display for VertexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    /// A vertex lies outside `[1..k] x [1..n]`.
    VertexOutOfRange { vertex: VertexRef, k: usize, n: usize },
    /// Both endpoints belong to the same part.
    SamePartEdge { u: VertexRef, v: VertexRef },
    /// `k * n` exceeds [`MAX_VERTICES`].
    TooManyVertices { requested: usize },
    /// Parameters violate a constructor's requirements.
    BadParameter(&'static str),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::VertexOutOfRange { vertex, k, n } => write!(
                f,
                "vertex {} outside parts 1..={} with indices 1..={}",
                vertex, k, n
            ),
            GraphError::SamePartEdge { u, v } => {
                write!(f, "edge {}-{} joins vertices of the same part", u, v)
            }
            GraphError::TooManyVertices { requested } => write!(
                f,
                "graph would have {} vertices, cap is {}",
                requested, MAX_VERTICES
            ),
            GraphError::BadParameter(msg) => write!(f, "{}", msg),
        }
    }
}

/// Minimum bipartite degree for every ordered pair of distinct parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    k: usize,
    /// entry `[i-1][j-1]` = min over v in part i of deg(v, part j); None on diagonal
    mins: Vec<Vec<Option<usize>>>,
}

impl DegreeProfile {
    /// Minimum degree from part `i` into part `j` (1-based, `i != j`).
    pub fn get(&self, i: usize, j: usize) -> Option<usize> {
        self.mins[i - 1][j - 1]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The smallest entry; `None` when `k < 2`.
    pub fn min_entry(&self) -> Option<usize> {
        self.mins.iter().flatten().filter_map(|m| *m).min()
    }
}

/// A balanced k-partite graph: `k` parts of `n` vertices each, edges only
/// between distinct parts.
#[derive(Clone, PartialEq, Eq)]
pub struct KPartiteGraph {
    k: usize,
    n: usize,
    adj: Vec<BitSet>,
}

impl fmt::Debug for KPartiteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "KPartiteGraph(k={}, n={}, edges={})",
            self.k,
            self.n,
            self.edge_count()
        )
    }
}

impl KPartiteGraph {
    fn empty(k: usize, n: usize) -> Result<Self, GraphError> {
        if k == 0 || n == 0 {
            return Err(GraphError::BadParameter("k and n must be at least 1"));
        }
        let total = k.checked_mul(n).ok_or(GraphError::TooManyVertices {
            requested: usize::MAX,
        })?;
        if total > MAX_VERTICES {
            return Err(GraphError::TooManyVertices { requested: total });
        }
        Ok(KPartiteGraph {
            k,
            n,
            adj: vec![BitSet::new(total); total],
        })
    }

    /// Graph with no edges.
    pub fn edgeless(k: usize, n: usize) -> Result<Self, GraphError> {
        Self::empty(k, n)
    }

    /// Complete balanced k-partite graph.
    pub fn complete(k: usize, n: usize) -> Result<Self, GraphError> {
        let mut g = Self::empty(k, n)?;
        for u in 0..k * n {
            for v in 0..k * n {
                if u / n != v / n {
                    g.adj[u].insert(v);
                }
            }
        }
        Ok(g)
    }

    /// Builds a graph from an edge list, validating every endpoint.
    pub fn new_balanced(
        k: usize,
        n: usize,
        edges: &[(VertexRef, VertexRef)],
    ) -> Result<Self, GraphError> {
        let mut g = Self::empty(k, n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total_vertices(&self) -> usize {
        self.k * self.n
    }

    /// Dense id of a vertex: part-major, 0-based.
    #[inline]
    pub fn id(&self, v: VertexRef) -> usize {
        (v.part - 1) * self.n + (v.index - 1)
    }

    #[inline]
    pub fn vertex(&self, id: usize) -> VertexRef {
        VertexRef::new(id / self.n + 1, id % self.n + 1)
    }

    fn check_vertex(&self, v: VertexRef) -> Result<(), GraphError> {
        if v.part == 0 || v.part > self.k || v.index == 0 || v.index > self.n {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                k: self.k,
                n: self.n,
            })
        } else {
            Ok(())
        }
    }

    /// Inserts the undirected edge `u-v`; rejects same-part pairs.
    pub fn add_edge(&mut self, u: VertexRef, v: VertexRef) -> Result<(), GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u.part == v.part {
            return Err(GraphError::SamePartEdge { u, v });
        }
        let (a, b) = (self.id(u), self.id(v));
        self.adj[a].insert(b);
        self.adj[b].insert(a);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: VertexRef, v: VertexRef) {
        let (a, b) = (self.id(u), self.id(v));
        self.adj[a].remove(b);
        self.adj[b].remove(a);
    }

    #[inline]
    pub fn has_edge(&self, u: VertexRef, v: VertexRef) -> bool {
        self.adj[self.id(u)].contains(self.id(v))
    }

    /// Adjacency row of `v` as a bitset over dense ids.
    #[inline]
    pub fn adjacency_row(&self, v: VertexRef) -> &BitSet {
        &self.adj[self.id(v)]
    }

    #[inline]
    pub fn adjacency_row_id(&self, id: usize) -> &BitSet {
        &self.adj[id]
    }

    /// Dense-id range `lo..hi` of part `i` (1-based).
    #[inline]
    pub fn part_range(&self, i: usize) -> core::ops::Range<usize> {
        (i - 1) * self.n..i * self.n
    }

    /// All vertices in part-major order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexRef> + '_ {
        (0..self.total_vertices()).map(|id| self.vertex(id))
    }

    pub fn part_vertices(&self, i: usize) -> impl Iterator<Item = VertexRef> + '_ {
        self.part_range(i).map(|id| self.vertex(id))
    }

    /// Degree of `v` into part `j`.
    pub fn deg_in_part(&self, v: VertexRef, j: usize) -> usize {
        let r = self.part_range(j);
        self.adj[self.id(v)].count_range(r.start, r.end)
    }

    /// Neighbors of `v` inside part `j`, ascending by index.
    pub fn neighbors_in_part(&self, v: VertexRef, j: usize) -> impl Iterator<Item = VertexRef> + '_ {
        let r = self.part_range(j);
        self.adj[self.id(v)].iter_range(r.start, r.end).map(|id| self.vertex(id))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|row| row.count()).sum::<usize>() / 2
    }

    /// Canonical edge list: each edge once, endpoints ordered, list sorted.
    pub fn edges(&self) -> Vec<(VertexRef, VertexRef)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for a in 0..self.total_vertices() {
            for b in self.adj[a].iter_range(a + 1, self.total_vertices()) {
                out.push((self.vertex(a), self.vertex(b)));
            }
        }
        out
    }

    /// Per-ordered-pair minimum bipartite degrees and their overall minimum.
    ///
    /// The overall minimum is `n` (vacuously) when `k == 1`.
    pub fn min_bipartite_degree(&self) -> (usize, DegreeProfile) {
        let mut mins = vec![vec![None; self.k]; self.k];
        for i in 1..=self.k {
            for j in 1..=self.k {
                if i == j {
                    continue;
                }
                let m = self
                    .part_vertices(i)
                    .map(|v| self.deg_in_part(v, j))
                    .min()
                    .unwrap_or(0);
                mins[i - 1][j - 1] = Some(m);
            }
        }
        let profile = DegreeProfile { k: self.k, mins };
        (profile.min_entry().unwrap_or(self.n), profile)
    }

    /// The overall minimum bipartite degree.
    pub fn delta_hat(&self) -> usize {
        self.min_bipartite_degree().0
    }

    /// Replaces each vertex by `t` copies; copies of adjacent vertices are
    /// completely joined. Vertex `(i, j)` maps to `(i, (j-1)t+1 ..= jt)`.
    pub fn blow_up(&self, t: usize) -> Result<KPartiteGraph, GraphError> {
        if t == 0 {
            return Err(GraphError::BadParameter("blow-up factor must be at least 1"));
        }
        let mut g = Self::empty(self.k, self.n * t)?;
        for (u, v) in self.edges() {
            for cu in 0..t {
                for cv in 0..t {
                    let bu = VertexRef::new(u.part, (u.index - 1) * t + 1 + cu);
                    let bv = VertexRef::new(v.part, (v.index - 1) * t + 1 + cv);
                    let (a, b) = (g.id(bu), g.id(bv));
                    g.adj[a].insert(b);
                    g.adj[b].insert(a);
                }
            }
        }
        Ok(g)
    }

    /// Checks internal invariants: symmetry and no same-part edges.
    pub fn validate(&self) -> Result<(), GraphError> {
        for a in 0..self.total_vertices() {
            for b in self.adj[a].iter() {
                if a / self.n == b / self.n {
                    return Err(GraphError::SamePartEdge {
                        u: self.vertex(a),
                        v: self.vertex(b),
                    });
                }
                if !self.adj[b].contains(a) {
                    return Err(GraphError::BadParameter("adjacency not symmetric"));
                }
            }
        }
        Ok(())
    }
}

/// The k-partite gap witness family: for `k >= 3` and `k | n`, a balanced
/// k-partite graph on parts of size `n` with every bipartite minimum degree
/// exactly `(k-1)n/k` and no perfect transversal-clique tiling when `n/k` is
/// odd.
///
/// The base graph on parts of size `k` has vertices labeled `1..=k` inside
/// each part; across distinct parts, labels `j`, `j'` are adjacent when
/// `j == j' >= k-1`, or when `j != j'` and at least one of them is `<= k-2`.
/// The result is that base graph blown up by `n/k`.
pub fn catlin_graph(k: usize, n: usize) -> Result<KPartiteGraph, GraphError> {
    if k < 3 {
        return Err(GraphError::BadParameter("gap witness needs k >= 3"));
    }
    if n == 0 || n % k != 0 {
        return Err(GraphError::BadParameter("gap witness needs n divisible by k"));
    }
    let mut base = KPartiteGraph::empty(k, k)?;
    for i in 1..=k {
        for ip in (i + 1)..=k {
            for j in 1..=k {
                for jp in 1..=k {
                    let adjacent = if j == jp {
                        j >= k - 1
                    } else {
                        j <= k - 2 || jp <= k - 2
                    };
                    if adjacent {
                        base.add_edge(VertexRef::new(i, j), VertexRef::new(ip, jp))?;
                    }
                }
            }
        }
    }
    base.blow_up(n / k)
}

/// Random graph with all bipartite minimum degrees at least `target`: starts
/// complete and repeatedly deletes a uniformly random cross edge whose removal
/// keeps every bipartite degree at or above `target`, until no edge is
/// deletable or `budget` deletions have been made. Deterministic per seed.
pub fn random_min_degree_graph(
    k: usize,
    n: usize,
    target: usize,
    seed: u64,
    budget: Option<usize>,
) -> Result<KPartiteGraph, GraphError> {
    if target > n {
        return Err(GraphError::BadParameter(
            "degree target exceeds part size",
        ));
    }
    let mut g = KPartiteGraph::complete(k, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut remaining = budget.unwrap_or(usize::MAX);
    // deg[id][p-1] = degree of vertex id into part p
    let mut deg = vec![vec![n; k]; k * n];
    for id in 0..k * n {
        deg[id][id / n] = 0;
    }
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    while remaining > 0 {
        candidates.clear();
        for a in 0..k * n {
            for b in g.adj[a].iter_range(a + 1, k * n) {
                if deg[a][b / n] > target && deg[b][a / n] > target {
                    candidates.push((a, b));
                }
            }
        }
        if candidates.is_empty() {
            break;
        }
        let &(a, b) = candidates.choose(&mut rng).expect("nonempty");
        g.adj[a].remove(b);
        g.adj[b].remove(a);
        deg[a][b / n] -= 1;
        deg[b][a / n] -= 1;
        remaining -= 1;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(p: usize, i: usize) -> VertexRef {
        VertexRef::new(p, i)
    }

    #[test]
    fn constructor_validation() {
        let e = KPartiteGraph::new_balanced(2, 2, &[(v(1, 1), v(1, 2))]);
        assert!(matches!(e, Err(GraphError::SamePartEdge { .. })));
        let e = KPartiteGraph::new_balanced(2, 2, &[(v(1, 1), v(3, 1))]);
        assert!(matches!(e, Err(GraphError::VertexOutOfRange { .. })));
        let e = KPartiteGraph::new_balanced(2, 2, &[(v(1, 0), v(2, 1))]);
        assert!(matches!(e, Err(GraphError::VertexOutOfRange { .. })));
        assert!(KPartiteGraph::edgeless(0, 3).is_err());
        assert!(KPartiteGraph::edgeless(400, 300).is_err());
    }

    #[test]
    fn id_round_trip_and_symmetry() {
        let g = KPartiteGraph::new_balanced(3, 2, &[(v(2, 1), v(1, 2)), (v(3, 2), v(1, 1))])
            .unwrap();
        for id in 0..g.total_vertices() {
            assert_eq!(g.id(g.vertex(id)), id);
        }
        assert!(g.has_edge(v(1, 2), v(2, 1)));
        assert!(g.has_edge(v(2, 1), v(1, 2)));
        assert!(!g.has_edge(v(1, 1), v(2, 1)));
        g.validate().unwrap();
    }

    #[test]
    fn complete_and_edgeless_profiles() {
        let g = KPartiteGraph::complete(3, 4).unwrap();
        let (min, prof) = g.min_bipartite_degree();
        assert_eq!(min, 4);
        assert_eq!(prof.get(1, 3), Some(4));
        assert_eq!(prof.get(2, 2), None);
        assert_eq!(g.edge_count(), 3 * 16);

        let e = KPartiteGraph::edgeless(3, 4).unwrap();
        assert_eq!(e.delta_hat(), 0);
    }

    #[test]
    fn degree_profile_reports_each_direction() {
        // part 1 vertex 2 has no neighbors in part 2, but every part 2 vertex
        // reaches part 1
        let g = KPartiteGraph::new_balanced(
            2,
            2,
            &[(v(1, 1), v(2, 1)), (v(1, 1), v(2, 2))],
        )
        .unwrap();
        let (min, prof) = g.min_bipartite_degree();
        assert_eq!(prof.get(1, 2), Some(0));
        assert_eq!(prof.get(2, 1), Some(1));
        assert_eq!(min, 0);
    }

    #[test]
    fn gap_witness_base_adjacency() {
        let g = catlin_graph(3, 3).unwrap();
        // labels 1-1 never adjacent, 2-2 and 3-3 adjacent, 1 adjacent to 2 and 3
        assert!(!g.has_edge(v(1, 1), v(2, 1)));
        assert!(g.has_edge(v(1, 2), v(2, 2)));
        assert!(g.has_edge(v(1, 3), v(2, 3)));
        assert!(g.has_edge(v(1, 1), v(2, 2)));
        assert!(g.has_edge(v(1, 1), v(3, 3)));
        assert!(!g.has_edge(v(1, 2), v(2, 3)));
        let (min, prof) = g.min_bipartite_degree();
        assert_eq!(min, 2);
        for i in 1..=3 {
            for j in 1..=3 {
                if i != j {
                    assert_eq!(prof.get(i, j), Some(2));
                }
            }
        }
        g.validate().unwrap();
        // 6 edges between each of the 3 part pairs
        assert_eq!(g.edge_count(), 18);
    }

    #[test]
    fn gap_witness_parameters() {
        assert_eq!(catlin_graph(3, 6).unwrap().delta_hat(), 4);
        assert_eq!(catlin_graph(4, 4).unwrap().delta_hat(), 3);
        assert_eq!(catlin_graph(5, 5).unwrap().delta_hat(), 4);
        assert!(catlin_graph(2, 4).is_err());
        assert!(catlin_graph(3, 4).is_err());
    }

    #[test]
    fn blow_up_maps_copies() {
        let g = KPartiteGraph::new_balanced(2, 2, &[(v(1, 1), v(2, 2))]).unwrap();
        let b = g.blow_up(3).unwrap();
        assert_eq!(b.n(), 6);
        // copies of (1,1) are indices 1..=3, copies of (2,2) are 4..=6
        for a in 1..=3 {
            for c in 4..=6 {
                assert!(b.has_edge(v(1, a), v(2, c)));
            }
            assert!(!b.has_edge(v(1, a), v(2, 1)));
        }
        assert_eq!(b.edge_count(), 9);
        b.validate().unwrap();
    }

    #[test]
    fn random_generator_respects_floor_and_seed() {
        let g1 = random_min_degree_graph(3, 4, 3, 7, None).unwrap();
        let g2 = random_min_degree_graph(3, 4, 3, 7, None).unwrap();
        assert_eq!(g1.edges(), g2.edges());
        assert!(g1.delta_hat() >= 3);
        g1.validate().unwrap();

        let g3 = random_min_degree_graph(3, 4, 3, 8, None).unwrap();
        assert_ne!(g1.edges(), g3.edges());

        let full = random_min_degree_graph(3, 4, 3, 7, Some(0)).unwrap();
        assert_eq!(full.edge_count(), 3 * 16);

        // maximal deletion drives some vertex to the floor
        let tight = random_min_degree_graph(2, 5, 2, 1, None).unwrap();
        assert_eq!(tight.delta_hat(), 2);

        assert!(random_min_degree_graph(2, 3, 4, 0, None).is_err());
    }

    proptest! {
        #[test]
        fn blow_up_scales_min_degree(seed in 0u64..500, t in 1usize..4) {
            let g = random_min_degree_graph(3, 3, 1, seed, None).unwrap();
            let b = g.blow_up(t).unwrap();
            prop_assert_eq!(b.delta_hat(), t * g.delta_hat());
            prop_assert_eq!(b.edge_count(), t * t * g.edge_count());
        }

        #[test]
        fn generator_always_meets_target(
            k in 2usize..4,
            n in 1usize..6,
            seed in 0u64..100,
        ) {
            let target = n.div_ceil(2);
            let g = random_min_degree_graph(k, n, target, seed, None).unwrap();
            prop_assert!(g.delta_hat() >= target);
            prop_assert!(g.validate().is_ok());
        }
    }
}
