//! Integral tilings: exact-cover search for perfect clique and K_h^k
//! tilings, the bipartite matching base case, and the blow-up tiling built
//! from an optimal fractional solution.
//!
//! Negative answers are certified by exhausting the search tree. A node
//! budget aborts with a capacity error instead; it never produces a false
//! "none".

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bitset::BitSet;
use crate::cliques::{enumerate_transversal_cliques, CliqueError, DEFAULT_CLIQUE_CAP};
use crate::fractional::vertex_coverage;
use crate::graph::{KPartiteGraph, VertexRef};
use crate::lp::LPSolution;
use crate::rational::Rational;

/// One tile: `parts[i]` holds its vertices in part `i+1`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tile {
    pub parts: Vec<Vec<VertexRef>>,
}

impl Tile {
    pub fn vertices(&self) -> impl Iterator<Item = VertexRef> + '_ {
        self.parts.iter().flatten().copied()
    }
}

/// A collection of vertex-disjoint tiles, each complete across parts with
/// `h` vertices per part. `h = 1` tiles are transversal cliques.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tiling {
    pub h: usize,
    pub tiles: Vec<Tile>,
}

impl Tiling {
    pub fn tile_count(&self) -> usize {
        self.tiles.len()
    }

    pub fn covered_vertices(&self) -> impl Iterator<Item = VertexRef> + '_ {
        self.tiles.iter().flat_map(|t| t.vertices())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TilingError {
    /// The instance exceeds the configured vertex cap for exhaustive search.
    TooLarge { vertices: usize, cap: usize },
    /// The node budget ran out before the search tree was exhausted.
    BudgetExhausted,
    BadParameter(&'static str),
    /// `D * w(T)` is not an integer for the indexed clique.
    NonIntegralWeight { clique: usize },
    Cliques(CliqueError),
}

impl fmt::Display for TilingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TilingError::TooLarge { vertices, cap } => {
                write!(f, "{} vertices exceed the search cap {}", vertices, cap)
            }
            TilingError::BudgetExhausted => write!(f, "search node budget exhausted"),
            TilingError::BadParameter(m) => write!(f, "bad parameter: {}", m),
            TilingError::NonIntegralWeight { clique } => {
                write!(f, "scaled weight of clique {} is not integral", clique)
            }
            TilingError::Cliques(e) => write!(f, "{}", e),
        }
    }
}

impl From<CliqueError> for TilingError {
    fn from(e: CliqueError) -> Self {
        TilingError::Cliques(e)
    }
}

/// Limits and branching policy for the exact-cover search.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Cap on vertices the tiles must cover.
    pub max_vertices: usize,
    /// Cap on search nodes before aborting with `BudgetExhausted`.
    pub node_budget: u64,
    /// Branch on the vertex with the fewest candidate extensions instead of
    /// the lexicographically least one. Still deterministic; ties break
    /// lexicographically.
    pub most_constrained: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_vertices: 36,
            node_budget: 10_000_000,
            most_constrained: false,
        }
    }
}

struct Search<'a> {
    g: &'a KPartiteGraph,
    h: usize,
    /// Remaining vertices each part may leave uncovered.
    quota: Vec<usize>,
    covered: BitSet,
    discarded: BitSet,
    processed: usize,
    tiles: Vec<Tile>,
    budget: u64,
    most_constrained: bool,
}

impl<'a> Search<'a> {
    fn new(g: &'a KPartiteGraph, h: usize, cfg: &SearchConfig) -> Self {
        let spare = g.n() - h * (g.n() / h);
        let total = g.total_vertices();
        Search {
            g,
            h,
            quota: vec![spare; g.k()],
            covered: BitSet::new(total),
            discarded: BitSet::new(total),
            processed: 0,
            tiles: Vec::new(),
            budget: cfg.node_budget,
            most_constrained: cfg.most_constrained,
        }
    }

    fn tick(&mut self) -> Result<(), TilingError> {
        if self.budget == 0 {
            return Err(TilingError::BudgetExhausted);
        }
        self.budget -= 1;
        Ok(())
    }

    fn is_open(&self, v: VertexRef) -> bool {
        let id = self.g.id(v);
        !self.covered.contains(id) && !self.discarded.contains(id)
    }

    /// Open vertices of part `q` adjacent to everything chosen so far in
    /// other parts, excluding `skip`.
    fn candidates(&self, q: usize, chosen: &[Vec<VertexRef>], skip: VertexRef) -> Vec<VertexRef> {
        self.g
            .part_vertices(q)
            .filter(|&u| u != skip && self.is_open(u))
            .filter(|&u| {
                chosen
                    .iter()
                    .flatten()
                    .all(|&w| w.part == q || self.g.has_edge(u, w))
            })
            .collect()
    }

    fn pick_vertex(&self) -> Option<VertexRef> {
        let total = self.g.total_vertices();
        let first_open = (0..total)
            .map(|id| self.g.vertex(id))
            .find(|&v| self.is_open(v))?;
        if !self.most_constrained {
            return Some(first_open);
        }
        let mut best = first_open;
        let mut best_score = u64::MAX;
        for id in 0..total {
            let v = self.g.vertex(id);
            if !self.is_open(v) {
                continue;
            }
            // upper bound on branches at v: combinations compatible with v
            // alone in every other part, plus the discard option
            let mut score: u64 = if self.quota[v.part - 1] > 0 { 1 } else { 0 };
            let mut product: u64 = 1;
            for q in 1..=self.g.k() {
                let (need, pool) = if q == v.part {
                    (
                        self.h - 1,
                        self.g
                            .part_vertices(q)
                            .filter(|&u| u != v && self.is_open(u))
                            .count(),
                    )
                } else {
                    (
                        self.h,
                        self.g
                            .part_vertices(q)
                            .filter(|&u| self.is_open(u) && self.g.has_edge(u, v))
                            .count(),
                    )
                };
                product = product.saturating_mul(binomial(pool, need));
            }
            score = score.saturating_add(product);
            if score < best_score {
                best_score = score;
                best = v;
            }
        }
        Some(best)
    }

    fn solve(&mut self) -> Result<bool, TilingError> {
        self.tick()?;
        let v = match self.pick_vertex() {
            None => return Ok(true),
            Some(v) => v,
        };
        let mut chosen: Vec<Vec<VertexRef>> = vec![Vec::new(); self.g.k()];
        chosen[v.part - 1].push(v);
        let mut order: Vec<usize> = Vec::with_capacity(self.g.k());
        order.push(v.part);
        order.extend((1..=self.g.k()).filter(|&q| q != v.part));
        if self.extend(v, &order, 0, &mut chosen)? {
            return Ok(true);
        }
        if self.quota[v.part - 1] > 0 {
            self.quota[v.part - 1] -= 1;
            self.discarded.insert(self.g.id(v));
            let done = self.solve()?;
            self.discarded.remove(self.g.id(v));
            self.quota[v.part - 1] += 1;
            if done {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn extend(
        &mut self,
        v: VertexRef,
        order: &[usize],
        depth: usize,
        chosen: &mut Vec<Vec<VertexRef>>,
    ) -> Result<bool, TilingError> {
        self.tick()?;
        if depth == order.len() {
            return self.commit(chosen);
        }
        let q = order[depth];
        let need = if q == v.part { self.h - 1 } else { self.h };
        if need == 0 {
            return self.extend(v, order, depth + 1, chosen);
        }
        let cands = self.candidates(q, chosen, v);
        if cands.len() < need {
            return Ok(false);
        }
        for combo in combinations(&cands, need) {
            let before = chosen[q - 1].len();
            chosen[q - 1].extend_from_slice(&combo);
            let done = self.extend(v, order, depth + 1, chosen)?;
            chosen[q - 1].truncate(before);
            if done {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn commit(&mut self, chosen: &mut Vec<Vec<VertexRef>>) -> Result<bool, TilingError> {
        let mut parts = chosen.clone();
        for p in &mut parts {
            p.sort();
        }
        for u in parts.iter().flatten() {
            self.covered.insert(self.g.id(*u));
        }
        self.processed += self.h * self.g.k();
        self.tiles.push(Tile { parts });
        let done = self.solve()?;
        if done {
            return Ok(true);
        }
        let tile = self.tiles.pop().expect("just pushed");
        for u in tile.vertices() {
            self.covered.remove(self.g.id(u));
        }
        self.processed -= self.h * self.g.k();
        Ok(false)
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut out: u64 = 1;
    for i in 0..k.min(n - k) {
        out = out.saturating_mul((n - i) as u64) / (i as u64 + 1);
    }
    out
}

/// All `need`-subsets of `cands` in lexicographic order.
fn combinations(cands: &[VertexRef], need: usize) -> Vec<Vec<VertexRef>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(need);
    fn rec(cands: &[VertexRef], need: usize, start: usize, cur: &mut Vec<VertexRef>, out: &mut Vec<Vec<VertexRef>>) {
        if cur.len() == need {
            out.push(cur.clone());
            return;
        }
        let remaining = need - cur.len();
        for i in start..=cands.len().saturating_sub(remaining) {
            cur.push(cands[i]);
            rec(cands, need, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(cands, need, 0, &mut cur, &mut out);
    out
}

fn search_tiling(
    g: &KPartiteGraph,
    h: usize,
    cfg: &SearchConfig,
) -> Result<Option<Tiling>, TilingError> {
    if h == 0 {
        return Err(TilingError::BadParameter("tile height must be positive"));
    }
    let covered = h * g.k() * (g.n() / h);
    if covered > cfg.max_vertices {
        return Err(TilingError::TooLarge {
            vertices: covered,
            cap: cfg.max_vertices,
        });
    }
    let mut s = Search::new(g, h, cfg);
    if s.solve()? {
        Ok(Some(Tiling { h, tiles: s.tiles }))
    } else {
        Ok(None)
    }
}

/// Finds a perfect tiling by transversal cliques, or certifies none exists.
pub fn perfect_clique_tiling(g: &KPartiteGraph) -> Result<Option<Tiling>, TilingError> {
    perfect_clique_tiling_with(g, &SearchConfig::default())
}

pub fn perfect_clique_tiling_with(
    g: &KPartiteGraph,
    cfg: &SearchConfig,
) -> Result<Option<Tiling>, TilingError> {
    search_tiling(g, 1, cfg)
}

/// Finds `floor(n/h)` disjoint complete k-partite tiles with `h` vertices per
/// part, or certifies none exist.
pub fn perfect_multipartite_tiling(
    g: &KPartiteGraph,
    h: usize,
) -> Result<Option<Tiling>, TilingError> {
    perfect_multipartite_tiling_with(g, h, &SearchConfig::default())
}

pub fn perfect_multipartite_tiling_with(
    g: &KPartiteGraph,
    h: usize,
    cfg: &SearchConfig,
) -> Result<Option<Tiling>, TilingError> {
    if h == 1 {
        return perfect_clique_tiling_with(g, cfg);
    }
    search_tiling(g, h, cfg)
}

/// Outcome of the bipartite base case: a perfect matching, or a set on the
/// first part with fewer neighbors than members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BipartiteMatching {
    Perfect(Tiling),
    Deficient { violator: Vec<VertexRef> },
}

/// Augmenting-path matching on a 2-partite graph.
pub fn bipartite_perfect_matching(g: &KPartiteGraph) -> Result<BipartiteMatching, TilingError> {
    if g.k() != 2 {
        return Err(TilingError::BadParameter("matching needs exactly 2 parts"));
    }
    let n = g.n();
    // match_right[b] = left index matched to right vertex b+1
    let mut match_right: Vec<Option<usize>> = vec![None; n];
    fn try_augment(
        g: &KPartiteGraph,
        a: usize,
        visited: &mut [bool],
        match_right: &mut [Option<usize>],
    ) -> bool {
        for v in g.neighbors_in_part(VertexRef::new(1, a), 2) {
            let b = v.index - 1;
            if visited[b] {
                continue;
            }
            visited[b] = true;
            if match_right[b].is_none()
                || try_augment(g, match_right[b].unwrap(), visited, match_right)
            {
                match_right[b] = Some(a);
                return true;
            }
        }
        false
    }
    for a in 1..=n {
        let mut visited = vec![false; n];
        if !try_augment(g, a, &mut visited, &mut match_right) {
            // alternating reachability from the stuck vertex yields a set
            // with too few neighbors
            let mut in_s = vec![false; n];
            in_s[a - 1] = true;
            loop {
                let mut grew = false;
                for i in 0..n {
                    if !in_s[i] {
                        continue;
                    }
                    for v in g.neighbors_in_part(VertexRef::new(1, i + 1), 2) {
                        if let Some(m) = match_right[v.index - 1] {
                            if !in_s[m - 1] {
                                in_s[m - 1] = true;
                                grew = true;
                            }
                        }
                    }
                }
                if !grew {
                    break;
                }
            }
            let violator = (1..=n)
                .filter(|i| in_s[i - 1])
                .map(|i| VertexRef::new(1, i))
                .collect();
            return Ok(BipartiteMatching::Deficient { violator });
        }
    }
    let mut tiles: Vec<Tile> = (0..n)
        .map(|b| Tile {
            parts: vec![
                vec![VertexRef::new(1, match_right[b].expect("all matched"))],
                vec![VertexRef::new(2, b + 1)],
            ],
        })
        .collect();
    tiles.sort_by_key(|t| t.parts[0][0]);
    Ok(BipartiteMatching::Perfect(Tiling { h: 1, tiles }))
}

/// Uncovered vertices left behind by a suboptimal fractional solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deficiency {
    pub uncovered: Vec<VertexRef>,
}

/// A blown-up graph together with the integral tiling extracted from a
/// fractional solution.
#[derive(Debug, Clone)]
pub struct FractionalBlowUp {
    pub graph: KPartiteGraph,
    pub tiling: Tiling,
    /// `None` when the weights were optimal and the tiling is perfect.
    pub deficiency: Option<Deficiency>,
}

/// Blows the graph up by `D` and converts clique weights into `D*w(T)`
/// vertex-disjoint clique copies, consuming fresh copies from each vertex
/// class in order. Weights follow the enumeration order of
/// `enumerate_transversal_cliques`.
pub fn tiling_from_fractional(
    g_r: &KPartiteGraph,
    primal: &LPSolution,
    d: usize,
) -> Result<FractionalBlowUp, TilingError> {
    if d == 0 {
        return Err(TilingError::BadParameter("scale factor must be positive"));
    }
    let cliques = enumerate_transversal_cliques(g_r, DEFAULT_CLIQUE_CAP)?;
    if primal.values.len() != cliques.len() {
        return Err(TilingError::BadParameter(
            "weight vector does not match the clique count",
        ));
    }
    if primal.values.iter().any(|w| w.is_negative()) {
        return Err(TilingError::BadParameter("negative clique weight"));
    }
    if vertex_coverage(g_r, &cliques, primal)
        .iter()
        .any(|c| *c > Rational::one())
    {
        return Err(TilingError::BadParameter("weights overload a vertex"));
    }
    let scale = Rational::from(d);
    let mut copies: Vec<usize> = Vec::with_capacity(cliques.len());
    for (idx, w) in primal.values.iter().enumerate() {
        let m = &scale * w;
        match m.to_usize_exact() {
            Some(m) => copies.push(m),
            None => return Err(TilingError::NonIntegralWeight { clique: idx }),
        }
    }
    let graph = g_r
        .blow_up(d)
        .map_err(|_| TilingError::BadParameter("blow-up exceeds the vertex limit"))?;
    let mut cursor = vec![0usize; g_r.total_vertices()];
    let mut tiles = Vec::new();
    for (c, &m) in cliques.iter().zip(&copies) {
        for r in 0..m {
            let parts = c
                .vertices()
                .iter()
                .map(|&v| {
                    let offset = cursor[g_r.id(v)] + r;
                    vec![VertexRef::new(v.part, (v.index - 1) * d + offset + 1)]
                })
                .collect();
            tiles.push(Tile { parts });
        }
        for &v in c.vertices() {
            cursor[g_r.id(v)] += m;
        }
    }
    let tiling = Tiling { h: 1, tiles };
    let deficiency = if tiling.tile_count() == d * g_r.n() {
        None
    } else {
        let mut uncovered = Vec::new();
        for v in g_r.vertices() {
            for offset in cursor[g_r.id(v)]..d {
                uncovered.push(VertexRef::new(v.part, (v.index - 1) * d + offset + 1));
            }
        }
        uncovered.sort();
        Some(Deficiency { uncovered })
    };
    Ok(FractionalBlowUp {
        graph,
        tiling,
        deficiency,
    })
}

/// Why a claimed tiling is not a perfect K_h^k-tiling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TilingViolation {
    ShapeMismatch { expected_h: usize, found_h: usize },
    WrongPartCount { tile: usize },
    WrongPartSize { tile: usize, part: usize },
    OutOfRange { v: VertexRef },
    RepeatedVertex { v: VertexRef },
    MissingEdge { u: VertexRef, v: VertexRef },
    WrongCount { expected: usize, found: usize },
}

impl fmt::Display for TilingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TilingViolation::ShapeMismatch { expected_h, found_h } => {
                write!(f, "expected height {}, tiling says {}", expected_h, found_h)
            }
            TilingViolation::WrongPartCount { tile } => {
                write!(f, "tile {} does not span every part", tile)
            }
            TilingViolation::WrongPartSize { tile, part } => {
                write!(f, "tile {} has the wrong size in part {}", tile, part)
            }
            TilingViolation::OutOfRange { v } => write!(f, "vertex {} out of range", v),
            TilingViolation::RepeatedVertex { v } => write!(f, "vertex {} used twice", v),
            TilingViolation::MissingEdge { u, v } => {
                write!(f, "tile pair {} {} is not an edge", u, v)
            }
            TilingViolation::WrongCount { expected, found } => {
                write!(f, "expected {} tiles, found {}", expected, found)
            }
        }
    }
}

/// Checks that `t` is a perfect K_h^k-tiling of `g`: disjoint tiles, each
/// complete across parts with `h` vertices per part, `floor(n/h)` tiles in
/// total.
pub fn verify_tiling(g: &KPartiteGraph, t: &Tiling, h: usize) -> Result<(), TilingViolation> {
    if t.h != h {
        return Err(TilingViolation::ShapeMismatch {
            expected_h: h,
            found_h: t.h,
        });
    }
    let mut seen = BitSet::new(g.total_vertices());
    for (ti, tile) in t.tiles.iter().enumerate() {
        if tile.parts.len() != g.k() {
            return Err(TilingViolation::WrongPartCount { tile: ti });
        }
        for (pi, part) in tile.parts.iter().enumerate() {
            if part.len() != h {
                return Err(TilingViolation::WrongPartSize { tile: ti, part: pi + 1 });
            }
            for &v in part {
                if v.part != pi + 1 || v.index == 0 || v.index > g.n() {
                    return Err(TilingViolation::OutOfRange { v });
                }
                let id = g.id(v);
                if seen.contains(id) {
                    return Err(TilingViolation::RepeatedVertex { v });
                }
                seen.insert(id);
            }
        }
        for p in 0..g.k() {
            for q in (p + 1)..g.k() {
                for &u in &tile.parts[p] {
                    for &v in &tile.parts[q] {
                        if !g.has_edge(u, v) {
                            return Err(TilingViolation::MissingEdge { u, v });
                        }
                    }
                }
            }
        }
    }
    let expected = g.n() / h;
    if t.tiles.len() != expected {
        return Err(TilingViolation::WrongCount {
            expected,
            found: t.tiles.len(),
        });
    }
    Ok(())
}
