//! Regularity primitives: exact densities, exhaustive and good-pair-count
//! regularity certification, super-regularity, slicing, the random slicing
//! experiment with its martingale bound, reduced graphs, and a greedy
//! complete-multipartite embedder.
//!
//! Every certification decision is made over exact rationals; fifth-root
//! thresholds are compared by raising to the fifth power. Floating point
//! appears only in reported bound values, never in decisions.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;
use crate::graph::{KPartiteGraph, VertexRef};
use crate::params::{
    CertificateKind, DensityWindow, EpsParam, RegularityCertificate,
};
use crate::rational::Rational;

/// Cap for exhaustive subset enumeration, per side.
pub const EXACT_CHECK_CAP: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegularityError {
    /// Exhaustive checking is limited to `EXACT_CHECK_CAP` vertices per
    /// side; larger pairs must go through `kr_certificate`.
    TooLargeForExact { size: usize, cap: usize },
    /// The good-pair criterion needs |A| >= 2/eps.
    KrPrecondition { size: usize, needed: Rational },
    EmptySide,
    Overlap { v: VertexRef },
    OutOfRange { v: VertexRef },
    DuplicateVertex { v: VertexRef },
    /// A stated hypothesis fails; the message names the inequality.
    Hypothesis(&'static str),
    /// More low-degree vertices than the regularity hypothesis permits.
    DiscardOverflow { cluster: usize, discarded: usize, allowed: usize },
    UnbalancedClusters(&'static str),
    BadParameter(&'static str),
    /// The claimed superset pair does not contain the original (side 'A' or 'B').
    NotSuperset { side: char },
    TooManyAdded { side: char },
    AddedDegreeLow { v: VertexRef },
}

impl fmt::Display for RegularityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegularityError::TooLargeForExact { size, cap } => {
                write!(f, "side of {} exceeds the exact-check cap {}", size, cap)
            }
            RegularityError::KrPrecondition { size, needed } => {
                write!(f, "side of {} is below the required 2/eps = {}", size, needed)
            }
            RegularityError::EmptySide => write!(f, "pair sides must be nonempty"),
            RegularityError::Overlap { v } => write!(f, "vertex {} lies on both sides", v),
            RegularityError::OutOfRange { v } => write!(f, "vertex {} out of range", v),
            RegularityError::DuplicateVertex { v } => write!(f, "vertex {} repeated", v),
            RegularityError::Hypothesis(m) => write!(f, "hypothesis failed: {}", m),
            RegularityError::DiscardOverflow { cluster, discarded, allowed } => write!(
                f,
                "cluster {} discarded {} vertices, more than the {} allowed",
                cluster, discarded, allowed
            ),
            RegularityError::UnbalancedClusters(m) => write!(f, "unbalanced clusters: {}", m),
            RegularityError::BadParameter(m) => write!(f, "bad parameter: {}", m),
            RegularityError::NotSuperset { side } => {
                write!(f, "side {} is not a superset of the original", side)
            }
            RegularityError::TooManyAdded { side } => {
                write!(f, "too many vertices added to side {}", side)
            }
            RegularityError::AddedDegreeLow { v } => {
                write!(f, "added vertex {} misses the degree floor", v)
            }
        }
    }
}

/// Two disjoint vertex sets inside a host graph, with cached membership
/// masks. Sides are kept sorted.
#[derive(Debug, Clone)]
pub struct BipartitePair<'g> {
    host: &'g KPartiteGraph,
    a: Vec<VertexRef>,
    b: Vec<VertexRef>,
    b_mask: BitSet,
}

impl<'g> BipartitePair<'g> {
    pub fn new(
        host: &'g KPartiteGraph,
        mut a: Vec<VertexRef>,
        mut b: Vec<VertexRef>,
    ) -> Result<Self, RegularityError> {
        if a.is_empty() || b.is_empty() {
            return Err(RegularityError::EmptySide);
        }
        a.sort();
        b.sort();
        let mut seen = BitSet::new(host.total_vertices());
        for &v in a.iter().chain(b.iter()) {
            if v.part == 0 || v.part > host.k() || v.index == 0 || v.index > host.n() {
                return Err(RegularityError::OutOfRange { v });
            }
            let id = host.id(v);
            if seen.contains(id) {
                // repeated within a side or present on both sides
                if a.contains(&v) && b.contains(&v) {
                    return Err(RegularityError::Overlap { v });
                }
                return Err(RegularityError::DuplicateVertex { v });
            }
            seen.insert(id);
        }
        let mut b_mask = BitSet::new(host.total_vertices());
        for &v in &b {
            b_mask.insert(host.id(v));
        }
        Ok(BipartitePair { host, a, b, b_mask })
    }

    /// Builds the pair spanning two whole parts of the host.
    pub fn of_parts(host: &'g KPartiteGraph, i: usize, j: usize) -> Result<Self, RegularityError> {
        if i == j {
            return Err(RegularityError::BadParameter("sides must be distinct parts"));
        }
        let a = host.part_vertices(i).collect();
        let b = host.part_vertices(j).collect();
        BipartitePair::new(host, a, b)
    }

    pub fn host(&self) -> &'g KPartiteGraph {
        self.host
    }

    pub fn side_a(&self) -> &[VertexRef] {
        &self.a
    }

    pub fn side_b(&self) -> &[VertexRef] {
        &self.b
    }

    pub fn deg_into_b(&self, v: VertexRef) -> usize {
        self.host.adjacency_row(v).intersection_count(&self.b_mask)
    }

    pub fn edge_count(&self) -> usize {
        self.a.iter().map(|&v| self.deg_into_b(v)).sum()
    }

    /// Adjacency of each A-vertex into B, as bitsets over B's positions.
    fn compact_rows(&self) -> Vec<BitSet> {
        self.a
            .iter()
            .map(|&x| {
                let mut row = BitSet::new(self.b.len());
                for (slot, &y) in self.b.iter().enumerate() {
                    if self.host.has_edge(x, y) {
                        row.insert(slot);
                    }
                }
                row
            })
            .collect()
    }
}

/// Exact edge density e(A,B)/(|A||B|).
pub fn density(pair: &BipartitePair<'_>) -> Rational {
    &Rational::from(pair.edge_count())
        / &Rational::from(pair.a.len() * pair.b.len())
}

/// Smallest integer strictly above `r`.
fn strict_above(r: &Rational) -> i64 {
    r.floor_big().to_i64().expect("threshold in range") + 1
}

/// Largest integer strictly below `r`.
fn strict_below(r: &Rational) -> i64 {
    if r.is_integer() {
        r.floor_big().to_i64().expect("threshold in range") - 1
    } else {
        r.floor_big().to_i64().expect("threshold in range")
    }
}

/// Smallest integer at least `r`.
fn int_ceil(r: &Rational) -> i64 {
    let f = r.floor_big().to_i64().expect("threshold in range");
    if r.is_integer() {
        f
    } else {
        f + 1
    }
}

/// Smallest subset size `s` in 1..=len with s >= eps * len.
fn min_qualifying_size(len: usize, eps: &EpsParam) -> usize {
    for s in 1..=len {
        if eps.at_most(&(&Rational::from(s) / &Rational::from(len))) {
            return s;
        }
    }
    len
}

/// Exhaustively decides eps-regularity: every X in A with |X| >= eps|A| and
/// Y in B with |Y| >= eps|B| must satisfy |d(X,Y) - d(A,B)| <= eps. For a
/// fixed X, extreme edge counts over all size-t subsets Y come from the
/// sorted per-vertex degree sums, so Y never needs explicit enumeration.
pub fn is_regular_exact(pair: &BipartitePair<'_>, eps: &EpsParam) -> Result<bool, RegularityError> {
    let (na, nb) = (pair.a.len(), pair.b.len());
    for &size in &[na, nb] {
        if size > EXACT_CHECK_CAP {
            return Err(RegularityError::TooLargeForExact {
                size,
                cap: EXACT_CHECK_CAP,
            });
        }
    }
    let d = density(pair);
    // adjacency of each B-vertex into A as bitmasks over A positions
    let masks: Vec<u16> = pair
        .b
        .iter()
        .map(|&y| {
            let mut m = 0u16;
            for (t, &x) in pair.a.iter().enumerate() {
                if pair.host.has_edge(x, y) {
                    m |= 1 << t;
                }
            }
            m
        })
        .collect();
    let min_x = min_qualifying_size(na, eps);
    let min_y = min_qualifying_size(nb, eps);
    let mut degs = vec![0u32; nb];
    let mut prefix = vec![0u64; nb + 1];
    for xmask in 1u32..(1u32 << na) {
        let xsize = xmask.count_ones() as usize;
        if xsize < min_x {
            continue;
        }
        for (i, m) in masks.iter().enumerate() {
            degs[i] = (xmask & *m as u32).count_ones();
        }
        degs.sort_unstable();
        // prefix[t] = sum of the t smallest degrees
        for t in 0..nb {
            prefix[t + 1] = prefix[t] + degs[t] as u64;
        }
        let total = prefix[nb];
        for t in min_y..=nb {
            let min_e = prefix[t];
            let max_e = total - prefix[nb - t];
            let scale = Rational::from(xsize * t);
            let over = &(&Rational::from(max_e as usize) / &scale) - &d;
            if !eps.at_least(&over) {
                return Ok(false);
            }
            let under = &d - &(&Rational::from(min_e as usize) / &scale);
            if !eps.at_least(&under) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Degree and codegree thresholds of the good-pair criterion, as integer
/// cutoffs: deg must be >= `deg_min`, codegree <= `codeg_max`.
fn good_pair_cutoffs(d_ref: &Rational, eps: &Rational, size_b: usize) -> (i64, i64) {
    let b = Rational::from(size_b);
    let deg_min = strict_above(&(&(d_ref - eps) * &b));
    let codeg_max = strict_below(&(&(d_ref + eps).pow(2) * &b));
    (deg_min, codeg_max)
}

/// Counts ordered pairs (x,x'), diagonal included, whose degrees exceed
/// (d_ref-eps)|B| and whose codegree stays below (d_ref+eps)^2|B|.
fn good_pair_count(rows: &[BitSet], d_ref: &Rational, eps: &Rational, size_b: usize) -> usize {
    let (deg_min, codeg_max) = good_pair_cutoffs(d_ref, eps, size_b);
    if codeg_max < 0 {
        return 0;
    }
    let good: Vec<usize> = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.count() as i64 >= deg_min)
        .map(|(i, _)| i)
        .collect();
    let mut count = 0usize;
    for &i in &good {
        for &j in &good {
            let codeg = rows[i].intersection_count(&rows[j]);
            if (codeg as i64) <= codeg_max {
                count += 1;
            }
        }
    }
    count
}

/// The certification threshold on the good-pair count and whether the
/// refined variant applies at these parameters.
fn kr_threshold(d: &Rational, eps: &Rational, size_a: usize) -> (Rational, bool) {
    let sq = Rational::from(size_a * size_a);
    let four_eps = &Rational::from_integer(4) * eps;
    let refined = eps <= &Rational::new(1, 9)
        && &four_eps <= d
        && d <= &(&Rational::one() - &four_eps);
    let slack = if refined {
        &Rational::from_integer(5) * eps
    } else {
        &Rational::new(9, 2) * eps
    };
    (&(&Rational::one() - &slack) * &sq, refined)
}

/// Good-pair certification: if enough ordered pairs of A-vertices have
/// near-average degree and codegree into B, the pair is (16 eps)^(1/5)-
/// regular. Returns `None` when the count falls short: inconclusive, not
/// a disproof.
pub fn kr_certificate(
    pair: &BipartitePair<'_>,
    eps: &Rational,
) -> Result<Option<RegularityCertificate>, RegularityError> {
    if !eps.is_positive() || eps >= &Rational::one() {
        return Err(RegularityError::BadParameter("eps must lie in (0,1)"));
    }
    let needed = &Rational::from_integer(2) / eps;
    if Rational::from(pair.a.len()) < needed {
        return Err(RegularityError::KrPrecondition {
            size: pair.a.len(),
            needed,
        });
    }
    let d = density(pair);
    let rows = pair.compact_rows();
    let p = good_pair_count(&rows, &d, eps, pair.b.len());
    let (threshold, refined) = kr_threshold(&d, eps, pair.a.len());
    if Rational::from(p) > threshold {
        Ok(Some(RegularityCertificate {
            kind: CertificateKind::KrGoodPairs {
                good_pairs: p,
                refined,
            },
            epsilon: EpsParam::fifth_root(&Rational::from_integer(16) * eps),
            density_window: Some(DensityWindow::point(d)),
        }))
    } else {
        Ok(None)
    }
}

/// Exhaustive super-regularity: every qualifying subset pair has density at
/// least `delta`, and every vertex meets the `delta` degree floor on the
/// opposite side.
pub fn is_super_regular(
    pair: &BipartitePair<'_>,
    eps: &EpsParam,
    delta: &Rational,
) -> Result<bool, RegularityError> {
    if !degree_floors_hold(pair, delta) {
        return Ok(false);
    }
    let (na, nb) = (pair.a.len(), pair.b.len());
    for &size in &[na, nb] {
        if size > EXACT_CHECK_CAP {
            return Err(RegularityError::TooLargeForExact {
                size,
                cap: EXACT_CHECK_CAP,
            });
        }
    }
    let masks: Vec<u16> = pair
        .b
        .iter()
        .map(|&y| {
            let mut m = 0u16;
            for (t, &x) in pair.a.iter().enumerate() {
                if pair.host.has_edge(x, y) {
                    m |= 1 << t;
                }
            }
            m
        })
        .collect();
    let min_x = min_qualifying_size(na, eps);
    let min_y = min_qualifying_size(nb, eps);
    let mut degs = vec![0u32; nb];
    for xmask in 1u32..(1u32 << na) {
        let xsize = xmask.count_ones() as usize;
        if xsize < min_x {
            continue;
        }
        for (i, m) in masks.iter().enumerate() {
            degs[i] = (xmask & *m as u32).count_ones();
        }
        degs.sort_unstable();
        let mut acc = 0u64;
        for t in 1..=nb {
            acc += degs[t - 1] as u64;
            if t < min_y {
                continue;
            }
            // smallest density over size-t subsets
            let min_d = &Rational::from(acc as usize) / &Rational::from(xsize * t);
            if &min_d < delta {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn degree_floors_hold(pair: &BipartitePair<'_>, delta: &Rational) -> bool {
    let floor_b = delta * &Rational::from(pair.b.len());
    if pair
        .a
        .iter()
        .any(|&v| Rational::from(pair.deg_into_b(v)) < floor_b)
    {
        return false;
    }
    let mut a_mask = BitSet::new(pair.host.total_vertices());
    for &v in &pair.a {
        a_mask.insert(pair.host.id(v));
    }
    let floor_a = delta * &Rational::from(pair.a.len());
    !pair.b.iter().any(|&v| {
        Rational::from(pair.host.adjacency_row(v).intersection_count(&a_mask)) < floor_a
    })
}

/// Super-regularity via a certificate instead of exhaustion: the density
/// clause holds whenever the certified parameter is at most d - delta,
/// since qualifying subsets then cannot dip below delta. Degree floors are
/// still checked exactly.
pub fn is_super_regular_certified(
    pair: &BipartitePair<'_>,
    cert: &RegularityCertificate,
    delta: &Rational,
) -> bool {
    let d = density(pair);
    cert.epsilon.at_most(&(&d - delta)) && degree_floors_hold(pair, delta)
}

/// Derives the regularity of sub-pairs keeping at least an alpha fraction
/// per side: the parameter becomes max{2 eps, eps/alpha} and the density
/// stays within eps of the parent's.
pub fn slice_certificate(
    parent: &RegularityCertificate,
    alpha: &Rational,
    d: &Rational,
) -> Result<RegularityCertificate, RegularityError> {
    if !alpha.is_positive() || alpha >= &Rational::one() {
        return Err(RegularityError::Hypothesis("alpha must lie in (0,1)"));
    }
    if parent.epsilon.at_most(&Rational::zero()) {
        return Err(RegularityError::Hypothesis("eps must be positive"));
    }
    if parent.epsilon.at_least(alpha) {
        return Err(RegularityError::Hypothesis("eps must be below alpha"));
    }
    let eps0 = parent
        .epsilon
        .scale(&Rational::from_integer(2))
        .max(parent.epsilon.scale(&alpha.recip()));
    if !eps0.at_most(d) {
        return Err(RegularityError::Hypothesis("d must be at least max{2eps, eps/alpha}"));
    }
    if !eps0.at_most(&(&Rational::one() - d)) {
        return Err(RegularityError::Hypothesis(
            "1 - d must be at least max{2eps, eps/alpha}",
        ));
    }
    let radius = parent.epsilon.rational_upper_bound();
    Ok(RegularityCertificate {
        kind: CertificateKind::SlicingDerived {
            parent: Box::new(parent.clone()),
            alpha: alpha.clone(),
        },
        epsilon: eps0,
        density_window: Some(DensityWindow::around(d, &radius)),
    })
}

/// Result of trimming a regular k-tuple down to its high-degree core.
#[derive(Debug, Clone)]
pub struct SuperSlice {
    pub subsets: Vec<Vec<VertexRef>>,
    /// h * ceil((1-(k-1)eps')L'/h), the size the construction aims for.
    pub stated_target: usize,
    /// The size actually used; stepped down in h-steps when survivors fall
    /// short of the stated target.
    pub actual_target: usize,
    pub discarded: Vec<usize>,
}

/// Discards, in each cluster, every vertex whose degree into some other
/// cluster falls below (d'-eps')L', then trims to a common size divisible
/// by h. On pairwise eps'-regular clusters of density at least d' the
/// outputs are pairwise (2 eps', d'-k eps')-super-regular.
pub fn super_slice(
    host: &KPartiteGraph,
    clusters: &[Vec<VertexRef>],
    eps_prime: &Rational,
    d_prime: &Rational,
    h: usize,
) -> Result<SuperSlice, RegularityError> {
    let k = clusters.len();
    if k < 2 {
        return Err(RegularityError::BadParameter("need at least two clusters"));
    }
    if h == 0 {
        return Err(RegularityError::BadParameter("tile height must be positive"));
    }
    let l_prime = clusters[0].len();
    if l_prime == 0 || clusters.iter().any(|c| c.len() != l_prime) {
        return Err(RegularityError::UnbalancedClusters("equal nonempty sizes required"));
    }
    if !eps_prime.is_positive() {
        return Err(RegularityError::Hypothesis("eps' must be positive"));
    }
    let cap = d_prime / &Rational::from_integer(2 * (k + 1) as i64);
    if eps_prime >= &cap {
        return Err(RegularityError::Hypothesis("eps' must be below d'/(2(k+1))"));
    }
    let masks: Vec<BitSet> = clusters
        .iter()
        .map(|c| {
            let mut m = BitSet::new(host.total_vertices());
            for &v in c {
                m.insert(host.id(v));
            }
            m
        })
        .collect();
    // keep v iff deg(v, A_j) >= (d'-eps')L' into every other cluster
    let deg_floor = int_ceil(&(&(d_prime - eps_prime) * &Rational::from(l_prime)));
    let allowed = (&(&Rational::from(k - 1) * eps_prime) * &Rational::from(l_prime))
        .floor_usize()
        .unwrap_or(0);
    let mut survivors: Vec<Vec<VertexRef>> = Vec::with_capacity(k);
    let mut discarded = Vec::with_capacity(k);
    for (i, cluster) in clusters.iter().enumerate() {
        let mut keep = Vec::with_capacity(l_prime);
        for &v in cluster {
            let low = (0..k).any(|j| {
                j != i && (host.adjacency_row(v).intersection_count(&masks[j]) as i64) < deg_floor
            });
            if !low {
                keep.push(v);
            }
        }
        let dropped = l_prime - keep.len();
        if dropped > allowed {
            return Err(RegularityError::DiscardOverflow {
                cluster: i + 1,
                discarded: dropped,
                allowed,
            });
        }
        keep.sort();
        survivors.push(keep);
        discarded.push(dropped);
    }
    let frac =
        &(&Rational::one() - &(&Rational::from(k - 1) * eps_prime)) * &Rational::from(l_prime);
    let per_h = (&frac / &Rational::from(h)).ceil_usize().expect("positive");
    let stated_target = h * per_h;
    let min_survivors = survivors.iter().map(|s| s.len()).min().unwrap_or(0);
    let mut actual_target = stated_target;
    while actual_target > min_survivors {
        actual_target -= h.min(actual_target);
    }
    for s in &mut survivors {
        s.truncate(actual_target);
    }
    Ok(SuperSlice {
        subsets: survivors,
        stated_target,
        actual_target,
        discarded,
    })
}

/// Verifies the augmented-pair conclusion: after adding at most eps2|A| and
/// eps2|B| vertices that meet the delta2 degree floor into the original
/// sides, the pair must be (eps1+eps2, min{delta1,delta2}/(1+eps2)^2)-
/// super-regular. Density checks are exhaustive, so the augmented pair must
/// fit the exact-check cap.
pub fn augment_super_regular_check(
    before: &BipartitePair<'_>,
    after: &BipartitePair<'_>,
    eps1: &Rational,
    delta1: &Rational,
    eps2: &Rational,
    delta2: &Rational,
) -> Result<bool, RegularityError> {
    for (side, old, new) in [('A', &before.a, &after.a), ('B', &before.b, &after.b)] {
        if old.iter().any(|v| !new.contains(v)) {
            return Err(RegularityError::NotSuperset { side });
        }
        let added = new.len() - old.len();
        if Rational::from(added) > eps2 * &Rational::from(old.len()) {
            return Err(RegularityError::TooManyAdded { side });
        }
    }
    // each added vertex needs delta2 * (original opposite side) neighbors
    // into the original opposite side
    let floor_b = delta2 * &Rational::from(before.b.len());
    for &v in after.a.iter().filter(|v| !before.a.contains(v)) {
        if Rational::from(before.deg_into_b(v)) < floor_b {
            return Err(RegularityError::AddedDegreeLow { v });
        }
    }
    let mut a_mask = BitSet::new(before.host.total_vertices());
    for &v in &before.a {
        a_mask.insert(before.host.id(v));
    }
    let floor_a = delta2 * &Rational::from(before.a.len());
    for &v in after.b.iter().filter(|v| !before.b.contains(v)) {
        let deg = before.host.adjacency_row(v).intersection_count(&a_mask);
        if Rational::from(deg) < floor_a {
            return Err(RegularityError::AddedDegreeLow { v });
        }
    }
    let eps0 = EpsParam::Exact(eps1 + eps2);
    let delta0 = &delta1.clone().min(delta2.clone()) / &(&Rational::one() + eps2).pow(2);
    is_super_regular(after, &eps0, &delta0)
}

/// The martingale failure bounds for random slicing: the single-set bound
/// exp{-eps^2 L'^2/(2L)} and the aggregate 8m exp{-9 eps^4 L'^2/(2L)}.
/// Exponents are exact; the exponentials are evaluated in f64 (relative
/// error around 1e-15, dwarfed by the bounds' own slack).
#[derive(Debug, Clone)]
pub struct AzumaBound {
    pub single_exponent: Rational,
    pub aggregate_exponent: Rational,
    pub single: f64,
    pub aggregate: f64,
}

pub fn azuma_slice_bound(eps: &Rational, l: usize, l_prime: usize, m: usize) -> AzumaBound {
    let l2 = Rational::from(l_prime * l_prime);
    let two_l = Rational::from(2 * l);
    let single_exponent = &(&eps.pow(2) * &l2) / &two_l;
    let aggregate_exponent = &(&(&Rational::from_integer(9) * &eps.pow(4)) * &l2) / &two_l;
    let single = libm::exp(-single_exponent.to_f64());
    let aggregate = 8.0 * m as f64 * libm::exp(-aggregate_exponent.to_f64());
    AzumaBound {
        single_exponent,
        aggregate_exponent,
        single,
        aggregate,
    }
}

/// A bipartite graph on two parts of `l` vertices where each cross edge
/// appears independently with probability `d`. Deterministic per seed.
pub fn random_bipartite_graph(
    l: usize,
    d: &Rational,
    seed: u64,
) -> Result<KPartiteGraph, RegularityError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_bipartite_with(&mut rng, l, d)
}

fn random_bipartite_with(
    rng: &mut ChaCha8Rng,
    l: usize,
    d: &Rational,
) -> Result<KPartiteGraph, RegularityError> {
    if d.is_negative() || d > &Rational::one() {
        return Err(RegularityError::BadParameter("density must lie in [0,1]"));
    }
    let numer = d
        .numer_big()
        .to_u32()
        .ok_or(RegularityError::BadParameter("density numerator too large"))?;
    let denom = d
        .denom_big()
        .to_u32()
        .ok_or(RegularityError::BadParameter("density denominator too large"))?;
    let mut g = KPartiteGraph::edgeless(2, l)
        .map_err(|_| RegularityError::BadParameter("side too large"))?;
    for a in 1..=l {
        for b in 1..=l {
            if numer > 0 && rng.gen_ratio(numer, denom) {
                g.add_edge(VertexRef::new(1, a), VertexRef::new(2, b))
                    .expect("cross edge in range");
            }
        }
    }
    Ok(g)
}

/// One experiment trial: block-level failures and the worst good-pair
/// count over all block pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlicingTrialRow {
    pub trial: usize,
    pub failures: usize,
    pub good_pair_min: usize,
}

#[derive(Debug, Clone)]
pub struct SlicingReport {
    pub rows: Vec<SlicingTrialRow>,
    pub trials: usize,
    pub failed_trials: usize,
    /// Blocks need at least this many good pairs: (1-8 eps) L'^2.
    pub good_pair_threshold: Rational,
    pub bound: AzumaBound,
    /// Whether (d, eps) sit inside the regime the failure bound covers:
    /// 0 < d < 1/3, eps < d/4, eps <= 1/3. Trials run either way.
    pub in_bound_regime: bool,
}

impl SlicingReport {
    pub fn failure_rate(&self) -> Rational {
        if self.trials == 0 {
            Rational::zero()
        } else {
            &Rational::from(self.failed_trials) / &Rational::from(self.trials)
        }
    }
}

/// Monte Carlo check of random slicing: per trial, sample a density-d
/// bipartite graph on L+L vertices, randomly equipartition both sides into
/// blocks of L', and demand of every block pair a good-pair certificate at
/// eps, enough ambient-threshold good pairs, and density at least d(X,Y)-eps.
/// Trial seeds are `seed + trial`, so trials are independently reproducible.
pub fn random_slicing_experiment(
    l: usize,
    l_prime: usize,
    d: &Rational,
    eps: &Rational,
    trials: usize,
    seed: u64,
) -> Result<SlicingReport, RegularityError> {
    if l_prime == 0 || l % l_prime != 0 {
        return Err(RegularityError::BadParameter("block size must divide side size"));
    }
    if !eps.is_positive() || eps >= &Rational::one() {
        return Err(RegularityError::BadParameter("eps must lie in (0,1)"));
    }
    let needed = &Rational::from_integer(2) / eps;
    if Rational::from(l_prime) < needed {
        return Err(RegularityError::KrPrecondition {
            size: l_prime,
            needed,
        });
    }
    let m = l / l_prime;
    let sq = Rational::from(l_prime * l_prime);
    let good_pair_threshold =
        &(&Rational::one() - &(&Rational::from_integer(8) * eps)) * &sq;
    let two_eps = &Rational::from_integer(2) * eps;
    let mut rows = Vec::with_capacity(trials);
    let mut failed_trials = 0usize;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
        let g = random_bipartite_with(&mut rng, l, d)?;
        let blocks_a = random_blocks(&mut rng, &g, 1, m, l_prime);
        let blocks_b = random_blocks(&mut rng, &g, 2, m, l_prime);
        let ambient = &Rational::from(g.edge_count()) / &Rational::from(l * l);
        let mut failures = 0usize;
        let mut good_pair_min = usize::MAX;
        for block_a in &blocks_a {
            for block_b in &blocks_b {
                let pair = BipartitePair::new(&g, block_a.clone(), block_b.clone())
                    .expect("blocks are disjoint");
                let rows_compact = pair.compact_rows();
                let d_block =
                    &Rational::from(rows_compact.iter().map(|r| r.count()).sum::<usize>()) / &sq;
                // certificate at the pair's own density
                let p_own = good_pair_count(&rows_compact, &d_block, eps, l_prime);
                let (threshold, _) = kr_threshold(&d_block, eps, l_prime);
                let certified = Rational::from(p_own) > threshold;
                // goodness inherited from the ambient pair, at doubled eps
                let p_ambient = good_pair_count(&rows_compact, &ambient, &two_eps, l_prime);
                good_pair_min = good_pair_min.min(p_ambient);
                let enough_good = Rational::from(p_ambient) >= good_pair_threshold;
                let dense_enough = d_block >= &ambient - eps;
                if !(certified && enough_good && dense_enough) {
                    failures += 1;
                }
            }
        }
        if failures > 0 {
            failed_trials += 1;
        }
        rows.push(SlicingTrialRow {
            trial,
            failures,
            good_pair_min,
        });
    }
    let third = Rational::new(1, 3);
    let in_bound_regime = d.is_positive()
        && d < &third
        && eps < &(d / &Rational::from_integer(4))
        && eps <= &third;
    Ok(SlicingReport {
        rows,
        trials,
        failed_trials,
        good_pair_threshold,
        bound: azuma_slice_bound(eps, l, l_prime, m),
        in_bound_regime,
    })
}

fn random_blocks(
    rng: &mut ChaCha8Rng,
    g: &KPartiteGraph,
    part: usize,
    m: usize,
    l_prime: usize,
) -> Vec<Vec<VertexRef>> {
    let mut indices: Vec<usize> = (1..=g.n()).collect();
    indices.shuffle(rng);
    (0..m)
        .map(|i| {
            let mut block: Vec<VertexRef> = indices[i * l_prime..(i + 1) * l_prime]
                .iter()
                .map(|&idx| VertexRef::new(part, idx))
                .collect();
            block.sort();
            block
        })
        .collect()
}

/// Cluster assignment for reduced-graph construction: `clusters[i]` lists
/// the clusters of part i+1. Vertices left out of every cluster are
/// leftover and ignored.
#[derive(Debug, Clone)]
pub struct ClusterPartition {
    pub clusters: Vec<Vec<Vec<VertexRef>>>,
}

/// Contracts clusters to vertices: clusters are adjacent iff their pair has
/// density above `d` and certifies regular at `eps`: exhaustively when the
/// clusters fit the exact cap, otherwise through a good-pair certificate at
/// eps^5/16 (whose guaranteed parameter is then exactly eps). Pairs that
/// cannot be certified get no edge.
pub fn reduced_graph(
    g: &KPartiteGraph,
    partition: &ClusterPartition,
    eps: &Rational,
    d: &Rational,
) -> Result<KPartiteGraph, RegularityError> {
    if partition.clusters.len() != g.k() {
        return Err(RegularityError::UnbalancedClusters("one cluster list per part"));
    }
    let ell = partition.clusters[0].len();
    if ell == 0 || partition.clusters.iter().any(|c| c.len() != ell) {
        return Err(RegularityError::UnbalancedClusters(
            "equal cluster counts per part",
        ));
    }
    let l_prime = partition.clusters[0][0].len();
    if l_prime == 0 {
        return Err(RegularityError::UnbalancedClusters("clusters must be nonempty"));
    }
    let mut seen = BitSet::new(g.total_vertices());
    for (i, part_clusters) in partition.clusters.iter().enumerate() {
        for cluster in part_clusters {
            if cluster.len() != l_prime {
                return Err(RegularityError::UnbalancedClusters("equal cluster sizes"));
            }
            for &v in cluster {
                if v.part != i + 1 || v.index == 0 || v.index > g.n() {
                    return Err(RegularityError::OutOfRange { v });
                }
                let id = g.id(v);
                if seen.contains(id) {
                    return Err(RegularityError::DuplicateVertex { v });
                }
                seen.insert(id);
            }
        }
    }
    let eps_quint = &eps.pow(5) / &Rational::from_integer(16);
    let mut out = KPartiteGraph::edgeless(g.k(), ell)
        .map_err(|_| RegularityError::BadParameter("too many clusters"))?;
    for i in 1..=g.k() {
        for j in (i + 1)..=g.k() {
            for (s, cs) in partition.clusters[i - 1].iter().enumerate() {
                for (t, ct) in partition.clusters[j - 1].iter().enumerate() {
                    let pair = BipartitePair::new(g, cs.clone(), ct.clone())?;
                    if &density(&pair) <= d {
                        continue;
                    }
                    let regular = if l_prime <= EXACT_CHECK_CAP {
                        is_regular_exact(&pair, &EpsParam::Exact(eps.clone()))?
                    } else {
                        matches!(kr_certificate(&pair, &eps_quint), Ok(Some(_)))
                    };
                    if regular {
                        out.add_edge(VertexRef::new(i, s + 1), VertexRef::new(j, t + 1))
                            .expect("cluster vertices in range");
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Result of the greedy embedder: either `h` vertices per cluster forming a
/// complete multipartite subgraph, or the slot that ran out of candidates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbedOutcome {
    Embedded(Vec<Vec<VertexRef>>),
    /// 1-based cluster and copy number of the first unfillable slot.
    Stuck { cluster: usize, copy: usize },
}

/// Greedily picks h vertices per cluster, pairwise adjacent across
/// clusters: always fills the cluster with the fewest candidates, choosing
/// the vertex that keeps the worst other cluster's candidate set largest.
/// Deterministic; ties break toward lower vertex ids.
pub fn greedy_embed_khk(
    host: &KPartiteGraph,
    clusters: &[Vec<VertexRef>],
    h: usize,
) -> EmbedOutcome {
    let k = clusters.len();
    let mut cand: Vec<BitSet> = clusters
        .iter()
        .map(|c| {
            let mut m = BitSet::new(host.total_vertices());
            for &v in c {
                m.insert(host.id(v));
            }
            m
        })
        .collect();
    let mut need = vec![h; k];
    let mut placed: Vec<Vec<VertexRef>> = vec![Vec::with_capacity(h); k];
    for _ in 0..k * h {
        let c = (0..k)
            .filter(|&c| need[c] > 0)
            .min_by_key(|&c| (cand[c].count(), c))
            .expect("unfilled cluster remains");
        if cand[c].count() < need[c] {
            return EmbedOutcome::Stuck {
                cluster: c + 1,
                copy: placed[c].len() + 1,
            };
        }
        let mut best: Option<(usize, usize)> = None; // (score, id)
        for id in cand[c].iter() {
            let row = host.adjacency_row_id(id);
            let score = (0..k)
                .filter(|&o| o != c && need[o] > 0)
                .map(|o| cand[o].intersection_count(row))
                .min()
                .unwrap_or(usize::MAX);
            match best {
                Some((s, _)) if s >= score => {}
                _ => best = Some((score, id)),
            }
        }
        let (_, id) = best.expect("candidate set is nonempty");
        let v = host.vertex(id);
        placed[c].push(v);
        need[c] -= 1;
        cand[c].remove(id);
        let row = host.adjacency_row_id(id);
        for o in 0..k {
            if o != c && need[o] > 0 {
                cand[o].intersect_with(row);
            }
        }
    }
    for p in &mut placed {
        p.sort();
    }
    EmbedOutcome::Embedded(placed)
}
