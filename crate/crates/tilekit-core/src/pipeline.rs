//! Column-level machinery over a reduced graph: reachability swaps, the
//! "belongs" predicate with leftover assignment, and the auxiliary-graph
//! balancing step that equalizes non-red cluster counts through an exact
//! fractional tiling.
//!
//! Everything here is ledger arithmetic over cluster counts; no vertex-level
//! re-embedding happens. The one graph built is the auxiliary blow-up, whose
//! tiling certifies that the planned removals decompose into clique tiles.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::ToPrimitive;

use crate::fractional::{common_denominator, fractional_tiling_number, FracError};
use crate::graph::{KPartiteGraph, VertexRef};
use crate::rational::Rational;
use crate::regularity::ClusterPartition;
use crate::tiling::{tiling_from_fractional, Tiling, TilingError};

#[derive(Debug, Clone)]
pub enum PipelineError {
    BadColumns(&'static str),
    /// The clusters sharing this column do not form a clique in the
    /// reduced graph.
    ColumnNotClique { column: usize },
    BadParameter(&'static str),
    /// A stated hypothesis does not hold for the supplied instance.
    Precondition(&'static str),
    /// A consequence the construction guarantees failed to materialize;
    /// always a bug, never an input problem.
    Internal(&'static str),
    /// The vertex belongs in fewer non-receptacle columns than the
    /// assignment argument requires.
    TooFewBelonging { v: VertexRef, count: usize },
    LeftoverTooLarge { part: usize, size: usize },
    /// Non-red count outside the open window the balancing step assumes.
    NuOutOfRange { part: usize, column: usize, nu: usize },
    UnequalPartTotals,
    /// An auxiliary vertex sees less than a (k-1)/k share of some other
    /// part, so the full fractional tiling is not guaranteed.
    DegreeRatio { part: usize, column: usize },
    /// Rounding cannot balance the auxiliary part sizes.
    Unbalanceable { part: usize },
    EmptyAuxiliary,
    RemovalExceedsUncolored { part: usize, column: usize },
    /// A cluster cannot reach the prescribed non-red target.
    BelowTarget { part: usize, column: usize, nonred: usize },
    LeftoverBound { part: usize, size: usize },
    LedgerShape(&'static str),
    Frac(FracError),
    Tiling(TilingError),
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::BadColumns(m) => write!(f, "bad column structure: {}", m),
            PipelineError::ColumnNotClique { column } => {
                write!(f, "column {} is not a clique in the reduced graph", column)
            }
            PipelineError::BadParameter(m) => write!(f, "bad parameter: {}", m),
            PipelineError::Precondition(m) => write!(f, "hypothesis failed: {}", m),
            PipelineError::Internal(m) => write!(f, "internal invariant violated: {}", m),
            PipelineError::TooFewBelonging { v, count } => {
                write!(f, "vertex {} belongs in only {} columns", v, count)
            }
            PipelineError::LeftoverTooLarge { part, size } => {
                write!(f, "leftover set of part {} has {} vertices, above the cap", part, size)
            }
            PipelineError::NuOutOfRange { part, column, nu } => write!(
                f,
                "cluster (part {}, column {}) has {} non-red vertices, outside the window",
                part, column, nu
            ),
            PipelineError::UnequalPartTotals => {
                write!(f, "non-red totals differ between parts")
            }
            PipelineError::DegreeRatio { part, column } => write!(
                f,
                "auxiliary copies of (part {}, column {}) miss the (k-1)/k degree share",
                part, column
            ),
            PipelineError::Unbalanceable { part } => {
                write!(f, "part {} lacks round-up candidates to balance", part)
            }
            PipelineError::EmptyAuxiliary => write!(f, "auxiliary graph has no vertices"),
            PipelineError::RemovalExceedsUncolored { part, column } => write!(
                f,
                "removal from (part {}, column {}) exceeds its uncolored vertices",
                part, column
            ),
            PipelineError::BelowTarget { part, column, nonred } => write!(
                f,
                "cluster (part {}, column {}) lands at {} non-red vertices, below the target",
                part, column, nonred
            ),
            PipelineError::LeftoverBound { part, size } => {
                write!(f, "new leftover of part {} has {} vertices, above the bound", part, size)
            }
            PipelineError::LedgerShape(m) => write!(f, "ledger shape: {}", m),
            PipelineError::Frac(e) => write!(f, "tiling number: {}", e),
            PipelineError::Tiling(e) => write!(f, "tiling: {}", e),
        }
    }
}

/// A reduced graph together with a partition of its cluster-vertices into
/// columns: transversal cliques, one cluster per part, with column 1 the
/// receptacle.
#[derive(Debug, Clone)]
pub struct ColumnStructure {
    reduced: KPartiteGraph,
    /// columns[c][i] = 1-based cluster index of part i+1 in column c+1.
    columns: Vec<Vec<usize>>,
}

impl ColumnStructure {
    pub fn new(
        reduced: KPartiteGraph,
        columns: Vec<Vec<usize>>,
    ) -> Result<Self, PipelineError> {
        let (k, ell) = (reduced.k(), reduced.n());
        if columns.len() != ell {
            return Err(PipelineError::BadColumns("one column per cluster index"));
        }
        let mut seen = vec![false; k * ell];
        for (c, column) in columns.iter().enumerate() {
            if column.len() != k {
                return Err(PipelineError::BadColumns("one cluster per part in each column"));
            }
            for (i, &cluster) in column.iter().enumerate() {
                if cluster == 0 || cluster > ell {
                    return Err(PipelineError::BadColumns("cluster index out of range"));
                }
                let slot = i * ell + cluster - 1;
                if seen[slot] {
                    return Err(PipelineError::BadColumns("cluster repeated across columns"));
                }
                seen[slot] = true;
            }
            for i in 0..k {
                for t in (i + 1)..k {
                    let u = VertexRef::new(i + 1, column[i]);
                    let w = VertexRef::new(t + 1, column[t]);
                    if !reduced.has_edge(u, w) {
                        return Err(PipelineError::ColumnNotClique { column: c + 1 });
                    }
                }
            }
        }
        Ok(ColumnStructure { reduced, columns })
    }

    /// Columns from a perfect clique tiling of the reduced graph, in tile
    /// order: the first tile becomes the receptacle column.
    pub fn from_tiling(reduced: KPartiteGraph, tiling: &Tiling) -> Result<Self, PipelineError> {
        if tiling.h != 1 {
            return Err(PipelineError::BadColumns("column tiling must have h = 1"));
        }
        let columns = tiling
            .tiles
            .iter()
            .map(|tile| tile.parts.iter().map(|p| p[0].index).collect())
            .collect();
        ColumnStructure::new(reduced, columns)
    }

    pub fn reduced(&self) -> &KPartiteGraph {
        &self.reduced
    }

    /// Number of columns, equal to the cluster count per part.
    pub fn ell(&self) -> usize {
        self.columns.len()
    }

    /// 1-based cluster index of `part` in column `j`.
    pub fn cluster_in_column(&self, part: usize, j: usize) -> usize {
        self.columns[j - 1][part - 1]
    }

    /// 1-based column containing the given cluster-vertex.
    pub fn column_of(&self, v: VertexRef) -> usize {
        self.columns
            .iter()
            .position(|col| col[v.part - 1] == v.index)
            .expect("cluster appears in exactly one column")
            + 1
    }
}

/// Per-cluster vertex counts by color class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterCounts {
    pub total: usize,
    pub red: usize,
    pub blue: usize,
}

impl ClusterCounts {
    pub fn uncolored(&self) -> usize {
        self.total - self.red - self.blue
    }

    pub fn non_red(&self) -> usize {
        self.total - self.red
    }
}

/// Parameters the ledger arithmetic runs under. `n` is the host graph's
/// per-part size, used only in the leftover bounds.
#[derive(Debug, Clone)]
pub struct LedgerParams {
    pub l_prime: usize,
    pub h: usize,
    pub d_prime: Rational,
    pub eps_prime: Rational,
    pub gamma: Rational,
    pub zeta: Rational,
    pub d0: u64,
    pub n: usize,
}

/// Bookkeeping for the cluster decomposition: per-cluster color counts and
/// per-part leftover sizes, plus the governing parameters.
#[derive(Debug, Clone)]
pub struct ClusterLedger {
    pub params: LedgerParams,
    /// counts[part-1][cluster-1]
    pub counts: Vec<Vec<ClusterCounts>>,
    pub leftover: Vec<usize>,
}

impl ClusterLedger {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let p = &self.params;
        if p.l_prime == 0 || p.h == 0 || p.d0 == 0 || p.n == 0 {
            return Err(PipelineError::BadParameter("sizes must be positive"));
        }
        for (r, name) in [
            (&p.d_prime, "d' must lie in (0,1)"),
            (&p.gamma, "gamma must lie in (0,1)"),
            (&p.zeta, "zeta must lie in (0,1)"),
        ] {
            if !r.is_positive() || r >= &Rational::one() {
                return Err(PipelineError::BadParameter(name));
            }
        }
        if !p.eps_prime.is_positive() {
            return Err(PipelineError::BadParameter("eps' must be positive"));
        }
        let k = self.counts.len();
        if k < 2 {
            return Err(PipelineError::LedgerShape("need at least two parts"));
        }
        let ell = self.counts[0].len();
        if ell == 0 || self.counts.iter().any(|c| c.len() != ell) {
            return Err(PipelineError::LedgerShape("equal cluster counts per part"));
        }
        if self.leftover.len() != k {
            return Err(PipelineError::LedgerShape("one leftover size per part"));
        }
        for (i, row) in self.counts.iter().enumerate() {
            for c in row {
                if c.red + c.blue > c.total {
                    return Err(PipelineError::LedgerShape("color counts exceed the total"));
                }
            }
            // declared bound on the initial leftover sets
            let cap = &(&Rational::from(k) * &p.eps_prime) * &Rational::from(p.n);
            if Rational::from(self.leftover[i]) > cap {
                return Err(PipelineError::LeftoverTooLarge {
                    part: i + 1,
                    size: self.leftover[i],
                });
            }
        }
        Ok(())
    }
}

fn check_shapes(cs: &ColumnStructure, ledger: &ClusterLedger) -> Result<(), PipelineError> {
    ledger.validate()?;
    if ledger.counts.len() != cs.reduced.k() {
        return Err(PipelineError::LedgerShape("one count row per part"));
    }
    if ledger.counts[0].len() != cs.ell() {
        return Err(PipelineError::LedgerShape("one count per cluster"));
    }
    Ok(())
}

/// Two transversal cliques whose symmetric difference swaps the part-`i`
/// cluster of the receptacle column for that of column `j`: T1 contains
/// the receptacle's cluster, T2 column j's, and they share everything
/// else, drawn from columns other than 1 and j. Greedy and deterministic;
/// the postconditions are re-verified on every call.
pub fn reach(
    cs: &ColumnStructure,
    i: usize,
    j: usize,
) -> Result<(Vec<VertexRef>, Vec<VertexRef>), PipelineError> {
    let (k, ell) = (cs.reduced.k(), cs.ell());
    if i == 0 || i > k {
        return Err(PipelineError::BadParameter("part out of range"));
    }
    if j < 2 || j > ell {
        return Err(PipelineError::BadParameter("column must be 2..=l'"));
    }
    // delta-hat(G_r') >= (k-1) l'/k + 2
    let needed = &(&Rational::from((k - 1) * ell) / &Rational::from(k))
        + &Rational::from_integer(2);
    if Rational::from(cs.reduced.delta_hat()) < needed {
        return Err(PipelineError::Precondition(
            "reachability needs delta-hat >= (k-1) l'/k + 2",
        ));
    }
    let u1 = VertexRef::new(i, cs.cluster_in_column(i, 1));
    let uj = VertexRef::new(i, cs.cluster_in_column(i, j));
    let mut shared: Vec<VertexRef> = Vec::with_capacity(k - 1);
    for t in 1..=k {
        if t == i {
            continue;
        }
        let avoid = [cs.cluster_in_column(t, 1), cs.cluster_in_column(t, j)];
        let w = (1..=ell)
            .map(|c| VertexRef::new(t, c))
            .find(|&w| {
                !avoid.contains(&w.index)
                    && cs.reduced.has_edge(u1, w)
                    && cs.reduced.has_edge(uj, w)
                    && shared.iter().all(|&p| cs.reduced.has_edge(p, w))
            })
            .ok_or(PipelineError::Internal(
                "reachability greedy ran out of candidates",
            ))?;
        shared.push(w);
    }
    let mut t1 = shared.clone();
    t1.push(u1);
    t1.sort();
    let mut t2 = shared;
    t2.push(uj);
    t2.sort();
    verify_reach(cs, j, u1, uj, &t1, &t2)?;
    Ok((t1, t2))
}

fn verify_reach(
    cs: &ColumnStructure,
    j: usize,
    u1: VertexRef,
    uj: VertexRef,
    t1: &[VertexRef],
    t2: &[VertexRef],
) -> Result<(), PipelineError> {
    for t in [t1, t2] {
        for (a, &x) in t.iter().enumerate() {
            for &y in t.iter().skip(a + 1) {
                if x.part != y.part && !cs.reduced.has_edge(x, y) {
                    return Err(PipelineError::Internal("reach output is not a clique"));
                }
            }
        }
    }
    let only_in = |a: &[VertexRef], b: &[VertexRef]| -> Vec<VertexRef> {
        a.iter().filter(|v| !b.contains(v)).copied().collect()
    };
    if only_in(t1, t2) != [u1] || only_in(t2, t1) != [uj] {
        return Err(PipelineError::Internal("reach symmetric difference is wrong"));
    }
    for &v in t1.iter().chain(t2.iter()) {
        if v == u1 || v == uj {
            continue;
        }
        if v.index == cs.cluster_in_column(v.part, 1) || v.index == cs.cluster_in_column(v.part, j)
        {
            return Err(PipelineError::Internal("reach touched column 1 or column j"));
        }
    }
    Ok(())
}

/// True iff `v` has at least (d'/2)L' neighbors in every other part's
/// cluster of column `j`.
pub fn belongs(
    g: &KPartiteGraph,
    partition: &ClusterPartition,
    cs: &ColumnStructure,
    ledger: &ClusterLedger,
    v: VertexRef,
    j: usize,
) -> Result<bool, PipelineError> {
    if j == 0 || j > cs.ell() {
        return Err(PipelineError::BadParameter("column out of range"));
    }
    if partition.clusters.len() != cs.reduced.k() {
        return Err(PipelineError::LedgerShape("one cluster list per part"));
    }
    let threshold = (&(&ledger.params.d_prime / &Rational::from_integer(2))
        * &Rational::from(ledger.params.l_prime))
        .ceil_usize()
        .expect("threshold is nonnegative");
    for part in 1..=cs.reduced.k() {
        if part == v.part {
            continue;
        }
        let cluster = cs.cluster_in_column(part, j);
        let members = &partition.clusters[part - 1][cluster - 1];
        let deg = members.iter().filter(|&&u| g.has_edge(v, u)).count();
        if deg < threshold {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Destination clusters for the leftover vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeftoverAssignment {
    /// assigned[part-1][column-2] = vertices routed to that cluster.
    pub assigned: Vec<Vec<Vec<VertexRef>>>,
}

/// Routes each leftover vertex to the first non-receptacle column where it
/// belongs and the intake cap k eps' n / ((1/k+gamma/2) l') is not yet hit.
/// Each vertex must belong in at least (1/k+gamma/2) l' non-receptacle
/// columns; together with the cap arithmetic this guarantees the greedy
/// never sticks.
pub fn assign_leftover(
    g: &KPartiteGraph,
    partition: &ClusterPartition,
    cs: &ColumnStructure,
    ledger: &ClusterLedger,
    leftover: &[Vec<VertexRef>],
) -> Result<LeftoverAssignment, PipelineError> {
    check_shapes(cs, ledger)?;
    let (k, ell) = (cs.reduced.k(), cs.ell());
    if leftover.len() != k {
        return Err(PipelineError::LedgerShape("one leftover set per part"));
    }
    if ell < 2 {
        return Err(PipelineError::BadParameter("need a non-receptacle column"));
    }
    let p = &ledger.params;
    // share of columns each vertex must belong in
    let share = &(&(&Rational::one() / &Rational::from(k))
        + &(&p.gamma / &Rational::from_integer(2)))
        * &Rational::from(ell);
    let total_cap = &(&Rational::from(k) * &p.eps_prime) * &Rational::from(p.n);
    let intake_cap = &total_cap / &share;
    // the cap chain assumes k eps' n / ((1/k+gamma/2) l') <= k^2 eps' L'
    let chain_rhs = &(&(&Rational::from(k * k) * &p.eps_prime) * &Rational::from(p.l_prime))
        * &share;
    if total_cap > chain_rhs {
        return Err(PipelineError::Precondition(
            "intake cap chain needs n <= k (1/k+gamma/2) l' L'",
        ));
    }
    let mut assigned: Vec<Vec<Vec<VertexRef>>> = vec![vec![Vec::new(); ell - 1]; k];
    let mut intake = vec![vec![0usize; ell - 1]; k];
    for (part0, vs) in leftover.iter().enumerate() {
        if Rational::from(vs.len()) > total_cap {
            return Err(PipelineError::LeftoverTooLarge {
                part: part0 + 1,
                size: vs.len(),
            });
        }
        for &v in vs {
            if v.part != part0 + 1 {
                return Err(PipelineError::BadParameter("leftover vertex in the wrong part"));
            }
            let mut belonging = Vec::new();
            for j in 2..=ell {
                if belongs(g, partition, cs, ledger, v, j)? {
                    belonging.push(j);
                }
            }
            if Rational::from(belonging.len()) < share {
                return Err(PipelineError::TooFewBelonging {
                    v,
                    count: belonging.len(),
                });
            }
            let slot = belonging
                .iter()
                .find(|&&j| Rational::from(intake[part0][j - 2]) < intake_cap)
                .copied()
                .ok_or(PipelineError::Internal(
                    "leftover assignment stuck despite the cap arithmetic",
                ))?;
            assigned[part0][slot - 2].push(v);
            intake[part0][slot - 2] += 1;
        }
    }
    Ok(LeftoverAssignment { assigned })
}

/// The balanced blow-up of the reduced graph minus the receptacle column,
/// with per-cluster multiplicities from the non-red counts.
#[derive(Debug, Clone)]
pub struct AuxiliaryGraph {
    pub graph: KPartiteGraph,
    /// multiplicities[part-1][column-2]: copies of that cluster.
    pub multiplicities: Vec<Vec<usize>>,
    /// Removal quantum h D0 ceil(zeta L'/D0); every planned removal is a
    /// multiple of this.
    pub quantum: usize,
    /// ceil((1-d'/4) L'), the base the multiplicity formula measures from.
    pub base_count: usize,
    /// h ceil((1-d'/4) L'/h), the prescribed non-red count per cluster.
    pub target_nonred: usize,
}

impl AuxiliaryGraph {
    /// 2-based column of the 1-based auxiliary index in `part`.
    pub fn column_of_aux(&self, part: usize, index: usize) -> usize {
        let mut rest = index;
        for (c, &m) in self.multiplicities[part - 1].iter().enumerate() {
            if rest <= m {
                return c + 2;
            }
            rest -= m;
        }
        panic!("auxiliary index out of range");
    }
}

/// Builds the auxiliary graph: each non-receptacle cluster becomes
/// round((nu - C)/Q - 1) copies, rounding chosen per part so all parts
/// reach the same size. Larger fractional parts round up first (ties to
/// the lower column); a cluster may only round up if it would still land
/// on the non-red target, and negative values clamp to zero copies.
pub fn build_auxiliary_graph(
    cs: &ColumnStructure,
    ledger: &ClusterLedger,
) -> Result<AuxiliaryGraph, PipelineError> {
    check_shapes(cs, ledger)?;
    let (k, ell) = (cs.reduced.k(), cs.ell());
    if ell < 2 {
        return Err(PipelineError::BadParameter("need a non-receptacle column"));
    }
    let p = &ledger.params;
    let l_prime = Rational::from(p.l_prime);
    let d0 = Rational::from(p.d0 as usize);
    let quantum = p.h
        * p.d0 as usize
        * (&(&p.zeta * &l_prime) / &d0).ceil_usize().expect("positive");
    let base = &(&Rational::one() - &(&p.d_prime / &Rational::from_integer(4))) * &l_prime;
    let c = base.ceil_usize().expect("positive");
    let target = p.h * (&base / &Rational::from(p.h)).ceil_usize().expect("positive");
    let upper = &(&Rational::one() + &(&Rational::from(k * k) * &p.eps_prime)) * &l_prime;
    let mut nu = vec![vec![0usize; ell - 1]; k];
    for i in 1..=k {
        for j in 2..=ell {
            let v = ledger.counts[i - 1][cs.cluster_in_column(i, j) - 1].non_red();
            // open window: (1-sqrt(zeta)) L' < nu < (1+k^2 eps') L'; the
            // lower comparison squares to stay exact
            let gap = &Rational::one() - &(&Rational::from(v) / &l_prime);
            let above_lower = gap.is_negative() || gap == Rational::zero() || gap.pow(2) < p.zeta;
            if !above_lower || Rational::from(v) >= upper {
                return Err(PipelineError::NuOutOfRange {
                    part: i,
                    column: j,
                    nu: v,
                });
            }
            nu[i - 1][j - 2] = v;
        }
    }
    let totals: Vec<usize> = nu.iter().map(|row| row.iter().sum()).collect();
    if totals.iter().any(|&t| t != totals[0]) {
        return Err(PipelineError::UnequalPartTotals);
    }
    // per-cluster rounding bounds for (nu - C)/Q - 1, clamped at zero
    let mut lo = vec![vec![0usize; ell - 1]; k];
    let mut qfrac = vec![vec![0usize; ell - 1]; k]; // Q * fractional part
    let mut can_up = vec![vec![false; ell - 1]; k];
    for i in 0..k {
        for j in 0..ell - 1 {
            let v = nu[i][j] as i64;
            let num = v - c as i64 - quantum as i64; // Q * mu
            let floor = num.div_euclid(quantum as i64);
            let rem = num.rem_euclid(quantum as i64);
            if floor >= 0 {
                lo[i][j] = floor as usize;
                qfrac[i][j] = rem as usize;
                // rounding up lands the cluster at C + qfrac non-red
                can_up[i][j] = rem > 0 && c + rem as usize >= target;
            }
            // negative values clamp to zero copies and never round up
        }
    }
    let part_size = (0..k)
        .map(|i| lo[i].iter().sum::<usize>())
        .max()
        .expect("at least one part");
    let mut mult = lo.clone();
    for i in 0..k {
        let need = part_size - mult[i].iter().sum::<usize>();
        if need == 0 {
            continue;
        }
        let mut candidates: Vec<usize> = (0..ell - 1).filter(|&j| can_up[i][j]).collect();
        candidates.sort_by(|&a, &b| qfrac[i][b].cmp(&qfrac[i][a]).then(a.cmp(&b)));
        if candidates.len() < need {
            return Err(PipelineError::Unbalanceable { part: i + 1 });
        }
        for &j in candidates.iter().take(need) {
            mult[i][j] += 1;
        }
    }
    if part_size == 0 {
        return Err(PipelineError::EmptyAuxiliary);
    }
    let mut graph = KPartiteGraph::edgeless(k, part_size)
        .map_err(|_| PipelineError::BadParameter("auxiliary graph too large"))?;
    // copy ranges per (part, column), ascending columns
    let offsets: Vec<Vec<usize>> = mult
        .iter()
        .map(|row| {
            let mut acc = 0;
            let mut out = Vec::with_capacity(row.len() + 1);
            out.push(0);
            for &m in row {
                acc += m;
                out.push(acc);
            }
            out
        })
        .collect();
    for i in 1..=k {
        for t in (i + 1)..=k {
            for j in 2..=ell {
                for j2 in 2..=ell {
                    let u = VertexRef::new(i, cs.cluster_in_column(i, j));
                    let w = VertexRef::new(t, cs.cluster_in_column(t, j2));
                    if !cs.reduced.has_edge(u, w) {
                        continue;
                    }
                    for a in offsets[i - 1][j - 2]..offsets[i - 1][j - 1] {
                        for b in offsets[t - 1][j2 - 2]..offsets[t - 1][j2 - 1] {
                            graph
                                .add_edge(VertexRef::new(i, a + 1), VertexRef::new(t, b + 1))
                                .expect("copies are in range");
                        }
                    }
                }
            }
        }
    }
    // every copy must see at least a (k-1)/k share of every other part
    for i in 1..=k {
        for j in 2..=ell {
            if mult[i - 1][j - 2] == 0 {
                continue;
            }
            for t in 1..=k {
                if t == i {
                    continue;
                }
                let deg: usize = (2..=ell)
                    .filter(|&j2| {
                        cs.reduced.has_edge(
                            VertexRef::new(i, cs.cluster_in_column(i, j)),
                            VertexRef::new(t, cs.cluster_in_column(t, j2)),
                        )
                    })
                    .map(|j2| mult[t - 1][j2 - 2])
                    .sum();
                if k * deg < (k - 1) * part_size {
                    return Err(PipelineError::DegreeRatio { part: i, column: j });
                }
            }
        }
    }
    Ok(AuxiliaryGraph {
        graph,
        multiplicities: mult,
        quantum,
        base_count: c,
        target_nonred: target,
    })
}

/// The balancing outcome: per-cluster removals (in quanta) plus the
/// top-up that moves each cluster to exactly the non-red target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemovalPlan {
    pub quantum: usize,
    pub base_count: usize,
    pub target_nonred: usize,
    /// Fractional tiling number of the auxiliary graph; equals its part
    /// size when the degree hypothesis holds.
    pub tau: Rational,
    /// Common denominator of the tiling solution for this instance.
    pub d0_instance: usize,
    /// removed[part-1][column-2]: vertices taken out in whole tiles.
    pub removed: Vec<Vec<usize>>,
    /// topped_up[part-1][column-2]: vertices moved to the leftover to land
    /// exactly on the target.
    pub topped_up: Vec<Vec<usize>>,
    pub new_leftover: Vec<usize>,
}

/// Equalizes the non-red counts of all non-receptacle clusters: solves the
/// exact tiling LP on the auxiliary graph, verifies the blow-up tiling is
/// perfect, converts tiles into per-cluster removals, and tops up so every
/// cluster holds exactly h ceil((1-d'/4)L'/h) non-red vertices. The new
/// leftover is checked against the 3 h zeta n bound.
pub fn balance_columns(
    cs: &ColumnStructure,
    ledger: &ClusterLedger,
) -> Result<RemovalPlan, PipelineError> {
    let aux = build_auxiliary_graph(cs, ledger)?;
    let (k, ell) = (cs.reduced.k(), cs.ell());
    let part_size = aux.graph.n();
    let tn = fractional_tiling_number(&aux.graph).map_err(PipelineError::Frac)?;
    if tn.tau != Rational::from(part_size) {
        return Err(PipelineError::Precondition(
            "auxiliary tiling number must equal the part size",
        ));
    }
    let d0_instance = common_denominator(&tn.primal)
        .to_usize()
        .ok_or(PipelineError::BadParameter("solution denominator too large"))?
        .max(1);
    let blow = tiling_from_fractional(&aux.graph, &tn.primal, d0_instance)
        .map_err(PipelineError::Tiling)?;
    if blow.deficiency.is_some() {
        return Err(PipelineError::Internal("blow-up tiling left vertices uncovered"));
    }
    // tally tiles per cluster through the copy ranges
    let mut tile_count = vec![vec![0usize; ell - 1]; k];
    for tile in &blow.tiling.tiles {
        for (part0, copies) in tile.parts.iter().enumerate() {
            let aux_index = (copies[0].index - 1) / d0_instance + 1;
            let col = aux.column_of_aux(part0 + 1, aux_index);
            tile_count[part0][col - 2] += 1;
        }
    }
    let p = &ledger.params;
    let mut removed = vec![vec![0usize; ell - 1]; k];
    let mut topped = vec![vec![0usize; ell - 1]; k];
    let mut new_leftover = vec![0usize; k];
    for i in 1..=k {
        for j in 2..=ell {
            let m = aux.multiplicities[i - 1][j - 2];
            if tile_count[i - 1][j - 2] != m * d0_instance {
                return Err(PipelineError::Internal("tile tally disagrees with multiplicities"));
            }
            let removal = m * aux.quantum;
            let counts = &ledger.counts[i - 1][cs.cluster_in_column(i, j) - 1];
            if removal > counts.uncolored() {
                return Err(PipelineError::RemovalExceedsUncolored { part: i, column: j });
            }
            let landed = counts.non_red() - removal;
            if landed < aux.target_nonred {
                return Err(PipelineError::BelowTarget {
                    part: i,
                    column: j,
                    nonred: landed,
                });
            }
            removed[i - 1][j - 2] = removal;
            topped[i - 1][j - 2] = landed - aux.target_nonred;
            new_leftover[i - 1] += landed - aux.target_nonred;
        }
    }
    let bound = &(&Rational::from(3 * p.h) * &p.zeta) * &Rational::from(p.n);
    for (i, &size) in new_leftover.iter().enumerate() {
        if Rational::from(size) > bound {
            return Err(PipelineError::LeftoverBound { part: i + 1, size });
        }
    }
    Ok(RemovalPlan {
        quantum: aux.quantum,
        base_count: aux.base_count,
        target_nonred: aux.target_nonred,
        tau: tn.tau,
        d0_instance,
        removed,
        topped_up: topped,
        new_leftover,
    })
}

/// Vertices a receptacle part sheds to become divisible: n - h floor(n/h).
pub fn receptacle_remainder(n: usize, h: usize) -> usize {
    assert!(n >= 1 && h >= 1, "sizes must be positive");
    n - h * (n / h)
}
