//! The fractional transversal-clique tiling number and its dual.
//!
//! The primal program puts a weight on every transversal clique, maximizing
//! total weight subject to each vertex carrying at most unit load. Its dual
//! puts a cost on every vertex, minimizing total cost subject to each clique
//! collecting at least unit cost. Both are built and solved independently;
//! their exact agreement is checked rather than assumed.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;

use crate::cliques::{enumerate_transversal_cliques, Clique, CliqueError, DEFAULT_CLIQUE_CAP};
use crate::graph::{KPartiteGraph, VertexRef};
use crate::lp::{
    solve_exact_hinted, solve_exact_with, Cmp, LPSolution, LinearProgram, LpError, Sense,
    SolverConfig,
};
use crate::rational::{denominator_lcm, Rational};

/// Maximize total clique weight, one variable per clique in the given order,
/// one `<= 1` row per vertex in part-major order.
pub fn build_primal_tiling_lp(g: &KPartiteGraph, cliques: &[Clique]) -> LinearProgram {
    let mut lp = LinearProgram::new(Sense::Maximize, vec![Rational::one(); cliques.len()]);
    for id in 0..g.total_vertices() {
        let v = g.vertex(id);
        let coeffs: Vec<Rational> = cliques
            .iter()
            .map(|c| {
                if c.contains(v) {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        lp.add_constraint(coeffs, Cmp::Le, Rational::one())
            .expect("row width matches clique count");
    }
    lp
}

/// Minimize total vertex cost, one variable per vertex in part-major order,
/// one `>= 1` row per clique in the given order.
pub fn build_dual_tiling_lp(g: &KPartiteGraph, cliques: &[Clique]) -> LinearProgram {
    let total = g.total_vertices();
    let mut lp = LinearProgram::new(Sense::Minimize, vec![Rational::one(); total]);
    for c in cliques {
        let mut coeffs = vec![Rational::zero(); total];
        for &v in c.vertices() {
            coeffs[g.id(v)] = Rational::one();
        }
        lp.add_constraint(coeffs, Cmp::Ge, Rational::one())
            .expect("row width matches vertex count");
    }
    lp
}

#[derive(Debug, Clone)]
pub enum FracError {
    Cliques(CliqueError),
    Lp(LpError),
    Internal(&'static str),
}

impl fmt::Display for FracError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FracError::Cliques(e) => write!(f, "{}", e),
            FracError::Lp(e) => write!(f, "{}", e),
            FracError::Internal(m) => write!(f, "internal error: {}", m),
        }
    }
}

impl From<CliqueError> for FracError {
    fn from(e: CliqueError) -> Self {
        FracError::Cliques(e)
    }
}

impl From<LpError> for FracError {
    fn from(e: LpError) -> Self {
        FracError::Lp(e)
    }
}

/// The tiling number together with both optimal solutions and the clique
/// order they refer to.
#[derive(Debug, Clone)]
pub struct TilingNumber {
    pub tau: Rational,
    pub cliques: Vec<Clique>,
    pub primal: LPSolution,
    pub dual: LPSolution,
}

/// Solves both tiling programs exactly and cross-checks strong duality.
pub fn fractional_tiling_number(g: &KPartiteGraph) -> Result<TilingNumber, FracError> {
    fractional_tiling_number_with(g, DEFAULT_CLIQUE_CAP, &SolverConfig::default())
}

pub fn fractional_tiling_number_with(
    g: &KPartiteGraph,
    clique_cap: usize,
    cfg: &SolverConfig,
) -> Result<TilingNumber, FracError> {
    let cliques = enumerate_transversal_cliques(g, clique_cap)?;
    let primal_lp = build_primal_tiling_lp(g, &cliques);
    let dual_lp = build_dual_tiling_lp(g, &cliques);
    let primal = solve_exact_with(&primal_lp, cfg)?;
    // complementary slackness: the dual rows binding at its optimum are the
    // positive-weight cliques, so activating them first shortcuts the lazy
    // loop without changing what gets verified
    let hints: Vec<usize> = primal
        .values
        .iter()
        .enumerate()
        .filter(|(_, w)| w.is_positive())
        .map(|(j, _)| j)
        .collect();
    let dual = solve_exact_hinted(&dual_lp, cfg, &hints)?;
    if primal.objective != dual.objective {
        return Err(FracError::Internal("primal and dual optima disagree"));
    }
    let tau = primal.objective.clone();
    if tau > Rational::from(g.n()) {
        return Err(FracError::Internal("tiling number exceeds part size"));
    }
    Ok(TilingNumber {
        tau,
        cliques,
        primal,
        dual,
    })
}

/// Load on each vertex (dense id order) under the given clique weights.
pub fn vertex_coverage(
    g: &KPartiteGraph,
    cliques: &[Clique],
    primal: &LPSolution,
) -> Vec<Rational> {
    let mut cov = vec![Rational::zero(); g.total_vertices()];
    for (c, w) in cliques.iter().zip(&primal.values) {
        if w.is_zero() {
            continue;
        }
        for &v in c.vertices() {
            cov[g.id(v)] += w;
        }
    }
    cov
}

/// Vertices whose load is strictly below 1, in part-major order.
pub fn slack_vertices(
    g: &KPartiteGraph,
    cliques: &[Clique],
    primal: &LPSolution,
) -> Vec<VertexRef> {
    vertex_coverage(g, cliques, primal)
        .iter()
        .enumerate()
        .filter(|(_, c)| **c < Rational::one())
        .map(|(id, _)| g.vertex(id))
        .collect()
}

/// Least common multiple of the denominators of a solution's values, so that
/// scaling by it makes every value integral.
pub fn common_denominator(sol: &LPSolution) -> BigInt {
    denominator_lcm(sol.values.iter())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessError {
    /// `z` has too few neighbors in the named part.
    DeficientPart {
        part: usize,
        found: usize,
        needed: usize,
    },
    /// The host graph has fewer than 3 parts.
    TooFewParts,
}

impl fmt::Display for WitnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessError::DeficientPart { part, found, needed } => write!(
                f,
                "part {} holds only {} neighbors, {} required",
                part, found, needed
            ),
            WitnessError::TooFewParts => write!(f, "induction needs at least 3 parts"),
        }
    }
}

/// The induced subgraph used by the induction step, with its vertex
/// provenance.
#[derive(Debug, Clone)]
pub struct InductiveWitness {
    pub graph: KPartiteGraph,
    /// `original[p-1][i-1]` is the host vertex behind new vertex `(p, i)`.
    pub original: Vec<Vec<VertexRef>>,
}

/// Induces the `(k-1)`-partite graph on the lexicographically first
/// `ceil((k-1) n / k)` neighbors of `z` in every other part.
pub fn inductive_witness(
    g: &KPartiteGraph,
    z: VertexRef,
) -> Result<InductiveWitness, WitnessError> {
    let (k, n) = (g.k(), g.n());
    if k < 3 {
        return Err(WitnessError::TooFewParts);
    }
    let n_prime = ((k - 1) * n).div_ceil(k);
    let mut original: Vec<Vec<VertexRef>> = Vec::with_capacity(k - 1);
    for part in (1..=k).filter(|&p| p != z.part) {
        let neighbors: Vec<VertexRef> = g.neighbors_in_part(z, part).take(n_prime).collect();
        if neighbors.len() < n_prime {
            return Err(WitnessError::DeficientPart {
                part,
                found: g.deg_in_part(z, part),
                needed: n_prime,
            });
        }
        original.push(neighbors);
    }
    let mut graph = KPartiteGraph::edgeless(k - 1, n_prime).expect("small witness");
    for p in 0..k - 1 {
        for q in (p + 1)..k - 1 {
            for (i, &u) in original[p].iter().enumerate() {
                for (j, &v) in original[q].iter().enumerate() {
                    if g.has_edge(u, v) {
                        graph
                            .add_edge(VertexRef::new(p + 1, i + 1), VertexRef::new(q + 1, j + 1))
                            .expect("in range");
                    }
                }
            }
        }
    }
    Ok(InductiveWitness { graph, original })
}

/// A complementary-slackness violation between paired solutions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CsViolation {
    /// Primal variable is positive but its dual constraint is not tight.
    PositiveWeightSlackRow { var: usize },
    /// Dual variable is positive but its primal constraint is not tight.
    PositiveCostSlackRow { var: usize },
}

#[derive(Debug, Clone)]
pub struct DualityReport {
    pub objectives_equal: bool,
    /// `dual objective - primal objective`; nonnegative for feasible pairs.
    pub duality_gap: Rational,
    pub cs_violations: Vec<CsViolation>,
}

impl DualityReport {
    /// Strong duality with full complementary slackness.
    pub fn holds(&self) -> bool {
        self.objectives_equal && self.cs_violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DualityError {
    /// The programs are not shaped as a primal/dual pair.
    ShapeMismatch,
    /// Senses are not (maximize, minimize).
    SenseMismatch,
    /// A solution violates the named constraint of its own program.
    PrimalViolates { row: usize },
    DualViolates { row: usize },
    /// A solution has a negative entry.
    PrimalNegative { var: usize },
    DualNegative { var: usize },
}

impl fmt::Display for DualityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DualityError::ShapeMismatch => {
                write!(f, "programs are not transposes of one another")
            }
            DualityError::SenseMismatch => {
                write!(f, "expected a maximize/minimize pair")
            }
            DualityError::PrimalViolates { row } => {
                write!(f, "primal solution violates constraint {}", row)
            }
            DualityError::DualViolates { row } => {
                write!(f, "dual solution violates constraint {}", row)
            }
            DualityError::PrimalNegative { var } => {
                write!(f, "primal value {} is negative", var)
            }
            DualityError::DualNegative { var } => {
                write!(f, "dual value {} is negative", var)
            }
        }
    }
}

/// Checks a primal/dual solution pair: feasibility of each side, exact
/// objective agreement, and both complementary slackness families. The pairing
/// convention is positional: primal variable `j` corresponds to dual
/// constraint `j`, primal constraint `i` to dual variable `i`.
pub fn verify_duality(
    primal_lp: &LinearProgram,
    primal: &LPSolution,
    dual_lp: &LinearProgram,
    dual: &LPSolution,
) -> Result<DualityReport, DualityError> {
    if primal_lp.sense() != Sense::Maximize || dual_lp.sense() != Sense::Minimize {
        return Err(DualityError::SenseMismatch);
    }
    if dual_lp.n_vars() != primal_lp.constraints().len()
        || dual_lp.constraints().len() != primal_lp.n_vars()
    {
        return Err(DualityError::ShapeMismatch);
    }
    if let Some(var) = primal.values.iter().position(|v| v.is_negative()) {
        return Err(DualityError::PrimalNegative { var });
    }
    if let Some(var) = dual.values.iter().position(|v| v.is_negative()) {
        return Err(DualityError::DualNegative { var });
    }
    if let Some(row) = primal_lp.first_violation(&primal.values) {
        return Err(DualityError::PrimalViolates { row });
    }
    if let Some(row) = dual_lp.first_violation(&dual.values) {
        return Err(DualityError::DualViolates { row });
    }

    let p_obj = primal_lp.objective_at(&primal.values);
    let d_obj = dual_lp.objective_at(&dual.values);
    let mut cs_violations = Vec::new();
    for (j, w) in primal.values.iter().enumerate() {
        if !w.is_positive() {
            continue;
        }
        let c = &dual_lp.constraints()[j];
        let lhs: Rational = c.coeffs.iter().zip(&dual.values).map(|(a, v)| a * v).sum();
        if lhs != c.rhs {
            cs_violations.push(CsViolation::PositiveWeightSlackRow { var: j });
        }
    }
    for (i, x) in dual.values.iter().enumerate() {
        if !x.is_positive() {
            continue;
        }
        let c = &primal_lp.constraints()[i];
        let lhs: Rational = c.coeffs.iter().zip(&primal.values).map(|(a, v)| a * v).sum();
        if lhs != c.rhs {
            cs_violations.push(CsViolation::PositiveCostSlackRow { var: i });
        }
    }
    Ok(DualityReport {
        objectives_equal: p_obj == d_obj,
        duality_gap: &d_obj - &p_obj,
        cs_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{catlin_graph, random_min_degree_graph, KPartiteGraph};
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn v(p: usize, i: usize) -> VertexRef {
        VertexRef::new(p, i)
    }

    fn tau_of(g: &KPartiteGraph) -> TilingNumber {
        fractional_tiling_number(g).unwrap()
    }

    #[test]
    fn gap_witness_tiling_number() {
        let g = catlin_graph(3, 3).unwrap();
        let t = tau_of(&g);
        assert_eq!(t.tau, Rational::from_integer(3));
        assert_eq!(t.cliques.len(), 8);
        // at any optimum every vertex is fully loaded
        assert!(slack_vertices(&g, &t.cliques, &t.primal).is_empty());
        // the optimum is half-integral
        assert_eq!(common_denominator(&t.primal).to_u64(), Some(2));
        // cross-checked duality with complementary slackness
        let plp = build_primal_tiling_lp(&g, &t.cliques);
        let dlp = build_dual_tiling_lp(&g, &t.cliques);
        let report = verify_duality(&plp, &t.primal, &dlp, &t.dual).unwrap();
        assert!(report.holds());
        assert!(report.duality_gap.is_zero());
    }

    #[test]
    fn complete_and_edgeless() {
        let g = KPartiteGraph::complete(3, 2).unwrap();
        assert_eq!(tau_of(&g).tau, Rational::from_integer(2));
        let e = KPartiteGraph::edgeless(3, 2).unwrap();
        let t = tau_of(&e);
        assert!(t.tau.is_zero());
        assert_eq!(slack_vertices(&e, &t.cliques, &t.primal).len(), 6);
    }

    #[test]
    fn degree_threshold_forces_full_tiling_number() {
        // small sweep of the main degree bound; the full grid runs in the
        // acceptance suite
        for (k, n) in [(2usize, 4usize), (2, 5), (3, 3), (3, 5), (4, 4)] {
            let target = ((k - 1) * n).div_ceil(k);
            for seed in 0..5 {
                let g = random_min_degree_graph(k, n, target, seed, None).unwrap();
                let t = tau_of(&g);
                assert_eq!(
                    t.tau,
                    Rational::from(n),
                    "k={} n={} seed={}",
                    k,
                    n,
                    seed
                );
            }
        }
    }

    #[test]
    fn below_threshold_can_fall_short() {
        let g = catlin_graph(3, 3).unwrap(); // exactly at the bound
        assert_eq!(tau_of(&g).tau, Rational::from_integer(3));
        let mut g2 = KPartiteGraph::edgeless(3, 2).unwrap();
        // one triangle only: tau is 1, far below n=2
        for (a, b) in [((1, 1), (2, 1)), ((1, 1), (3, 1)), ((2, 1), (3, 1))] {
            g2.add_edge(v(a.0, a.1), v(b.0, b.1)).unwrap();
        }
        assert_eq!(tau_of(&g2).tau, Rational::one());
    }

    #[test]
    fn coverage_and_slack_identify_unused_vertices() {
        // a path-shaped bipartite graph: tau = matching number
        let g = KPartiteGraph::new_balanced(
            2,
            3,
            &[(v(1, 1), v(2, 1)), (v(1, 2), v(2, 1)), (v(1, 2), v(2, 2))],
        )
        .unwrap();
        let t = tau_of(&g);
        assert_eq!(t.tau, Rational::from_integer(2));
        let slack = slack_vertices(&g, &t.cliques, &t.primal);
        // vertices (1,3) and (2,3) are isolated, so they are always slack
        assert!(slack.contains(&v(1, 3)));
        assert!(slack.contains(&v(2, 3)));
        let cov = vertex_coverage(&g, &t.cliques, &t.primal);
        assert!(cov.iter().all(|c| *c <= Rational::one()));
    }

    #[test]
    fn witness_takes_first_neighbors() {
        let g = KPartiteGraph::complete(3, 4).unwrap();
        let w = inductive_witness(&g, v(2, 1)).unwrap();
        // n' = ceil(2*4/3) = 3; parts 1 and 3 renumbered to 1 and 2
        assert_eq!(w.graph.k(), 2);
        assert_eq!(w.graph.n(), 3);
        assert_eq!(w.original[0], vec![v(1, 1), v(1, 2), v(1, 3)]);
        assert_eq!(w.original[1], vec![v(3, 1), v(3, 2), v(3, 3)]);
        assert_eq!(w.graph.delta_hat(), 3);
    }

    #[test]
    fn witness_reports_deficient_part() {
        let mut g = KPartiteGraph::complete(3, 4).unwrap();
        // strip (1,1)'s neighbors in part 3 below n' = 3
        g.remove_edge(v(1, 1), v(3, 1));
        g.remove_edge(v(1, 1), v(3, 2));
        let e = inductive_witness(&g, v(1, 1)).unwrap_err();
        assert_eq!(
            e,
            WitnessError::DeficientPart {
                part: 3,
                found: 2,
                needed: 3
            }
        );
        let g2 = KPartiteGraph::complete(2, 2).unwrap();
        assert_eq!(
            inductive_witness(&g2, v(1, 1)).unwrap_err(),
            WitnessError::TooFewParts
        );
    }

    #[test]
    fn witness_degree_bound_on_random_instances() {
        // every witness inherits the degree bound needed one level down:
        // at least n' - (n - n') in each pair
        for seed in 0..20 {
            let (k, n) = (3usize, 4usize);
            let target = ((k - 1) * n).div_ceil(k);
            let g = random_min_degree_graph(k, n, target, seed, None).unwrap();
            let n_prime = target;
            for z in g.vertices() {
                let w = inductive_witness(&g, z).unwrap();
                assert!(w.graph.delta_hat() + (n - n_prime) >= n_prime);
            }
        }
    }

    #[test]
    fn duality_report_flags_suboptimal_pairs() {
        let g = catlin_graph(3, 3).unwrap();
        let t = tau_of(&g);
        let plp = build_primal_tiling_lp(&g, &t.cliques);
        let dlp = build_dual_tiling_lp(&g, &t.cliques);

        // feasible but wasteful dual: cost 1 everywhere
        let heavy = LPSolution {
            values: vec![Rational::one(); 9],
            objective: Rational::from_integer(9),
            basis: vec![],
            tight_rows: vec![],
            pivots: 0,
        };
        let rep = verify_duality(&plp, &t.primal, &dlp, &heavy).unwrap();
        assert!(!rep.objectives_equal);
        assert_eq!(rep.duality_gap, Rational::from_integer(6));
        assert!(!rep.cs_violations.is_empty());

        // infeasible dual: all costs zero
        let zero = LPSolution {
            values: vec![Rational::zero(); 9],
            objective: Rational::zero(),
            basis: vec![],
            tight_rows: vec![],
            pivots: 0,
        };
        assert_eq!(
            verify_duality(&plp, &t.primal, &dlp, &zero).unwrap_err(),
            DualityError::DualViolates { row: 0 }
        );
    }

    #[test]
    fn missing_slack_parts_when_division_fails() {
        // whenever k does not divide (k-1)n, some part must be free of slack
        // vertices at any optimum of a threshold instance
        for seed in 0..10 {
            let (k, n) = (3usize, 4usize); // (k-1)n = 8, not divisible by 3
            let target = ((k - 1) * n).div_ceil(k);
            let g = random_min_degree_graph(k, n, target, seed, None).unwrap();
            let t = tau_of(&g);
            let slack = slack_vertices(&g, &t.cliques, &t.primal);
            let mut part_has_slack = vec![false; k];
            for s in slack {
                part_has_slack[s.part - 1] = true;
            }
            assert!(
                part_has_slack.iter().any(|h| !h),
                "seed {}: every part kept slack although k does not divide (k-1)n",
                seed
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn strong_duality_on_random_graphs(seed in 0u64..1000, k in 2usize..4, n in 1usize..4) {
            let g = random_min_degree_graph(k, n, 0, seed, Some(k * n)).unwrap();
            let t = tau_of(&g);
            prop_assert_eq!(&t.primal.objective, &t.dual.objective);
            prop_assert!(t.tau <= Rational::from(n));
            let plp = build_primal_tiling_lp(&g, &t.cliques);
            let dlp = build_dual_tiling_lp(&g, &t.cliques);
            let rep = verify_duality(&plp, &t.primal, &dlp, &t.dual).unwrap();
            prop_assert!(rep.holds());
        }

        #[test]
        fn common_denominator_makes_integral(seed in 0u64..500) {
            let g = random_min_degree_graph(3, 3, 2, seed, None).unwrap();
            let t = tau_of(&g);
            let d = common_denominator(&t.primal);
            for w in &t.primal.values {
                let scaled = &Rational::from(d.clone()) * w;
                prop_assert!(scaled.is_integer());
            }
        }
    }
}
