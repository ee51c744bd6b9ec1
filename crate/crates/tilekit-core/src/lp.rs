//! Exact linear programming over rationals.
//!
//! A dense-tableau simplex run in two phases. Pivoting uses steepest
//! reduced cost; after a run of degenerate pivots it falls back to Bland's
//! rule until the objective moves again, which rules out cycling while
//! keeping the fast rule on non-degenerate steps. Infeasible programs
//! yield a verifiable multiplier certificate, unbounded programs a
//! verifiable ray. Programs with many more constraints than variables are
//! solved by lazy row activation: a subset of rows is solved densely and
//! violated rows are activated until the relaxation's optimum is feasible
//! for the whole program, which makes it optimal.
//!
//! Variables are implicitly nonnegative. Every comparison is exact; the
//! returned solution is re-checked against the original program before it is
//! handed back.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::rational::Rational;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub cmp: Cmp,
    pub rhs: Rational,
}

/// A linear program over nonnegative variables.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    sense: Sense,
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<Rational>) -> Self {
        LinearProgram {
            sense,
            objective,
            constraints: Vec::new(),
        }
    }

    /// Appends `coeffs · x  cmp  rhs`; `coeffs` must cover every variable.
    pub fn add_constraint(
        &mut self,
        coeffs: Vec<Rational>,
        cmp: Cmp,
        rhs: Rational,
    ) -> Result<(), LpError> {
        if coeffs.len() != self.objective.len() {
            return Err(LpError::Malformed("constraint width != variable count"));
        }
        self.constraints.push(Constraint { coeffs, cmp, rhs });
        Ok(())
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Exact objective value at `x`.
    pub fn objective_at(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Index of the first constraint violated by `x >= 0`, if any.
    pub fn first_violation(&self, x: &[Rational]) -> Option<usize> {
        if x.iter().any(|v| v.is_negative()) {
            return None; // caller guarantees nonnegativity; treated separately
        }
        self.constraints.iter().position(|c| {
            let lhs: Rational = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            match c.cmp {
                Cmp::Le => lhs > c.rhs,
                Cmp::Ge => lhs < c.rhs,
                Cmp::Eq => lhs != c.rhs,
            }
        })
    }
}

/// Multipliers combining the constraints into `0 >= positive`, proving
/// infeasibility. `verify` checks the combination from scratch.
#[derive(Clone, Debug)]
pub struct InfeasibilityCertificate {
    pub row_multipliers: Vec<Rational>,
}

impl InfeasibilityCertificate {
    /// True iff the multipliers prove `lp` infeasible: sign-compatible with
    /// each row's sense, combined coefficients nonnegative on every variable,
    /// combined right-hand side negative.
    pub fn verify(&self, lp: &LinearProgram) -> bool {
        if self.row_multipliers.len() != lp.constraints.len() {
            return false;
        }
        for (y, c) in self.row_multipliers.iter().zip(&lp.constraints) {
            match c.cmp {
                Cmp::Le if y.is_negative() => return false,
                Cmp::Ge if y.is_positive() => return false,
                _ => {}
            }
        }
        let mut combined_rhs = Rational::zero();
        for (y, c) in self.row_multipliers.iter().zip(&lp.constraints) {
            combined_rhs += y * &c.rhs;
        }
        if !combined_rhs.is_negative() {
            return false;
        }
        for j in 0..lp.n_vars() {
            let mut coeff = Rational::zero();
            for (y, c) in self.row_multipliers.iter().zip(&lp.constraints) {
                coeff += y * &c.coeffs[j];
            }
            if coeff.is_negative() {
                return false;
            }
        }
        true
    }
}

/// A feasible direction with unboundedly improving objective.
#[derive(Clone, Debug)]
pub struct RayCertificate {
    pub direction: Vec<Rational>,
}

impl RayCertificate {
    /// True iff the direction is nonnegative, respects every constraint's
    /// recession condition, and strictly improves the objective.
    pub fn verify(&self, lp: &LinearProgram) -> bool {
        if self.direction.len() != lp.n_vars() {
            return false;
        }
        if self.direction.iter().any(|d| d.is_negative()) {
            return false;
        }
        for c in &lp.constraints {
            let along: Rational = c.coeffs.iter().zip(&self.direction).map(|(a, d)| a * d).sum();
            let ok = match c.cmp {
                Cmp::Le => !along.is_positive(),
                Cmp::Ge => !along.is_negative(),
                Cmp::Eq => along.is_zero(),
            };
            if !ok {
                return false;
            }
        }
        let gain = lp.objective_at(&self.direction);
        match lp.sense {
            Sense::Maximize => gain.is_positive(),
            Sense::Minimize => gain.is_negative(),
        }
    }
}

/// Which variable is basic in a tableau row.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BasisVar {
    Structural(usize),
    /// Slack or surplus of the original constraint with this index.
    RowSlack(usize),
}

/// An exact optimal vertex solution.
#[derive(Clone, Debug)]
pub struct LPSolution {
    pub values: Vec<Rational>,
    pub objective: Rational,
    pub basis: Vec<BasisVar>,
    /// Constraints satisfied with equality, ascending.
    pub tight_rows: Vec<usize>,
    /// Simplex pivots spent producing this solution.
    pub pivots: usize,
}

#[derive(Clone, Debug)]
pub enum LpError {
    Infeasible(InfeasibilityCertificate),
    Unbounded(RayCertificate),
    Malformed(&'static str),
    Internal(&'static str),
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::Infeasible(_) => write!(f, "program is infeasible (certificate attached)"),
            LpError::Unbounded(_) => write!(f, "program is unbounded (ray attached)"),
            LpError::Malformed(m) => write!(f, "malformed program: {}", m),
            LpError::Internal(m) => write!(f, "internal solver error: {}", m),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    /// Solve by lazy row activation when rows exceed
    /// `max(lazy_row_floor, lazy_row_factor * n_vars)`.
    pub lazy_row_floor: usize,
    pub lazy_row_factor: usize,
    /// How many violated rows to activate per round.
    pub activation_batch: usize,
    /// Hard pivot budget; exceeding it is reported as an internal error.
    pub pivot_limit: usize,
    /// Degenerate pivots in a row before Bland's rule takes over.
    pub stall_limit: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            lazy_row_floor: 64,
            lazy_row_factor: 4,
            activation_batch: 16,
            pivot_limit: 1_000_000,
            stall_limit: 64,
        }
    }
}

/// Solves `lp` exactly with default configuration.
pub fn solve_exact(lp: &LinearProgram) -> Result<LPSolution, LpError> {
    solve_exact_with(lp, &SolverConfig::default())
}

pub fn solve_exact_with(lp: &LinearProgram, cfg: &SolverConfig) -> Result<LPSolution, LpError> {
    solve_exact_hinted(lp, cfg, &[])
}

/// Like `solve_exact_with`, but rows named in `hints` join the initial
/// active set of the lazy path. Hints only steer row activation; the
/// solution is still checked against every constraint.
pub fn solve_exact_hinted(
    lp: &LinearProgram,
    cfg: &SolverConfig,
    hints: &[usize],
) -> Result<LPSolution, LpError> {
    let m = lp.constraints.len();
    if hints.iter().any(|&r| r >= m) {
        return Err(LpError::Malformed("hint row out of range"));
    }
    let lazy_cutoff = cfg.lazy_row_floor.max(cfg.lazy_row_factor * lp.n_vars());
    let mut sol = if m > lazy_cutoff {
        solve_lazy(lp, cfg, hints)?
    } else {
        let all: Vec<usize> = (0..m).collect();
        solve_active(lp, &all, cfg)?
    };
    finalize(lp, &mut sol)?;
    Ok(sol)
}

/// Recomputes tight rows and re-verifies feasibility and objective value
/// against the original program.
fn finalize(lp: &LinearProgram, sol: &mut LPSolution) -> Result<(), LpError> {
    if sol.values.iter().any(|v| v.is_negative()) {
        return Err(LpError::Internal("negative value in solution"));
    }
    sol.tight_rows.clear();
    for (i, c) in lp.constraints.iter().enumerate() {
        let lhs: Rational = c.coeffs.iter().zip(&sol.values).map(|(a, v)| a * v).sum();
        let ok = match c.cmp {
            Cmp::Le => lhs <= c.rhs,
            Cmp::Ge => lhs >= c.rhs,
            Cmp::Eq => lhs == c.rhs,
        };
        if !ok {
            return Err(LpError::Internal("solution violates a constraint"));
        }
        if lhs == c.rhs {
            sol.tight_rows.push(i);
        }
    }
    if lp.objective_at(&sol.values) != sol.objective {
        return Err(LpError::Internal("objective value mismatch"));
    }
    Ok(())
}

fn solve_lazy(
    lp: &LinearProgram,
    cfg: &SolverConfig,
    hints: &[usize],
) -> Result<LPSolution, LpError> {
    let m = lp.constraints.len();
    let mut active: Vec<usize> = (0..m.min((2 * lp.n_vars()).max(16))).collect();
    let mut is_active = vec![false; m];
    for &r in &active {
        is_active[r] = true;
    }
    for &r in hints {
        if !is_active[r] {
            active.push(r);
            is_active[r] = true;
        }
    }
    let mut spent = 0usize;
    loop {
        match solve_active(lp, &active, cfg) {
            Ok(mut sol) => {
                sol.pivots += spent;
                let mut added = 0;
                for r in 0..m {
                    if is_active[r] {
                        continue;
                    }
                    let c = &lp.constraints[r];
                    let lhs: Rational =
                        c.coeffs.iter().zip(&sol.values).map(|(a, v)| a * v).sum();
                    let violated = match c.cmp {
                        Cmp::Le => lhs > c.rhs,
                        Cmp::Ge => lhs < c.rhs,
                        Cmp::Eq => lhs != c.rhs,
                    };
                    if violated {
                        active.push(r);
                        is_active[r] = true;
                        added += 1;
                        if added >= cfg.activation_batch.max(1) {
                            break;
                        }
                    }
                }
                if added == 0 {
                    return Ok(sol);
                }
                spent = sol.pivots;
            }
            Err(LpError::Infeasible(cert)) => {
                // already full-length: inactive rows carry zero multipliers,
                // so the relaxation's certificate is the full program's
                return Err(LpError::Infeasible(cert));
            }
            Err(LpError::Unbounded(ray)) => {
                // activate rows that cut the ray; if none exist the full
                // program is unbounded along it
                let mut added = 0;
                for r in 0..m {
                    if is_active[r] {
                        continue;
                    }
                    let c = &lp.constraints[r];
                    let along: Rational = c
                        .coeffs
                        .iter()
                        .zip(&ray.direction)
                        .map(|(a, d)| a * d)
                        .sum();
                    let cuts = match c.cmp {
                        Cmp::Le => along.is_positive(),
                        Cmp::Ge => along.is_negative(),
                        Cmp::Eq => !along.is_zero(),
                    };
                    if cuts {
                        active.push(r);
                        is_active[r] = true;
                        added += 1;
                        if added >= cfg.activation_batch.max(1) {
                            break;
                        }
                    }
                }
                if added == 0 {
                    return Err(LpError::Unbounded(ray));
                }
            }
            Err(e) => return Err(e),
        }
    }
}

// column classification inside the standardized tableau
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum ColKind {
    Structural(usize),
    // slack (+1) or surplus (-1) of the std row
    Slack(usize),
    Surplus(usize),
    Artificial(usize),
}

struct Tableau {
    ncols: usize,
    // m rows of ncols + 1 entries, right-hand side last
    rows: Vec<Vec<Rational>>,
    row0: Vec<Rational>,
    basis: Vec<usize>,
    cols: Vec<ColKind>,
    // per std row: original constraint index and whether it was negated
    orig: Vec<usize>,
    negated: Vec<bool>,
    pivots: usize,
}

enum LoopEnd {
    Optimal,
    UnboundedCol(usize),
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        let inv = piv.recip();
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = self.rows[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c].clone();
            if f.is_zero() {
                continue;
            }
            for (x, p) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        let f = self.row0[c].clone();
        if !f.is_zero() {
            for (x, p) in self.row0.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Entering column: steepest reduced cost, or lowest index (Bland)
    /// after `stall_limit` consecutive degenerate pivots; once the
    /// objective moves the steep rule resumes. Leaving row minimizes the
    /// ratio, ties broken by the lowest basic variable index, which is
    /// what Bland's termination argument needs. Runs until optimal or
    /// unbounded.
    fn simplex_loop(&mut self, pivot_limit: usize, stall_limit: usize) -> Result<LoopEnd, LpError> {
        let mut stalled = 0usize;
        loop {
            if self.pivots > pivot_limit {
                return Err(LpError::Internal("pivot limit exceeded"));
            }
            let col = if stalled >= stall_limit {
                (0..self.ncols).find(|&j| self.row0[j].is_negative())
            } else {
                let mut best: Option<usize> = None;
                for j in 0..self.ncols {
                    if self.row0[j].is_negative()
                        && best.map_or(true, |b| self.row0[j] < self.row0[b])
                    {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(col) = col else {
                return Ok(LoopEnd::Optimal);
            };
            let mut best: Option<(Rational, usize, usize)> = None; // ratio, basis var, row
            for i in 0..self.rows.len() {
                if !self.rows[i][col].is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / &self.rows[i][col];
                let better = match &best {
                    None => true,
                    Some((br, bv, _)) => ratio < *br || (ratio == *br && self.basis[i] < *bv),
                };
                if better {
                    best = Some((ratio, self.basis[i], i));
                }
            }
            match best {
                None => return Ok(LoopEnd::UnboundedCol(col)),
                Some((ratio, _, r)) => {
                    stalled = if ratio.is_zero() { stalled + 1 } else { 0 };
                    self.pivot(r, col);
                }
            }
        }
    }
}

/// Dense two-phase simplex over the given subset of rows (indices into
/// `lp.constraints`, in order).
fn solve_active(
    lp: &LinearProgram,
    active: &[usize],
    cfg: &SolverConfig,
) -> Result<LPSolution, LpError> {
    let n = lp.n_vars();
    // maximize internally
    let c_struct: Vec<Rational> = match lp.sense {
        Sense::Maximize => lp.objective.clone(),
        Sense::Minimize => lp.objective.iter().map(|c| -c).collect(),
    };

    // standardize rows: nonnegative rhs
    let mut std_rows: Vec<(Vec<Rational>, Cmp, Rational)> = Vec::with_capacity(active.len());
    let mut negated = Vec::with_capacity(active.len());
    for &r in active {
        let c = &lp.constraints[r];
        if c.rhs.is_negative() {
            let coeffs: Vec<Rational> = c.coeffs.iter().map(|a| -a).collect();
            let cmp = match c.cmp {
                Cmp::Le => Cmp::Ge,
                Cmp::Ge => Cmp::Le,
                Cmp::Eq => Cmp::Eq,
            };
            std_rows.push((coeffs, cmp, -&c.rhs));
            negated.push(true);
        } else {
            std_rows.push((c.coeffs.clone(), c.cmp, c.rhs.clone()));
            negated.push(false);
        }
    }

    // column layout: structural, then slack/surplus in row order, then
    // artificials (kept last so phase 2 can truncate them)
    let m = std_rows.len();
    let mut cols: Vec<ColKind> = (0..n).map(ColKind::Structural).collect();
    let mut slack_col = vec![usize::MAX; m];
    for (i, (_, cmp, _)) in std_rows.iter().enumerate() {
        match cmp {
            Cmp::Le => {
                slack_col[i] = cols.len();
                cols.push(ColKind::Slack(i));
            }
            Cmp::Ge => {
                slack_col[i] = cols.len();
                cols.push(ColKind::Surplus(i));
            }
            Cmp::Eq => {}
        }
    }
    let mut art_col = vec![usize::MAX; m];
    for (i, (_, cmp, _)) in std_rows.iter().enumerate() {
        if matches!(cmp, Cmp::Ge | Cmp::Eq) {
            art_col[i] = cols.len();
            cols.push(ColKind::Artificial(i));
        }
    }
    let ncols = cols.len();

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for (i, (coeffs, cmp, rhs)) in std_rows.iter().enumerate() {
        let mut row = vec![Rational::zero(); ncols + 1];
        row[..n].clone_from_slice(coeffs);
        match cmp {
            Cmp::Le => {
                row[slack_col[i]] = Rational::one();
                basis.push(slack_col[i]);
            }
            Cmp::Ge => {
                row[slack_col[i]] = -Rational::one();
                row[art_col[i]] = Rational::one();
                basis.push(art_col[i]);
            }
            Cmp::Eq => {
                row[art_col[i]] = Rational::one();
                basis.push(art_col[i]);
            }
        }
        row[ncols] = rhs.clone();
        rows.push(row);
    }

    let mut t = Tableau {
        ncols,
        rows,
        row0: vec![Rational::zero(); ncols + 1],
        basis,
        cols,
        orig: active.to_vec(),
        negated,
        pivots: 0,
    };

    // phase 1: maximize -(sum of artificials), skipped when no artificials
    let has_artificials = t.basis.iter().any(|&b| matches!(t.cols[b], ColKind::Artificial(_)));
    if has_artificials {
        // row0 = c_B B^-1 A - c with c = -1 on artificial columns
        for j in 0..=ncols {
            let mut acc = Rational::zero();
            for i in 0..m {
                if matches!(t.cols[t.basis[i]], ColKind::Artificial(_)) {
                    acc -= &t.rows[i][j];
                }
            }
            if matches!(t.cols.get(j), Some(ColKind::Artificial(_))) {
                acc += Rational::one();
            }
            t.row0[j] = acc;
        }
        match t.simplex_loop(cfg.pivot_limit, cfg.stall_limit)? {
            LoopEnd::Optimal => {}
            LoopEnd::UnboundedCol(_) => {
                return Err(LpError::Internal("phase 1 cannot be unbounded"))
            }
        }
        if t.row0[ncols].is_negative() {
            // infeasible: multipliers y = c_B B^-1 read off the slack and
            // artificial columns of row0
            let mut full = vec![Rational::zero(); lp.constraints.len()];
            for i in 0..m {
                let y = match std_rows[i].1 {
                    Cmp::Le => t.row0[slack_col[i]].clone(),
                    Cmp::Ge | Cmp::Eq => &t.row0[art_col[i]] - &Rational::one(),
                };
                full[t.orig[i]] = if t.negated[i] { -y } else { y };
            }
            return Err(LpError::Infeasible(InfeasibilityCertificate {
                row_multipliers: full,
            }));
        }
        // drive leftover artificials out of the basis (their value is 0)
        let mut drop_rows: Vec<usize> = Vec::new();
        for i in 0..m {
            if !matches!(t.cols[t.basis[i]], ColKind::Artificial(_)) {
                continue;
            }
            let pivot_col = (0..ncols).find(|&j| {
                !matches!(t.cols[j], ColKind::Artificial(_)) && !t.rows[i][j].is_zero()
            });
            match pivot_col {
                Some(j) => t.pivot(i, j),
                None => drop_rows.push(i), // redundant constraint
            }
        }
        for &i in drop_rows.iter().rev() {
            t.rows.remove(i);
            t.basis.remove(i);
            t.orig.remove(i);
            t.negated.remove(i);
        }
        // truncate artificial columns (all trailing)
        let keep = (0..ncols)
            .take_while(|&j| !matches!(t.cols[j], ColKind::Artificial(_)))
            .count();
        for row in t.rows.iter_mut() {
            let rhs = row.pop().expect("rhs");
            row.truncate(keep);
            row.push(rhs);
        }
        t.cols.truncate(keep);
        t.ncols = keep;
    }

    // phase 2: true objective. c over current columns: structural costs,
    // zero elsewhere.
    let cost = |cols: &[ColKind], j: usize| -> Rational {
        match cols[j] {
            ColKind::Structural(v) => c_struct[v].clone(),
            _ => Rational::zero(),
        }
    };
    let mut row0 = vec![Rational::zero(); t.ncols + 1];
    for j in 0..t.ncols {
        let mut acc = -cost(&t.cols, j);
        for i in 0..t.rows.len() {
            let cb = cost(&t.cols, t.basis[i]);
            if !cb.is_zero() {
                acc += &cb * &t.rows[i][j];
            }
        }
        row0[j] = acc;
    }
    let mut obj = Rational::zero();
    for i in 0..t.rows.len() {
        let cb = cost(&t.cols, t.basis[i]);
        if !cb.is_zero() {
            obj += &cb * t.rhs(i);
        }
    }
    row0[t.ncols] = obj;
    t.row0 = row0;

    match t.simplex_loop(cfg.pivot_limit, cfg.stall_limit)? {
        LoopEnd::Optimal => {}
        LoopEnd::UnboundedCol(col) => {
            let mut direction = vec![Rational::zero(); n];
            if let ColKind::Structural(v) = t.cols[col] {
                direction[v] = Rational::one();
            }
            for i in 0..t.rows.len() {
                if let ColKind::Structural(v) = t.cols[t.basis[i]] {
                    direction[v] = -&t.rows[i][col];
                }
            }
            return Err(LpError::Unbounded(RayCertificate { direction }));
        }
    }

    let mut values = vec![Rational::zero(); n];
    for i in 0..t.rows.len() {
        if let ColKind::Structural(v) = t.cols[t.basis[i]] {
            values[v] = t.rhs(i).clone();
        }
    }
    let objective = match lp.sense {
        Sense::Maximize => t.row0[t.ncols].clone(),
        Sense::Minimize => -&t.row0[t.ncols],
    };
    let basis = t
        .basis
        .iter()
        .map(|&b| match t.cols[b] {
            ColKind::Structural(v) => BasisVar::Structural(v),
            ColKind::Slack(i) | ColKind::Surplus(i) => BasisVar::RowSlack(t.orig[i]),
            ColKind::Artificial(_) => BasisVar::RowSlack(usize::MAX), // unreachable
        })
        .collect();
    Ok(LPSolution {
        values,
        objective,
        basis,
        tight_rows: Vec::new(), // filled by finalize
        pivots: t.pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn ri(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn lp(sense: Sense, obj: &[i64], rows: &[(&[i64], Cmp, i64)]) -> LinearProgram {
        let mut p = LinearProgram::new(sense, obj.iter().map(|&c| ri(c)).collect());
        for (coeffs, cmp, rhs) in rows {
            p.add_constraint(coeffs.iter().map(|&c| ri(c)).collect(), *cmp, ri(*rhs))
                .unwrap();
        }
        p
    }

    #[test]
    fn simple_box() {
        let p = lp(
            Sense::Maximize,
            &[1, 1],
            &[(&[1, 0], Cmp::Le, 1), (&[0, 1], Cmp::Le, 2)],
        );
        let s = solve_exact(&p).unwrap();
        assert_eq!(s.objective, ri(3));
        assert_eq!(s.values, vec![ri(1), ri(2)]);
        assert_eq!(s.tight_rows, vec![0, 1]);
    }

    #[test]
    fn min_with_ge_needs_phase_one() {
        let p = lp(
            Sense::Minimize,
            &[1, 1],
            &[(&[1, 1], Cmp::Ge, 2), (&[1, 0], Cmp::Le, 5)],
        );
        let s = solve_exact(&p).unwrap();
        assert_eq!(s.objective, ri(2));
        assert_eq!(&s.values[0] + &s.values[1], ri(2));
    }

    #[test]
    fn equality_constraint() {
        let p = lp(
            Sense::Maximize,
            &[1, 0],
            &[(&[1, 1], Cmp::Eq, 3), (&[1, -1], Cmp::Le, 1)],
        );
        let s = solve_exact(&p).unwrap();
        assert_eq!(s.objective, ri(2));
        assert_eq!(s.values, vec![ri(2), ri(1)]);
    }

    #[test]
    fn fractional_optimum_is_exact() {
        // max x + y with 2x + y <= 3, x + 3y <= 5 meets at (4/5, 7/5)
        let p = lp(
            Sense::Maximize,
            &[1, 1],
            &[(&[2, 1], Cmp::Le, 3), (&[1, 3], Cmp::Le, 5)],
        );
        let s = solve_exact(&p).unwrap();
        assert_eq!(s.values, vec![r(4, 5), r(7, 5)]);
        assert_eq!(s.objective, r(11, 5));
        assert_eq!(s.tight_rows, vec![0, 1]);
    }

    #[test]
    fn infeasible_has_verifiable_certificate() {
        let p = lp(
            Sense::Maximize,
            &[1],
            &[(&[1], Cmp::Le, 1), (&[1], Cmp::Ge, 2)],
        );
        match solve_exact(&p) {
            Err(LpError::Infeasible(cert)) => assert!(cert.verify(&p)),
            other => panic!("expected infeasible, got {:?}", other.map(|s| s.objective)),
        }
        // infeasible equality system
        let p2 = lp(
            Sense::Minimize,
            &[1, 1],
            &[(&[1, 1], Cmp::Eq, 1), (&[2, 2], Cmp::Eq, 3)],
        );
        match solve_exact(&p2) {
            Err(LpError::Infeasible(cert)) => assert!(cert.verify(&p2)),
            other => panic!("expected infeasible, got {:?}", other.map(|s| s.objective)),
        }
    }

    #[test]
    fn unbounded_has_verifiable_ray() {
        let p = lp(Sense::Maximize, &[1, 0], &[(&[1, 0], Cmp::Ge, 1)]);
        match solve_exact(&p) {
            Err(LpError::Unbounded(ray)) => assert!(ray.verify(&p)),
            other => panic!("expected unbounded, got {:?}", other.map(|s| s.objective)),
        }
        // unbounded only along a combined direction
        let p2 = lp(
            Sense::Maximize,
            &[1, 1],
            &[(&[1, -1], Cmp::Le, 1), (&[-1, 1], Cmp::Le, 1)],
        );
        match solve_exact(&p2) {
            Err(LpError::Unbounded(ray)) => assert!(ray.verify(&p2)),
            other => panic!("expected unbounded, got {:?}", other.map(|s| s.objective)),
        }
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // classic example that cycles under the naive largest-coefficient
        // rule; Bland's rule must reach the optimum 1/20
        let mut p = LinearProgram::new(
            Sense::Maximize,
            vec![r(3, 4), ri(-150), r(1, 50), ri(-6)],
        );
        p.add_constraint(vec![r(1, 4), ri(-60), r(-1, 25), ri(9)], Cmp::Le, ri(0))
            .unwrap();
        p.add_constraint(vec![r(1, 2), ri(-90), r(-1, 50), ri(3)], Cmp::Le, ri(0))
            .unwrap();
        p.add_constraint(vec![ri(0), ri(0), ri(1), ri(0)], Cmp::Le, ri(1))
            .unwrap();
        let s = solve_exact(&p).unwrap();
        assert_eq!(s.objective, r(1, 20));
    }

    #[test]
    fn degenerate_rows_and_redundancy() {
        // duplicated equality rows force a redundant artificial row
        let p = lp(
            Sense::Maximize,
            &[1, 1],
            &[
                (&[1, 1], Cmp::Eq, 2),
                (&[1, 1], Cmp::Eq, 2),
                (&[1, 0], Cmp::Le, 1),
            ],
        );
        let s = solve_exact(&p).unwrap();
        assert_eq!(s.objective, ri(2));
    }

    #[test]
    fn negative_rhs_normalization() {
        // x - y <= -1 with b < 0 exercises rhs negation
        let p = lp(
            Sense::Maximize,
            &[1, -1],
            &[(&[1, -1], Cmp::Le, -1), (&[0, 1], Cmp::Le, 3)],
        );
        let s = solve_exact(&p).unwrap();
        assert_eq!(s.objective, ri(-1));
    }

    #[test]
    fn zero_vars_and_zero_rows() {
        let p = lp(Sense::Maximize, &[], &[]);
        let s = solve_exact(&p).unwrap();
        assert_eq!(s.objective, ri(0));
        let p2 = lp(Sense::Maximize, &[-1, -2], &[]);
        let s2 = solve_exact(&p2).unwrap();
        assert_eq!(s2.objective, ri(0));
        assert_eq!(s2.values, vec![ri(0), ri(0)]);
    }

    #[test]
    fn lazy_matches_dense() {
        // covering program with many rows: every window of 3 consecutive
        // variables (circularly) must reach 1
        let n = 12;
        let mut p = LinearProgram::new(Sense::Minimize, vec![ri(1); n]);
        for start in 0..n {
            let mut coeffs = vec![ri(0); n];
            for d in 0..3 {
                coeffs[(start + d) % n] = ri(1);
            }
            p.add_constraint(coeffs, Cmp::Ge, ri(1)).unwrap();
        }
        let dense_cfg = SolverConfig {
            lazy_row_floor: usize::MAX,
            ..Default::default()
        };
        let lazy_cfg = SolverConfig {
            lazy_row_floor: 0,
            lazy_row_factor: 0,
            activation_batch: 2,
            ..Default::default()
        };
        let a = solve_exact_with(&p, &dense_cfg).unwrap();
        let b = solve_exact_with(&p, &lazy_cfg).unwrap();
        assert_eq!(a.objective, b.objective);
        assert_eq!(a.objective, ri(4));
    }

    #[test]
    fn lazy_detects_infeasible_and_unbounded() {
        let mut p = LinearProgram::new(Sense::Minimize, vec![ri(1); 3]);
        for _ in 0..40 {
            p.add_constraint(vec![ri(1), ri(1), ri(1)], Cmp::Ge, ri(1)).unwrap();
        }
        p.add_constraint(vec![ri(1), ri(0), ri(0)], Cmp::Le, ri(-1)).unwrap();
        let lazy_cfg = SolverConfig {
            lazy_row_floor: 0,
            lazy_row_factor: 0,
            activation_batch: 1,
            ..Default::default()
        };
        match solve_exact_with(&p, &lazy_cfg) {
            Err(LpError::Infeasible(cert)) => assert!(cert.verify(&p)),
            other => panic!("expected infeasible, got {:?}", other.map(|s| s.objective)),
        }

        let mut q = LinearProgram::new(Sense::Maximize, vec![ri(1), ri(1)]);
        for i in 0..40 {
            q.add_constraint(vec![ri(1), ri(-1)], Cmp::Le, ri(i)).unwrap();
        }
        match solve_exact_with(&q, &lazy_cfg) {
            Err(LpError::Unbounded(ray)) => assert!(ray.verify(&q)),
            other => panic!("expected unbounded, got {:?}", other.map(|s| s.objective)),
        }
    }

    #[test]
    fn solution_reports_basis() {
        let p = lp(
            Sense::Maximize,
            &[1, 1],
            &[(&[1, 0], Cmp::Le, 1), (&[0, 1], Cmp::Le, 2), (&[1, 1], Cmp::Le, 10)],
        );
        let s = solve_exact(&p).unwrap();
        assert!(s.basis.contains(&BasisVar::Structural(0)));
        assert!(s.basis.contains(&BasisVar::Structural(1)));
        assert!(s.basis.contains(&BasisVar::RowSlack(2)));
    }
}
