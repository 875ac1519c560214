//! Dense bounded-variable two-phase simplex, generic over [`Scalar`].
//!
//! This is the self-contained LP engine behind the in-tree branch-and-bound
//! (small models) and the exact rational feasibility solves in the flow
//! tooling. It keeps an explicit basis inverse, prices with Dantzig's rule,
//! and falls back to Bland's rule permanently once the objective stalls, so
//! it terminates on degenerate models. Exact scalar types run with zero
//! tolerances throughout; float runs verify the final point against every
//! original row and report a numerical failure naming the constraint rather
//! than returning a bad point.
//!
//! Shape: rows `a·x {<=,=,>=} b` over variables with finite lower bounds
//! and finite-or-infinite upper bounds. `>=` rows are negated to `<=` on
//! entry; each row gets a slack (`[0, inf)` or fixed `[0, 0]` for
//! equalities), and rows whose initial slack value is out of range get a
//! phase-1 artificial that the first phase prices out.

use thiserror::Error;

use super::{MilpModel, Sense};
use crate::scalar::Scalar;

/// One linear row of an [`LpProblem`].
#[derive(Debug, Clone, PartialEq)]
pub struct LpRow<S> {
    /// Name used in numerical-failure errors (constraint tag).
    pub name: String,
    /// `(column, coefficient)` terms; duplicate columns are summed.
    pub terms: Vec<(usize, S)>,
    /// Row sense.
    pub sense: Sense,
    /// Right-hand side.
    pub rhs: S,
}

/// A bounded linear program: minimize `cost · x` subject to `rows`, with
/// `lower[j] <= x[j] <= upper[j]` (`None` upper = unbounded above).
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem<S> {
    pub cost: Vec<S>,
    pub lower: Vec<S>,
    pub upper: Vec<Option<S>>,
    pub rows: Vec<LpRow<S>>,
}

/// Solve outcome.
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<S> {
    Optimal {
        objective: S,
        /// Values of the problem's own variables, clamped into bounds.
        x: Vec<S>,
    },
    Infeasible,
    Unbounded,
}

/// Outcome plus work counter.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexRun<S> {
    pub outcome: LpOutcome<S>,
    pub iterations: u64,
}

/// Failures that prevent a trustworthy answer.
#[derive(Debug, Error)]
pub enum SimplexError {
    #[error("problem is malformed: {0}")]
    BadProblem(String),
    #[error("numerical failure near constraint {0}")]
    Numeric(String),
    #[error("simplex iteration limit exceeded")]
    IterationLimit,
}

/// Knobs; the default iteration cap is far above what the dense backend's
/// size limit can need.
#[derive(Debug, Clone)]
pub struct SimplexOptions {
    pub max_iterations: u64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { max_iterations: 200_000 }
    }
}

/// The LP relaxation of a MILP with per-variable bounds supplied by the
/// caller (branch-and-bound tightens binaries node by node). `bounds` must
/// have one entry per model variable.
pub fn lp_relaxation(model: &MilpModel, bounds: &[(f64, f64)]) -> LpProblem<f64> {
    assert_eq!(bounds.len(), model.num_vars());
    let mut cost = vec![0.0; model.num_vars()];
    for (v, coef) in &model.objective {
        cost[v.0] += *coef;
    }
    LpProblem {
        cost,
        lower: bounds.iter().map(|(l, _)| *l).collect(),
        upper: bounds.iter().map(|(_, u)| if u.is_finite() { Some(*u) } else { None }).collect(),
        rows: model
            .constraints
            .iter()
            .map(|c| LpRow {
                name: c.tag.clone(),
                terms: c.terms.iter().map(|(v, a)| (v.0, *a)).collect(),
                sense: c.sense,
                rhs: c.rhs,
            })
            .collect(),
    }
}

/// Solves the problem. See the module docs for the algorithm.
pub fn solve_lp_problem<S: Scalar>(
    problem: &LpProblem<S>,
    options: &SimplexOptions,
) -> Result<SimplexRun<S>, SimplexError> {
    let mut t = Tableau::build(problem)?;
    t.run_phases(options)?;
    let iterations = t.iterations;
    let outcome = match t.state {
        State::Optimal => {
            t.refresh_basic_values();
            let x = t.extract(problem)?;
            let objective =
                problem.cost.iter().zip(&x).fold(S::zero(), |acc, (c, v)| {
                    acc + c.clone() * v.clone()
                });
            LpOutcome::Optimal { objective, x }
        }
        State::Infeasible => LpOutcome::Infeasible,
        State::Unbounded => LpOutcome::Unbounded,
        State::Running => unreachable!("phases ended while still running"),
    };
    Ok(SimplexRun { outcome, iterations })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum State {
    Running,
    Optimal,
    Infeasible,
    Unbounded,
}

struct Tableau<S> {
    m: usize,
    n_struct: usize,
    art_start: usize,
    /// Sparse columns (row, coefficient), structurals then slacks then
    /// artificials.
    cols: Vec<Vec<(usize, S)>>,
    lower: Vec<S>,
    upper: Vec<Option<S>>,
    cost: Vec<S>,
    x: Vec<S>,
    /// Column occupying each basis row.
    basis: Vec<usize>,
    /// Column -> basis row.
    pos: Vec<Option<usize>>,
    /// For nonbasic columns: sitting at upper rather than lower bound.
    at_upper: Vec<bool>,
    /// Explicit basis inverse, row-major.
    binv: Vec<Vec<S>>,
    /// Normalized right-hand sides.
    rhs: Vec<S>,
    /// Original structural costs, installed for phase 2.
    struct_cost: Vec<S>,
    needs_phase1: bool,
    state: State,
    bland: bool,
    stall: u32,
    iterations: u64,
}

impl<S: Scalar> Tableau<S> {
    fn build(p: &LpProblem<S>) -> Result<Self, SimplexError> {
        let n = p.cost.len();
        if p.lower.len() != n || p.upper.len() != n {
            return Err(SimplexError::BadProblem("cost/bound lengths differ".into()));
        }
        for (j, lo) in p.lower.iter().enumerate() {
            if let Some(up) = &p.upper[j] {
                if up < lo {
                    return Err(SimplexError::BadProblem(format!(
                        "crossed bounds on column {j}: [{lo}, {up}]"
                    )));
                }
            }
        }
        let m = p.rows.len();
        let mut cols: Vec<Vec<(usize, S)>> = vec![Vec::new(); n];
        let mut rhs = Vec::with_capacity(m);
        for (r, row) in p.rows.iter().enumerate() {
            let flip = row.sense == Sense::Ge;
            let mut dense: std::collections::BTreeMap<usize, S> = std::collections::BTreeMap::new();
            for (j, a) in &row.terms {
                if *j >= n {
                    return Err(SimplexError::BadProblem(format!(
                        "row {} references column {j} of {n}",
                        row.name
                    )));
                }
                let signed = if flip { -a.clone() } else { a.clone() };
                let slot = dense.entry(*j).or_insert_with(S::zero);
                *slot = slot.clone() + signed;
            }
            for (j, a) in dense {
                if !a.is_zero() {
                    cols[j].push((r, a));
                }
            }
            rhs.push(if flip { -row.rhs.clone() } else { row.rhs.clone() });
        }

        let mut lower = p.lower.clone();
        let mut upper = p.upper.clone();
        let mut cost = vec![S::zero(); n];
        let mut x: Vec<S> = p.lower.clone();
        // Slacks: `row + slack = rhs`; inequality slacks range upward,
        // equality slacks are pinned at zero.
        for (r, row) in p.rows.iter().enumerate() {
            cols.push(vec![(r, S::one())]);
            lower.push(S::zero());
            upper.push(if row.sense == Sense::Eq { Some(S::zero()) } else { None });
            cost.push(S::zero());
            x.push(S::zero());
        }
        let art_start = n + m;

        // Initial residuals with structurals at their lower bounds.
        let mut residual = rhs.clone();
        for (j, xj) in x.iter().enumerate().take(n) {
            if xj.is_zero() {
                continue;
            }
            for (r, a) in &cols[j] {
                residual[*r] = residual[*r].clone() - a.clone() * xj.clone();
            }
        }

        let mut basis = Vec::with_capacity(m);
        let mut binv = vec![vec![S::zero(); m]; m];
        let mut any_artificial = false;
        for (r, res) in residual.iter().enumerate() {
            let slack = n + r;
            let slack_ok = match &upper[slack] {
                Some(up) => res >= &S::zero() && res <= up, // equality: res == 0
                None => res >= &S::zero(),
            };
            if slack_ok {
                basis.push(slack);
                x[slack] = res.clone();
                binv[r][r] = S::one();
            } else {
                let sigma = if res > &S::zero() { S::one() } else { -S::one() };
                cols.push(vec![(r, sigma.clone())]);
                lower.push(S::zero());
                upper.push(None);
                cost.push(S::zero());
                x.push(res.clone().abs());
                basis.push(cols.len() - 1);
                binv[r][r] = sigma;
                any_artificial = true;
            }
        }
        let total = cols.len();
        let mut pos = vec![None; total];
        for (r, &j) in basis.iter().enumerate() {
            pos[j] = Some(r);
        }
        Ok(Tableau {
            m,
            n_struct: n,
            art_start,
            cols,
            lower,
            upper,
            cost,
            x,
            basis,
            pos,
            at_upper: vec![false; total],
            binv,
            rhs,
            struct_cost: p.cost.clone(),
            needs_phase1: any_artificial,
            state: State::Running,
            bland: false,
            stall: 0,
            iterations: 0,
        })
    }

    fn run_phases(&mut self, options: &SimplexOptions) -> Result<(), SimplexError> {
        if self.needs_phase1 {
            // Phase 1: price out the artificials.
            for j in self.art_start..self.cols.len() {
                self.cost[j] = S::one();
            }
            self.run(options)?;
            match self.state {
                State::Optimal => {}
                State::Unbounded => {
                    return Err(SimplexError::Numeric("phase-1 objective diverged".into()));
                }
                State::Infeasible | State::Running => {
                    unreachable!("a finished phase is optimal or unbounded")
                }
            }
            let infeasibility = (self.art_start..self.cols.len())
                .fold(S::zero(), |acc, j| acc + self.x[j].clone().abs());
            if infeasibility > self.feasibility_tol() {
                self.state = State::Infeasible;
                return Ok(());
            }
            self.evict_artificials();
            for j in self.art_start..self.cols.len() {
                self.cost[j] = S::zero();
                self.upper[j] = Some(S::zero());
                self.x[j] = S::zero();
            }
        }

        // Phase 2 with the real objective.
        self.state = State::Running;
        self.bland = false;
        self.stall = 0;
        let struct_cost = self.struct_cost.clone();
        for (j, c) in struct_cost.into_iter().enumerate() {
            self.cost[j] = c;
        }
        self.run(options)
    }

    /// Absolute feasibility tolerance scaled by the data magnitude.
    fn feasibility_tol(&self) -> S {
        if S::EXACT {
            return S::zero();
        }
        let mut scale = S::one();
        for b in &self.rhs {
            let a = b.clone().abs();
            if a > scale {
                scale = a;
            }
        }
        S::tol() * S::from_int(100) * scale
    }

    /// Pivots zero-valued artificials out of the basis where possible so
    /// phase 2 starts from a clean basis; truly redundant rows keep their
    /// pinned artificial.
    fn evict_artificials(&mut self) {
        for r in 0..self.m {
            if self.basis[r] < self.art_start {
                continue;
            }
            let mut chosen: Option<(usize, S)> = None;
            for j in 0..self.art_start {
                if self.pos[j].is_some() {
                    continue;
                }
                let alpha = self.row_coefficient(r, j);
                let big_enough = if S::EXACT {
                    !alpha.is_zero()
                } else {
                    alpha.clone().abs() > S::tol() * S::from_int(100)
                };
                if big_enough {
                    let better = match &chosen {
                        None => true,
                        Some((_, best)) => alpha.clone().abs() > best.clone().abs(),
                    };
                    if better {
                        chosen = Some((j, alpha.clone().abs()));
                    }
                }
            }
            if let Some((j, _)) = chosen {
                let w = self.ftran(j);
                let leaving = self.basis[r];
                self.pos[leaving] = None;
                self.at_upper[leaving] = false;
                self.x[leaving] = S::zero();
                self.basis[r] = j;
                self.pos[j] = Some(r);
                // Degenerate pivot: the entering variable keeps its value.
                self.pivot_binv(r, &w);
            }
        }
    }

    /// `(B^-1 A_j)[r]` for a single row.
    fn row_coefficient(&self, r: usize, j: usize) -> S {
        self.cols[j]
            .iter()
            .fold(S::zero(), |acc, (i, a)| acc + self.binv[r][*i].clone() * a.clone())
    }

    /// `B^-1 A_j` as a dense vector.
    fn ftran(&self, j: usize) -> Vec<S> {
        let mut w = vec![S::zero(); self.m];
        for (i, a) in &self.cols[j] {
            for (r, wr) in w.iter_mut().enumerate() {
                let b = &self.binv[r][*i];
                if !b.is_zero() {
                    *wr = wr.clone() + b.clone() * a.clone();
                }
            }
        }
        w
    }

    /// Duals `y = c_B B^-1`.
    fn duals(&self) -> Vec<S> {
        let mut y = vec![S::zero(); self.m];
        for (r, &j) in self.basis.iter().enumerate() {
            let cb = &self.cost[j];
            if cb.is_zero() {
                continue;
            }
            for (i, yi) in y.iter_mut().enumerate() {
                let b = &self.binv[r][i];
                if !b.is_zero() {
                    *yi = yi.clone() + cb.clone() * b.clone();
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, y: &[S]) -> S {
        self.cols[j]
            .iter()
            .fold(self.cost[j].clone(), |acc, (r, a)| acc - y[*r].clone() * a.clone())
    }

    fn pivot_binv(&mut self, r_piv: usize, w: &[S]) {
        let alpha = w[r_piv].clone();
        let inv = S::one() / alpha;
        for v in self.binv[r_piv].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        let piv_row = self.binv[r_piv].clone();
        for (r, w_r) in w.iter().enumerate() {
            if r == r_piv || w_r.is_zero() {
                continue;
            }
            for (i, v) in self.binv[r].iter_mut().enumerate() {
                if !piv_row[i].is_zero() {
                    *v = v.clone() - w_r.clone() * piv_row[i].clone();
                }
            }
        }
    }

    /// Recomputes every basic value from the nonbasic point; floats drift
    /// under incremental updates, and this also tidies exact runs.
    fn refresh_basic_values(&mut self) {
        let mut residual = self.rhs.clone();
        for j in 0..self.cols.len() {
            if self.pos[j].is_some() || self.x[j].is_zero() {
                continue;
            }
            for (r, a) in &self.cols[j] {
                residual[*r] = residual[*r].clone() - a.clone() * self.x[j].clone();
            }
        }
        for r in 0..self.m {
            let mut v = S::zero();
            for (i, res) in residual.iter().enumerate() {
                let b = &self.binv[r][i];
                if !b.is_zero() {
                    v = v + b.clone() * res.clone();
                }
            }
            self.x[self.basis[r]] = v;
        }
    }

    fn phase_objective(&self) -> S {
        self.cost
            .iter()
            .zip(&self.x)
            .fold(S::zero(), |acc, (c, v)| if c.is_zero() { acc } else { acc + c.clone() * v.clone() })
    }

    /// Runs pivots until the current phase's objective is optimal or the
    /// problem is unbounded. `self.state` carries the verdict.
    fn run(&mut self, options: &SimplexOptions) -> Result<(), SimplexError> {
        let tol = S::tol();
        let neg_tol = -S::tol();
        loop {
            if self.iterations >= options.max_iterations {
                return Err(SimplexError::IterationLimit);
            }
            if !S::EXACT && self.iterations % 128 == 127 {
                self.refresh_basic_values();
            }
            let y = self.duals();
            // Entering column: Dantzig (largest violation) normally,
            // least-index once stalled.
            let mut entering: Option<(usize, S)> = None;
            for j in 0..self.cols.len() {
                if self.pos[j].is_some() {
                    continue;
                }
                if let Some(up) = &self.upper[j] {
                    if *up == self.lower[j] {
                        continue; // fixed
                    }
                }
                let d = self.reduced_cost(j, &y);
                let viol = if self.at_upper[j] { d } else { -d };
                if viol > tol {
                    if self.bland {
                        entering = Some((j, viol));
                        break;
                    }
                    let better = match &entering {
                        None => true,
                        Some((_, best)) => viol > *best,
                    };
                    if better {
                        entering = Some((j, viol));
                    }
                }
            }
            let (j_in, _viol) = match entering {
                Some(e) => e,
                None => {
                    self.state = State::Optimal;
                    return Ok(());
                }
            };

            let w = self.ftran(j_in);
            let from_upper = self.at_upper[j_in];
            // Moving x_j by `dir * t` changes basics by `-dir * t * w`.
            let span: Option<S> =
                self.upper[j_in].as_ref().map(|u| u.clone() - self.lower[j_in].clone());

            // Ratio test, pass 1: the tightest step.
            let mut t_best: Option<S> = None;
            for (r, w_r) in w.iter().enumerate() {
                let v = if from_upper { -w_r.clone() } else { w_r.clone() };
                let basic = self.basis[r];
                let limit = if v > tol {
                    let room = self.x[basic].clone() - self.lower[basic].clone();
                    Some(room / v)
                } else if v < neg_tol {
                    self.upper[basic]
                        .as_ref()
                        .map(|u| (u.clone() - self.x[basic].clone()) / -v)
                } else {
                    None
                };
                if let Some(mut limit) = limit {
                    if limit < S::zero() {
                        limit = S::zero(); // degeneracy beyond tolerance
                    }
                    let tighter = match &t_best {
                        None => true,
                        Some(best) => limit < *best,
                    };
                    if tighter {
                        t_best = Some(limit);
                    }
                }
            }

            let bound_flip = match (&span, &t_best) {
                (Some(s), Some(t)) => s < t,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => {
                    self.state = State::Unbounded;
                    return Ok(());
                }
            };

            let obj_before = self.phase_objective();
            if bound_flip {
                let t = span.expect("bound flip needs a finite span");
                self.step_basics(&w, from_upper, &t);
                self.at_upper[j_in] = !from_upper;
                self.x[j_in] = if from_upper {
                    self.lower[j_in].clone()
                } else {
                    self.upper[j_in].clone().expect("finite span implies finite upper")
                };
            } else {
                let t = t_best.expect("non-flip step needs a row limit");
                // Pass 2: among rows tied at the tightest step, pick the
                // stablest pivot (largest |w|), or the least basis column
                // under Bland's rule.
                let mut r_out: Option<(usize, S)> = None;
                for (r, w_r) in w.iter().enumerate() {
                    let v = if from_upper { -w_r.clone() } else { w_r.clone() };
                    let basic = self.basis[r];
                    let limit = if v > tol {
                        Some((self.x[basic].clone() - self.lower[basic].clone()) / v)
                    } else if v < neg_tol {
                        self.upper[basic]
                            .as_ref()
                            .map(|u| (u.clone() - self.x[basic].clone()) / -v)
                    } else {
                        None
                    };
                    let Some(mut limit) = limit else { continue };
                    if limit < S::zero() {
                        limit = S::zero();
                    }
                    if limit.clone() - t.clone() <= tol {
                        let take = match &r_out {
                            None => true,
                            Some((r_cur, best_mag)) => {
                                if self.bland {
                                    self.basis[r] < self.basis[*r_cur]
                                } else {
                                    w_r.clone().abs() > *best_mag
                                }
                            }
                        };
                        if take {
                            r_out = Some((r, w_r.clone().abs()));
                        }
                    }
                }
                let (r_out, _) = r_out.expect("tightest step has a row");
                let hit_upper = {
                    let v = if from_upper { -w[r_out].clone() } else { w[r_out].clone() };
                    v < S::zero()
                };
                self.step_basics(&w, from_upper, &t);
                let leaving = self.basis[r_out];
                // Snap the leaving variable exactly onto the bound it hit.
                self.x[leaving] = if hit_upper {
                    self.upper[leaving].clone().expect("hit an upper bound")
                } else {
                    self.lower[leaving].clone()
                };
                self.at_upper[leaving] = hit_upper;
                self.pos[leaving] = None;
                self.x[j_in] = if from_upper {
                    self.upper[j_in].clone().expect("came from upper") - t.clone()
                } else {
                    self.lower[j_in].clone() + t.clone()
                };
                self.basis[r_out] = j_in;
                self.pos[j_in] = Some(r_out);
                self.pivot_binv(r_out, &w);
            }
            self.iterations += 1;

            // Stall bookkeeping: no strict progress for a while means
            // possible cycling, so switch to Bland's rule for good.
            let obj_after = self.phase_objective();
            let improved = obj_before.clone() - obj_after.clone() > tol;
            if improved {
                self.stall = 0;
            } else {
                self.stall += 1;
                if self.stall > 60 {
                    self.bland = true;
                }
            }
        }
    }

    /// Applies `x_B -= dir * t * w` for a step `t` of the entering column.
    fn step_basics(&mut self, w: &[S], from_upper: bool, t: &S) {
        if t.is_zero() {
            return;
        }
        for (r, w_r) in w.iter().enumerate() {
            if w_r.is_zero() {
                continue;
            }
            let v = if from_upper { -w_r.clone() } else { w_r.clone() };
            let basic = self.basis[r];
            self.x[basic] = self.x[basic].clone() - t.clone() * v;
        }
    }

    /// Final answer: clamp structurals into bounds and verify every
    /// original row; floats that drifted past tolerance are an error, not
    /// an answer.
    fn extract(&mut self, p: &LpProblem<S>) -> Result<Vec<S>, SimplexError> {
        let mut x: Vec<S> = self.x[..self.n_struct].to_vec();
        for (j, v) in x.iter_mut().enumerate() {
            if *v < p.lower[j] {
                *v = p.lower[j].clone();
            }
            if let Some(up) = &p.upper[j] {
                if *v > *up {
                    *v = up.clone();
                }
            }
        }
        let tol = self.feasibility_tol();
        for row in &p.rows {
            let lhs = row
                .terms
                .iter()
                .fold(S::zero(), |acc, (j, a)| acc + a.clone() * x[*j].clone());
            let diff = lhs - row.rhs.clone();
            let ok = match row.sense {
                Sense::Le => diff <= tol,
                Sense::Ge => -diff <= tol,
                Sense::Eq => diff.clone().abs() <= tol,
            };
            if !ok {
                return Err(SimplexError::Numeric(row.name.clone()));
            }
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use super::*;

    type Rat = BigRational;

    fn row<S: Scalar>(name: &str, terms: Vec<(usize, S)>, sense: Sense, rhs: S) -> LpRow<S> {
        LpRow { name: name.into(), terms, sense, rhs }
    }

    fn solve<S: Scalar>(p: &LpProblem<S>) -> LpOutcome<S> {
        solve_lp_problem(p, &SimplexOptions::default()).unwrap().outcome
    }

    #[test]
    fn box_lp_reaches_the_right_vertex() {
        let p: LpProblem<f64> = LpProblem {
            cost: vec![-1.0, -1.0],
            lower: vec![0.0, 0.0],
            upper: vec![Some(1.0), Some(1.0)],
            rows: vec![row("cap", vec![(0, 1.0), (1, 1.0)], Sense::Le, 1.0)],
        };
        match solve(&p) {
            LpOutcome::Optimal { objective, x } => {
                assert!((objective + 1.0).abs() < 1e-9);
                assert!((x[0] + x[1] - 1.0).abs() < 1e-9);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn ge_rows_and_equalities_work() {
        let p: LpProblem<f64> = LpProblem {
            cost: vec![1.0],
            lower: vec![0.0],
            upper: vec![Some(5.0)],
            rows: vec![row("floor", vec![(0, 1.0)], Sense::Ge, 2.0)],
        };
        match solve(&p) {
            LpOutcome::Optimal { objective, .. } => assert!((objective - 2.0).abs() < 1e-9),
            other => panic!("unexpected outcome {other:?}"),
        }

        let p2: LpProblem<f64> = LpProblem {
            cost: vec![1.0, 1.0],
            lower: vec![0.0, 0.0],
            upper: vec![Some(2.0), Some(2.0)],
            rows: vec![row("sum", vec![(0, 1.0), (1, 1.0)], Sense::Eq, 3.0)],
        };
        match solve(&p2) {
            LpOutcome::Optimal { objective, x } => {
                assert!((objective - 3.0).abs() < 1e-9);
                assert!((x[0] + x[1] - 3.0).abs() < 1e-9);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded_are_detected() {
        let p: LpProblem<f64> = LpProblem {
            cost: vec![0.0],
            lower: vec![0.0],
            upper: vec![Some(10.0)],
            rows: vec![
                row("ceil", vec![(0, 1.0)], Sense::Le, 1.0),
                row("floor", vec![(0, 1.0)], Sense::Ge, 2.0),
            ],
        };
        assert_eq!(solve(&p), LpOutcome::Infeasible);

        let p2: LpProblem<f64> = LpProblem {
            cost: vec![-1.0],
            lower: vec![0.0],
            upper: vec![None],
            rows: vec![row("slacky", vec![(0, -1.0)], Sense::Le, 3.0)],
        };
        assert_eq!(solve(&p2), LpOutcome::Unbounded);
    }

    #[test]
    fn problems_without_rows_flip_bounds() {
        let p: LpProblem<f64> = LpProblem {
            cost: vec![-1.0, 2.0],
            lower: vec![0.0, -1.0],
            upper: vec![Some(7.0), Some(4.0)],
            rows: vec![],
        };
        match solve(&p) {
            LpOutcome::Optimal { objective, x } => {
                assert_eq!(x, vec![7.0, -1.0]);
                assert!((objective + 9.0).abs() < 1e-12);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn fixed_variables_stay_fixed() {
        let p: LpProblem<f64> = LpProblem {
            cost: vec![1.0, 1.0],
            lower: vec![2.0, 0.0],
            upper: vec![Some(2.0), Some(9.0)],
            rows: vec![row("need", vec![(0, 1.0), (1, 1.0)], Sense::Ge, 5.0)],
        };
        match solve(&p) {
            LpOutcome::Optimal { x, .. } => {
                assert!((x[0] - 2.0).abs() < 1e-12);
                assert!((x[1] - 3.0).abs() < 1e-9);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn redundant_rows_keep_a_pinned_artificial() {
        // The duplicated equality is linearly dependent, so one artificial
        // cannot be pivoted out; the solve must still finish and agree.
        let p: LpProblem<f64> = LpProblem {
            cost: vec![1.0, 0.0],
            lower: vec![0.0, 0.0],
            upper: vec![Some(9.0), Some(9.0)],
            rows: vec![
                row("eq1", vec![(0, 1.0), (1, 1.0)], Sense::Eq, 4.0),
                row("eq2", vec![(0, 1.0), (1, 1.0)], Sense::Eq, 4.0),
                row("tilt", vec![(1, 1.0)], Sense::Le, 3.0),
            ],
        };
        match solve(&p) {
            LpOutcome::Optimal { objective, .. } => assert!((objective - 1.0).abs() < 1e-9),
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn rational_arithmetic_is_exact() {
        let r = |n: i64, d: i64| Rat::ratio(n, d);
        let p = LpProblem {
            cost: vec![r(-1, 1), r(-1, 1)],
            lower: vec![r(0, 1), r(0, 1)],
            upper: vec![None, None],
            rows: vec![
                row("a", vec![(0, r(3, 1)), (1, r(1, 1))], Sense::Le, r(1, 1)),
                row("b", vec![(0, r(1, 1)), (1, r(3, 1))], Sense::Le, r(1, 1)),
            ],
        };
        match solve(&p) {
            LpOutcome::Optimal { objective, x } => {
                assert_eq!(objective, r(-1, 2));
                assert_eq!(x, vec![r(1, 4), r(1, 4)]);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn float_and_rational_agree_on_fuzzed_relaxations() {
        for seed in 0..40u64 {
            let model = super::super::miniature_model(seed);
            let bounds: Vec<(f64, f64)> =
                model.vars().iter().map(|v| (v.lower, v.upper)).collect();
            let pf = lp_relaxation(&model, &bounds);
            let pr = LpProblem {
                cost: pf.cost.iter().map(|c| Rat::from_f64_exact(*c)).collect(),
                lower: pf.lower.iter().map(|c| Rat::from_f64_exact(*c)).collect(),
                upper: pf
                    .upper
                    .iter()
                    .map(|u| u.as_ref().map(|v| Rat::from_f64_exact(*v)))
                    .collect(),
                rows: pf
                    .rows
                    .iter()
                    .map(|r| LpRow {
                        name: r.name.clone(),
                        terms: r
                            .terms
                            .iter()
                            .map(|(j, a)| (*j, Rat::from_f64_exact(*a)))
                            .collect(),
                        sense: r.sense,
                        rhs: Rat::from_f64_exact(r.rhs),
                    })
                    .collect(),
            };
            let rf = solve(&pf);
            let rr = solve(&pr);
            match (rf, rr) {
                (
                    LpOutcome::Optimal { objective: of, .. },
                    LpOutcome::Optimal { objective: or, .. },
                ) => {
                    assert!(
                        (of - Scalar::to_f64(&or)).abs() <= 1e-6,
                        "seed {seed}: {of} vs {or}"
                    );
                }
                (LpOutcome::Infeasible, LpOutcome::Infeasible) => {}
                (a, b) => panic!("seed {seed}: float {a:?} vs exact {b:?}"),
            }
        }
    }

    #[test]
    fn solves_are_deterministic() {
        let model = super::super::miniature_model(7);
        let bounds: Vec<(f64, f64)> = model.vars().iter().map(|v| (v.lower, v.upper)).collect();
        let p = lp_relaxation(&model, &bounds);
        let a = solve_lp_problem(&p, &SimplexOptions::default()).unwrap();
        let b = solve_lp_problem(&p, &SimplexOptions::default()).unwrap();
        assert_eq!(a, b);
    }
}
