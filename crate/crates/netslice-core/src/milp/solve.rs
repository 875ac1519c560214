//! Deterministic branch-and-bound over LP relaxations.
//!
//! The tree search is fully specified so repeated runs produce identical
//! trees: branching picks the highest-priority, most fractional binary
//! (ties to the lowest variable id) and explores the rounded side first in
//! a depth-first dive. Until a first incumbent exists the other side goes
//! onto a backtrack stack — pure depth-first search reaches an integral
//! leaf quickly and keeps consecutive relaxations nearly identical, which
//! the warm-started engine rewards. Once an incumbent exists the stack
//! drains into a best-bound heap ordered by `(bound, creation id)` and the
//! proof proceeds best-first. Node relaxations come from the dense in-tree
//! simplex for small models and from a persistent external LP engine above
//! the size cutoff; both are single-threaded and deterministic, so the
//! only source of nondeterminism is an expiring wall-clock or node budget.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use thiserror::Error;

use super::highs::{HighsLp, RelaxOutcome, RelaxResult};
use super::simplex::{lp_relaxation, solve_lp_problem, LpOutcome, SimplexError, SimplexOptions};
use super::{MilpModel, VarKind};

/// Variable name -> value. Name-keyed so assignments survive LP round
/// trips and can be checked against a model independently of ids.
pub type Assignment = BTreeMap<String, f64>;

/// How a solve ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Proven optimal within the requested gap.
    Optimal,
    /// No integer-feasible point exists.
    Infeasible,
    /// A budget (wall clock or node count) expired; the incumbent, if any,
    /// is feasible but not proven optimal.
    FeasibleTimeLimit,
    /// The relaxation is unbounded, so no finite optimum exists.
    Unbounded,
}

/// Work counters for one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveStats {
    /// Branch-and-bound nodes whose relaxation was solved.
    pub nodes: u64,
    /// Total simplex iterations across all node relaxations.
    pub lp_iterations: u64,
    /// Wall-clock time of the whole solve.
    pub wall: Duration,
}

/// Result of [`solve_exact`].
#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution {
    pub status: SolveStatus,
    /// Incumbent objective (present whenever `assignment` is).
    pub objective: Option<f64>,
    /// Incumbent point over all model variables.
    pub assignment: Option<Assignment>,
    /// Best proven lower bound on the optimum, when finite.
    pub bound: Option<f64>,
    /// Relative gap `(objective - bound) / max(1, |objective|)` when both
    /// parts exist.
    pub gap: Option<f64>,
    pub stats: SolveStats,
}

/// Which LP engine solves node relaxations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpBackend {
    /// Dense simplex below [`DENSE_LIMIT`], external engine above.
    Auto,
    /// Always the in-tree dense simplex.
    Dense,
    /// Always the external engine.
    Highs,
}

/// `Auto` switches engines at this many variables plus constraints.
pub const DENSE_LIMIT: usize = 800;

/// Search budgets and tolerances.
#[derive(Debug, Clone)]
pub struct SolveLimits {
    pub time_limit: Duration,
    pub node_limit: Option<u64>,
    /// Relative optimality gap at which subtrees are pruned; zero proves
    /// exact optimality.
    pub gap: f64,
    /// A binary this close to an integer counts as integral.
    pub int_tol: f64,
    pub backend: LpBackend,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits {
            time_limit: Duration::from_secs(600),
            node_limit: None,
            gap: 1e-3,
            int_tol: 1e-6,
            backend: LpBackend::Auto,
        }
    }
}

/// Failures that prevent any verdict.
#[derive(Debug, Error)]
pub enum SolveError {
    #[error("model is malformed: {0}")]
    BadModel(String),
    #[error(transparent)]
    Simplex(#[from] SimplexError),
    #[error("relaxation engine failure: {0}")]
    Backend(String),
}

/// One open subtree: binaries in `fixes` are pinned, `bound` is the parent
/// relaxation value (a lower bound on everything below), and `branch`
/// remembers the fix that created this node — variable, side, and how far
/// the parent's LP value had to move — so the child's relaxation can feed
/// the pseudocost estimates.
#[derive(Debug, Clone)]
struct OpenNode {
    bound: f64,
    id: u64,
    fixes: Vec<(usize, u8)>,
    branch: Option<(usize, u8, f64)>,
}

impl PartialEq for OpenNode {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}
impl Eq for OpenNode {}
impl Ord for OpenNode {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; reverse so pop() yields the lowest
        // bound, then the oldest node.
        other.bound.total_cmp(&self.bound).then_with(|| other.id.cmp(&self.id))
    }
}
impl PartialOrd for OpenNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

enum NodeEngine<'m> {
    Dense(&'m MilpModel),
    Highs(Box<HighsLp>),
}

impl NodeEngine<'_> {
    fn solve(
        &mut self,
        lower: &[f64],
        upper: &[f64],
        time_limit: Option<Duration>,
    ) -> Result<RelaxResult, SolveError> {
        match self {
            NodeEngine::Dense(model) => {
                let bounds: Vec<(f64, f64)> =
                    lower.iter().zip(upper).map(|(l, u)| (*l, *u)).collect();
                let problem = lp_relaxation(model, &bounds);
                let run = solve_lp_problem(&problem, &SimplexOptions::default())?;
                let outcome = match run.outcome {
                    LpOutcome::Optimal { x, .. } => RelaxOutcome::Optimal { x },
                    LpOutcome::Infeasible => RelaxOutcome::Infeasible,
                    LpOutcome::Unbounded => RelaxOutcome::Unbounded,
                };
                Ok(RelaxResult { outcome, iterations: run.iterations })
            }
            NodeEngine::Highs(lp) => {
                lp.solve(lower, upper, time_limit).map_err(SolveError::Backend)
            }
        }
    }
}

fn validate(model: &MilpModel) -> Result<(), SolveError> {
    if model.num_vars() == 0 {
        return Err(SolveError::BadModel("model has no variables".into()));
    }
    for v in model.vars() {
        if v.lower.is_nan() || v.upper.is_nan() || v.lower == f64::INFINITY
            || v.upper == f64::NEG_INFINITY
        {
            return Err(SolveError::BadModel(format!(
                "variable {} has bounds [{}, {}]",
                v.name, v.lower, v.upper
            )));
        }
        if v.lower > v.upper {
            return Err(SolveError::BadModel(format!(
                "variable {} has crossed bounds [{}, {}]",
                v.name, v.lower, v.upper
            )));
        }
        if v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0) {
            return Err(SolveError::BadModel(format!(
                "binary {} has bounds outside [0, 1]",
                v.name
            )));
        }
    }
    for (_, c) in &model.objective {
        if !c.is_finite() {
            return Err(SolveError::BadModel("objective has a non-finite coefficient".into()));
        }
    }
    for con in &model.constraints {
        if !con.rhs.is_finite() {
            return Err(SolveError::BadModel(format!("{} has a non-finite rhs", con.tag)));
        }
        for (_, a) in &con.terms {
            if !a.is_finite() {
                return Err(SolveError::BadModel(format!(
                    "{} has a non-finite coefficient",
                    con.tag
                )));
            }
        }
    }
    Ok(())
}

fn gap_slack(gap: f64, incumbent: f64) -> f64 {
    gap * incumbent.abs().max(1.0)
}

/// Per-variable, per-direction estimates of how much the relaxation
/// objective degrades per unit of bound movement when a binary is pushed
/// down to 0 or up to 1, learned from solved child relaxations. Variables
/// without observations borrow the running average of their direction, so
/// a fresh search starts out ranking by fractionality alone and sharpens
/// as evidence accumulates.
struct PseudoCosts {
    sum: [Vec<f64>; 2],
    count: [Vec<u32>; 2],
    total: [f64; 2],
    observed: [u32; 2],
}

impl PseudoCosts {
    fn new(num_vars: usize) -> Self {
        PseudoCosts {
            sum: [vec![0.0; num_vars], vec![0.0; num_vars]],
            count: [vec![0; num_vars], vec![0; num_vars]],
            total: [0.0; 2],
            observed: [0; 2],
        }
    }

    fn record(&mut self, j: usize, side: u8, distance: f64, degradation: f64) {
        let unit = degradation.max(0.0) / distance.max(1e-6);
        let d = side as usize;
        self.sum[d][j] += unit;
        self.count[d][j] += 1;
        self.total[d] += unit;
        self.observed[d] += 1;
    }

    /// Estimated objective degradation for moving variable `j` to `side`
    /// across `distance`. Falls back to the direction-wide average, then
    /// to a neutral unit cost, so the product rule below degenerates to
    /// most-fractional ordering on a cold start.
    fn estimate(&self, j: usize, side: u8, distance: f64) -> f64 {
        let d = side as usize;
        let unit = if self.count[d][j] > 0 {
            self.sum[d][j] / self.count[d][j] as f64
        } else if self.observed[d] > 0 {
            self.total[d] / self.observed[d] as f64
        } else {
            1.0
        };
        unit * distance
    }
}

/// Index of the binary to branch on, or `None` when all binaries are
/// integral under `int_tol`. Among fractional binaries the highest branch
/// priority wins; within a priority class the largest product of the
/// estimated down- and up-degradations wins (the classic pseudocost
/// product rule); ties go to the lowest variable id.
fn branch_candidate(
    binaries: &[usize],
    priorities: &[i32],
    pc: &PseudoCosts,
    x: &[f64],
    int_tol: f64,
) -> Option<usize> {
    let mut best: Option<(usize, i32, f64)> = None;
    for &j in binaries {
        let frac = (x[j] - x[j].round()).abs();
        if frac > int_tol {
            let down = x[j].clamp(0.0, 1.0);
            let up = 1.0 - down;
            let score = pc.estimate(j, 0, down).max(1e-12) * pc.estimate(j, 1, up).max(1e-12);
            let better = match &best {
                None => true,
                Some((_, p, s)) => (priorities[j], score) > (*p, *s),
            };
            if better {
                best = Some((j, priorities[j], score));
            }
        }
    }
    best.map(|(j, _, _)| j)
}

/// Solves the MILP to the requested gap with deterministic
/// branch-and-bound. See the module docs for the search order contract.
pub fn solve_exact(model: &MilpModel, limits: &SolveLimits) -> Result<MilpSolution, SolveError> {
    validate(model)?;
    let start = Instant::now();
    let deadline = start + limits.time_limit;

    let base: Vec<(f64, f64)> = model.vars().iter().map(|v| (v.lower, v.upper)).collect();
    let has_free_lower = base.iter().any(|(l, _)| *l == f64::NEG_INFINITY);
    let size = model.num_vars() + model.num_constraints();
    let use_dense = match limits.backend {
        LpBackend::Dense => {
            if has_free_lower {
                return Err(SolveError::BadModel(
                    "the dense engine needs finite lower bounds".into(),
                ));
            }
            true
        }
        LpBackend::Highs => false,
        LpBackend::Auto => size <= DENSE_LIMIT && !has_free_lower,
    };
    let mut engine = if use_dense {
        NodeEngine::Dense(model)
    } else {
        NodeEngine::Highs(Box::new(HighsLp::new(model).map_err(SolveError::Backend)?))
    };

    let binaries: Vec<usize> = (0..model.num_vars())
        .filter(|j| model.vars()[*j].kind == VarKind::Binary)
        .collect();
    let priorities: Vec<i32> = model.vars().iter().map(|v| v.branch_priority).collect();
    let mut pc = PseudoCosts::new(model.num_vars());

    struct Incumbent {
        obj: f64,
        x: Vec<f64>,
    }
    let mut incumbent: Option<Incumbent> = None;
    let mut heap: BinaryHeap<OpenNode> = BinaryHeap::new();
    // Backtrack stack for the incumbent hunt: popped LIFO while no
    // incumbent exists, drained into the heap as soon as one does.
    let mut stack: Vec<OpenNode> = Vec::new();
    let mut dive =
        Some(OpenNode { bound: f64::NEG_INFINITY, id: 0, fixes: Vec::new(), branch: None });
    let mut next_id: u64 = 1;
    let mut nodes: u64 = 0;
    let mut lp_iterations: u64 = 0;
    let mut min_pruned = f64::INFINITY;
    let mut out_of_budget = false;
    let mut unbounded = false;

    let mut lo = vec![0.0; base.len()];
    let mut up = vec![0.0; base.len()];

    loop {
        if incumbent.is_some() && !stack.is_empty() {
            heap.extend(stack.drain(..));
        }
        let Some(node) = dive.take().or_else(|| stack.pop()).or_else(|| heap.pop()) else {
            break;
        };
        let now = Instant::now();
        if now >= deadline {
            heap.push(node);
            out_of_budget = true;
            break;
        }
        if let Some(max_nodes) = limits.node_limit {
            if nodes >= max_nodes {
                heap.push(node);
                out_of_budget = true;
                break;
            }
        }
        if let Some(inc) = &incumbent {
            if node.bound >= inc.obj - gap_slack(limits.gap, inc.obj) {
                min_pruned = min_pruned.min(node.bound);
                continue;
            }
        }

        for (j, (l, u)) in base.iter().enumerate() {
            lo[j] = *l;
            up[j] = *u;
        }
        let mut crossed = false;
        for &(j, v) in &node.fixes {
            lo[j] = lo[j].max(v as f64);
            up[j] = up[j].min(v as f64);
            crossed |= lo[j] > up[j];
        }
        if crossed {
            continue;
        }

        let remaining = deadline.saturating_duration_since(now);
        let result = engine.solve(&lo, &up, Some(remaining))?;
        lp_iterations += result.iterations;
        match result.outcome {
            RelaxOutcome::TimeLimit => {
                heap.push(node);
                out_of_budget = true;
                break;
            }
            RelaxOutcome::Infeasible => {
                nodes += 1;
            }
            RelaxOutcome::Unbounded => {
                nodes += 1;
                unbounded = true;
                break;
            }
            RelaxOutcome::Optimal { x } => {
                nodes += 1;
                let node_obj = model.objective_value(&x);
                if let Some((j, side, distance)) = node.branch {
                    if node.bound.is_finite() {
                        pc.record(j, side, distance, node_obj - node.bound);
                    }
                }
                if let Some(inc) = &incumbent {
                    if node_obj >= inc.obj - gap_slack(limits.gap, inc.obj) {
                        min_pruned = min_pruned.min(node_obj);
                        continue;
                    }
                }
                match branch_candidate(&binaries, &priorities, &pc, &x, limits.int_tol) {
                    None => {
                        let better = match &incumbent {
                            None => true,
                            Some(inc) => node_obj < inc.obj,
                        };
                        if better {
                            incumbent = Some(Incumbent { obj: node_obj, x });
                        }
                    }
                    Some(j) => {
                        let side = x[j].round().clamp(0.0, 1.0) as u8;
                        let frac = x[j].clamp(0.0, 1.0);
                        let dist = |s: u8| if s == 0 { frac } else { 1.0 - frac };
                        let mut preferred = node.fixes.clone();
                        preferred.push((j, side));
                        let mut other = node.fixes;
                        other.push((j, 1 - side));
                        dive = Some(OpenNode {
                            bound: node_obj,
                            id: next_id,
                            fixes: preferred,
                            branch: Some((j, side, dist(side))),
                        });
                        let sibling = OpenNode {
                            bound: node_obj,
                            id: next_id + 1,
                            fixes: other,
                            branch: Some((j, 1 - side, dist(1 - side))),
                        };
                        if incumbent.is_none() {
                            stack.push(sibling);
                        } else {
                            heap.push(sibling);
                        }
                        next_id += 2;
                    }
                }
            }
        }
    }

    let wall = start.elapsed();
    let stats = SolveStats { nodes, lp_iterations, wall };

    if unbounded {
        return Ok(MilpSolution {
            status: SolveStatus::Unbounded,
            objective: None,
            assignment: None,
            bound: None,
            gap: None,
            stats,
        });
    }

    // Best proven lower bound: open subtrees and gap-pruned subtrees cap
    // it from below; the incumbent caps it from above.
    let mut best_bound = min_pruned;
    for open in heap.iter().chain(&stack) {
        best_bound = best_bound.min(open.bound);
    }
    if let Some(inc) = &incumbent {
        best_bound = best_bound.min(inc.obj);
    }

    let status = if out_of_budget {
        SolveStatus::FeasibleTimeLimit
    } else if incumbent.is_some() {
        SolveStatus::Optimal
    } else {
        SolveStatus::Infeasible
    };
    let (objective, assignment) = match &incumbent {
        Some(inc) => {
            let names: Assignment = model
                .vars()
                .iter()
                .zip(&inc.x)
                .map(|(v, value)| (v.name.clone(), *value))
                .collect();
            (Some(inc.obj), Some(names))
        }
        None => (None, None),
    };
    let bound = best_bound.is_finite().then_some(best_bound);
    let gap = match (&incumbent, bound) {
        (Some(inc), Some(b)) => Some(((inc.obj - b) / inc.obj.abs().max(1.0)).max(0.0)),
        _ => None,
    };
    Ok(MilpSolution { status, objective, assignment, bound, gap, stats })
}

/// Exponential enumeration oracle for test suites: tries every binary
/// pattern, solves the continuous remainder with the dense simplex, and
/// returns the best objective and point. `None` means no pattern is
/// feasible. Panics above 20 binaries.
pub fn brute_force_minimum(
    model: &MilpModel,
) -> Result<Option<(f64, Assignment)>, SolveError> {
    validate(model)?;
    let binaries: Vec<usize> = (0..model.num_vars())
        .filter(|j| model.vars()[*j].kind == VarKind::Binary)
        .collect();
    assert!(binaries.len() <= 20, "enumeration over {} binaries", binaries.len());
    let base: Vec<(f64, f64)> = model.vars().iter().map(|v| (v.lower, v.upper)).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1u32 << binaries.len()) {
        let mut bounds = base.clone();
        let mut crossed = false;
        for (bit, &j) in binaries.iter().enumerate() {
            let v = ((mask >> bit) & 1) as f64;
            let (l, u) = bounds[j];
            bounds[j] = (l.max(v), u.min(v));
            crossed |= bounds[j].0 > bounds[j].1;
        }
        if crossed {
            continue;
        }
        let problem = lp_relaxation(model, &bounds);
        let run = solve_lp_problem(&problem, &SimplexOptions::default())?;
        match run.outcome {
            LpOutcome::Optimal { x, .. } => {
                let obj = model.objective_value(&x);
                let better = match &best {
                    None => true,
                    Some((b, _)) => obj < *b,
                };
                if better {
                    best = Some((obj, x));
                }
            }
            LpOutcome::Infeasible => {}
            LpOutcome::Unbounded => {
                return Err(SolveError::Backend("unbounded under fixed binaries".into()));
            }
        }
    }
    Ok(best.map(|(obj, x)| {
        let names: Assignment = model
            .vars()
            .iter()
            .zip(&x)
            .map(|(v, value)| (v.name.clone(), *value))
            .collect();
        (obj, names)
    }))
}

#[cfg(test)]
mod tests {
    use super::super::{miniature_model, Sense};
    use super::*;

    fn exact_limits() -> SolveLimits {
        SolveLimits { gap: 0.0, ..SolveLimits::default() }
    }

    #[test]
    fn small_selection_model_is_solved_to_optimality() {
        let mut m = MilpModel::new("pick");
        let a = m.add_binary("a");
        let b = m.add_binary("b");
        let c = m.add_binary("c");
        m.add_constraint("cap", vec![(a, 1.0), (b, 1.0), (c, 1.0)], Sense::Le, 2.0);
        m.set_objective(vec![(a, -3.0), (b, -2.0), (c, -2.0)]);
        let sol = solve_exact(&m, &exact_limits()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective.unwrap() + 5.0).abs() < 1e-9);
        let asg = sol.assignment.unwrap();
        assert_eq!(asg["a"], 1.0);
        assert!((asg["b"] + asg["c"] - 1.0).abs() < 1e-9);
        assert_eq!(sol.gap, Some(0.0));
    }

    #[test]
    fn infeasible_and_unbounded_models_get_their_status() {
        let mut m = MilpModel::new("no");
        let a = m.add_binary("a");
        let b = m.add_binary("b");
        m.add_constraint("too-much", vec![(a, 1.0), (b, 1.0)], Sense::Ge, 3.0);
        m.set_objective(vec![(a, 1.0), (b, 1.0)]);
        let sol = solve_exact(&m, &exact_limits()).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
        assert!(sol.assignment.is_none());

        let mut m2 = MilpModel::new("down");
        let x = m2.add_continuous("x", 0.0, f64::INFINITY);
        let y = m2.add_continuous("y", 0.0, f64::INFINITY);
        m2.add_constraint("tie", vec![(x, 1.0), (y, -1.0)], Sense::Eq, 0.0);
        m2.set_objective(vec![(x, 1.0), (y, -2.0)]);
        let sol2 = solve_exact(&m2, &exact_limits()).unwrap();
        assert_eq!(sol2.status, SolveStatus::Unbounded);
    }

    #[test]
    fn node_budget_reports_feasible_time_limit() {
        // Force branching, then allow a single node.
        let mut m = MilpModel::new("tight");
        let a = m.add_binary("a");
        let b = m.add_binary("b");
        m.add_constraint("half", vec![(a, 2.0), (b, 2.0)], Sense::Le, 3.0);
        m.set_objective(vec![(a, -2.0), (b, -1.9)]);
        let limits = SolveLimits { node_limit: Some(1), gap: 0.0, ..SolveLimits::default() };
        let sol = solve_exact(&m, &limits).unwrap();
        assert_eq!(sol.status, SolveStatus::FeasibleTimeLimit);
        assert_eq!(sol.stats.nodes, 1);
    }

    #[test]
    fn enumeration_oracle_agrees_on_fuzzed_models() {
        let limits = exact_limits();
        for seed in 0..50u64 {
            let model = miniature_model(seed);
            let oracle = brute_force_minimum(&model).unwrap();
            let sol = solve_exact(&model, &limits).unwrap();
            match (oracle, sol.status) {
                (Some((best, _)), SolveStatus::Optimal) => {
                    let got = sol.objective.unwrap();
                    assert!(
                        (got - best).abs() <= 1e-6,
                        "seed {seed}: solver {got} vs enumeration {best}"
                    );
                }
                (None, SolveStatus::Infeasible) => {}
                (oracle, status) => {
                    panic!("seed {seed}: oracle {oracle:?} vs status {status:?}")
                }
            }
        }
    }

    #[test]
    fn both_engines_agree() {
        for seed in [1u64, 3, 5, 8, 13, 21, 34, 42] {
            let model = miniature_model(seed);
            let dense = solve_exact(
                &model,
                &SolveLimits { backend: LpBackend::Dense, gap: 0.0, ..SolveLimits::default() },
            )
            .unwrap();
            let external = solve_exact(
                &model,
                &SolveLimits { backend: LpBackend::Highs, gap: 0.0, ..SolveLimits::default() },
            )
            .unwrap();
            assert_eq!(dense.status, external.status, "seed {seed}");
            if let (Some(a), Some(b)) = (dense.objective, external.objective) {
                assert!((a - b).abs() <= 1e-6, "seed {seed}: dense {a} vs external {b}");
            }
        }
    }

    #[test]
    fn repeated_solves_are_identical() {
        let model = miniature_model(11);
        let a = solve_exact(&model, &exact_limits()).unwrap();
        let b = solve_exact(&model, &exact_limits()).unwrap();
        assert_eq!(a.status, b.status);
        assert_eq!(a.objective, b.objective);
        assert_eq!(a.assignment, b.assignment);
        assert_eq!(a.bound, b.bound);
        assert_eq!(a.gap, b.gap);
        assert_eq!(a.stats.nodes, b.stats.nodes);
        assert_eq!(a.stats.lp_iterations, b.stats.lp_iterations);
    }

    #[test]
    fn default_gap_stays_within_its_promise() {
        for seed in 0..12u64 {
            let model = miniature_model(seed);
            let exact = solve_exact(&model, &exact_limits()).unwrap();
            let loose = solve_exact(&model, &SolveLimits::default()).unwrap();
            assert_eq!(exact.status, loose.status, "seed {seed}");
            if let (Some(a), Some(b)) = (exact.objective, loose.objective) {
                // The prune slack is taken against the incumbent at prune
                // time, so the promise has a small second-order cushion.
                let slack = 1.1e-3 * a.abs().max(1.0) + 1e-9;
                assert!(b <= a + slack && b >= a - 1e-9, "seed {seed}: {b} vs {a}");
            }
        }
    }
}
