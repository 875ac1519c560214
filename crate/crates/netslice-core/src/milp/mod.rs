//! Solver-agnostic mixed-integer linear programming layer.
//!
//! [`MilpModel`] is a plain data representation of a minimization MILP:
//! named variables (binary or bounded continuous), tagged linear
//! constraints, and a linear objective. Model builders construct it, the
//! exporters in [`lp`] turn it into solver-readable text, [`solve`] runs
//! the in-tree branch-and-bound over either the dense simplex in
//! [`simplex`] or the external LP engine wrapped by [`highs`], and
//! [`check`] re-evaluates assignments against the model independently of
//! any solver.
//!
//! Constraint tags follow the grammar `family[key=value,...]`; the family
//! part names what the constraint does, the bracket part pins down the
//! instance coordinates (service `k`, stage/segment `s`, path `p`, node or
//! link ids). Tags are the join key between solver-side diagnostics and
//! domain-level reporting, so they are unique per model.

pub mod check;
pub mod highs;
pub mod lp;
pub mod simplex;
pub mod solve;

use std::collections::BTreeMap;

pub use check::{check_assignment, CheckError};
pub use lp::{export_lp, parse_lp, parse_sol, write_sol, LpError};
pub use solve::{
    solve_exact, Assignment, LpBackend, MilpSolution, SolveError, SolveLimits, SolveStats,
    SolveStatus,
};

/// Variable kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    /// Integer restricted to {0, 1}.
    Binary,
    /// Continuous within its bounds.
    Continuous,
}

/// Handle to a variable of one [`MilpModel`] (its declaration index).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

/// A declared variable.
#[derive(Debug, Clone, PartialEq)]
pub struct VarDef {
    /// Unique name, legal in LP files.
    pub name: String,
    /// Binary or continuous.
    pub kind: VarKind,
    /// Lower bound (binaries: 0).
    pub lower: f64,
    /// Upper bound (binaries: 1); `f64::INFINITY` for unbounded.
    pub upper: f64,
    /// Branching hint for the solver: among fractional binaries, higher
    /// priorities are branched on first. Purely advisory — it never
    /// changes the feasible set or the optimum, only the search order.
    pub branch_priority: i32,
}

/// Constraint sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    /// Left-hand side `<=` right-hand side.
    Le,
    /// Equality.
    Eq,
    /// Left-hand side `>=` right-hand side.
    Ge,
}

impl Sense {
    /// LP-format spelling.
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

/// One tagged linear constraint. Terms are sorted by variable id, merged,
/// and free of zero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    /// Unique tag, `family[coordinates]`.
    pub tag: String,
    /// Sorted, merged, nonzero terms.
    pub terms: Vec<(VarId, f64)>,
    /// Sense.
    pub sense: Sense,
    /// Right-hand side.
    pub rhs: f64,
}

/// A minimization MILP.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MilpModel {
    /// Model name (shows up as an LP comment).
    pub name: String,
    vars: Vec<VarDef>,
    by_name: BTreeMap<String, VarId>,
    /// Constraints in declaration order.
    pub constraints: Vec<Constraint>,
    /// Objective terms (minimized), sorted and merged like constraint terms.
    pub objective: Vec<(VarId, f64)>,
    /// Free-form provenance entries (instance fingerprint, formulation
    /// name, path budget, objective weights, ...).
    pub metadata: BTreeMap<String, String>,
}

/// The `family` part of a tag: everything before the first `[`.
pub fn family_of(tag: &str) -> &str {
    match tag.find('[') {
        Some(i) => &tag[..i],
        None => tag,
    }
}

pub(crate) fn merge_terms(mut terms: Vec<(VarId, f64)>) -> Vec<(VarId, f64)> {
    terms.sort_by_key(|(v, _)| *v);
    let mut out: Vec<(VarId, f64)> = Vec::with_capacity(terms.len());
    for (v, c) in terms {
        match out.last_mut() {
            Some((last, acc)) if *last == v => *acc += c,
            _ => out.push((v, c)),
        }
    }
    out.retain(|(_, c)| *c != 0.0);
    out
}

impl MilpModel {
    /// Creates an empty model.
    pub fn new(name: impl Into<String>) -> Self {
        MilpModel { name: name.into(), ..Default::default() }
    }

    /// Declares a binary variable. Panics on duplicate names: the builders
    /// derive names injectively from instance coordinates, so a duplicate
    /// is a builder defect, not an input error.
    pub fn add_binary(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name.into(), VarKind::Binary, 0.0, 1.0, 0)
    }

    /// Declares a binary with a branching priority (see
    /// [`VarDef::branch_priority`]).
    pub fn add_binary_with_priority(&mut self, name: impl Into<String>, priority: i32) -> VarId {
        self.add_var(name.into(), VarKind::Binary, 0.0, 1.0, priority)
    }

    /// Declares a bounded continuous variable (`lower <= upper`,
    /// `upper` may be infinite).
    pub fn add_continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> VarId {
        assert!(lower <= upper, "variable bounds are crossed: [{lower}, {upper}]");
        self.add_var(name.into(), VarKind::Continuous, lower, upper, 0)
    }

    /// Declares a variable with explicit kind and bounds; used by the LP
    /// parser, which must reproduce files where e.g. a binary carries
    /// extra bound lines.
    pub(crate) fn add_var_raw(
        &mut self,
        name: String,
        kind: VarKind,
        lower: f64,
        upper: f64,
        branch_priority: i32,
    ) -> VarId {
        self.add_var(name, kind, lower, upper, branch_priority)
    }

    fn add_var(
        &mut self,
        name: String,
        kind: VarKind,
        lower: f64,
        upper: f64,
        branch_priority: i32,
    ) -> VarId {
        let id = VarId(self.vars.len());
        let previous = self.by_name.insert(name.clone(), id);
        assert!(previous.is_none(), "duplicate variable name {name}");
        self.vars.push(VarDef { name, kind, lower, upper, branch_priority });
        id
    }

    /// Adds a constraint; terms are merged and zeros dropped. Rows that
    /// would become empty must be skipped by the caller (they are either
    /// trivially true or mark a modeling defect), so this panics on them.
    pub fn add_constraint(
        &mut self,
        tag: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) {
        let tag = tag.into();
        let terms = merge_terms(terms);
        assert!(!terms.is_empty(), "constraint {tag} has no nonzero terms");
        self.constraints.push(Constraint { tag, terms, sense, rhs });
    }

    /// Sets the (minimized) objective.
    pub fn set_objective(&mut self, terms: Vec<(VarId, f64)>) {
        self.objective = merge_terms(terms);
    }

    /// Variable handle by name.
    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    /// Variable definition by handle.
    pub fn var(&self, id: VarId) -> &VarDef {
        &self.vars[id.0]
    }

    /// All variables in declaration order.
    pub fn vars(&self) -> &[VarDef] {
        &self.vars
    }

    /// Number of variables.
    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Number of binary variables.
    pub fn num_binaries(&self) -> usize {
        self.vars.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    /// Number of constraints.
    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Number of nonzero constraint coefficients.
    pub fn num_nonzeros(&self) -> usize {
        self.constraints.iter().map(|c| c.terms.len()).sum()
    }

    /// Objective value of a full assignment vector (by declaration index).
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().map(|(v, c)| c * x[v.0]).sum()
    }

    /// Evaluates one constraint's left-hand side.
    pub fn lhs_value(&self, constraint: &Constraint, x: &[f64]) -> f64 {
        constraint.terms.iter().map(|(v, c)| c * x[v.0]).sum()
    }

    /// Constraint count per tag family, for structural assertions and
    /// size reports.
    pub fn census(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for c in &self.constraints {
            *out.entry(family_of(&c.tag).to_string()).or_insert(0) += 1;
        }
        out
    }

    /// A copy of the model without every constraint of the given family
    /// (exact family match, not substring). Variables and objective are
    /// kept, so solutions remain comparable.
    pub fn without_family(&self, family: &str) -> MilpModel {
        let mut out = self.clone();
        out.constraints.retain(|c| family_of(&c.tag) != family);
        out
    }

    /// Checks tag uniqueness; builders call this after assembling a model.
    pub fn assert_unique_tags(&self) {
        let mut seen = BTreeMap::new();
        for (i, c) in self.constraints.iter().enumerate() {
            if let Some(first) = seen.insert(c.tag.as_str(), i) {
                panic!("duplicate constraint tag {} (rows {first} and {i})", c.tag);
            }
        }
    }
}

/// Deterministic pseudo-random micro-MILP, used to fuzz the solver against
/// brute-force enumeration. Every model has at most 10 binaries and a few
/// bounded continuous variables, so enumerating all binary patterns is
/// cheap; seeds cover feasible and infeasible cases.
pub fn miniature_model(seed: u64) -> MilpModel {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x6d696c70);
    let mut model = MilpModel::new(format!("miniature-{seed}"));
    let nb = rng.gen_range(2..=10);
    let nc = rng.gen_range(0..=4);
    let mut ids = Vec::new();
    for i in 0..nb {
        ids.push(model.add_binary(format!("b{i}")));
    }
    for i in 0..nc {
        let upper = rng.gen_range(1..=6) as f64;
        ids.push(model.add_continuous(format!("c{i}"), 0.0, upper));
    }
    let rows = rng.gen_range(2..=12);
    for r in 0..rows {
        let mut terms = Vec::new();
        for &id in &ids {
            if rng.gen_bool(0.45) {
                // Half-integer coefficients in [-5, 5] \ {0}.
                let mut c = 0.0;
                while c == 0.0 {
                    c = rng.gen_range(-10..=10) as f64 / 2.0;
                }
                terms.push((id, c));
            }
        }
        if terms.is_empty() {
            terms.push((ids[r % ids.len()], 1.0));
        }
        let sense = match rng.gen_range(0..6) {
            0 => Sense::Eq, // equalities kept rare: they often empty the feasible set
            1 | 2 => Sense::Ge,
            _ => Sense::Le,
        };
        let rhs = rng.gen_range(-8..=12) as f64 / 2.0;
        model.add_constraint(format!("row[r={r}]"), terms, sense, rhs);
    }
    let objective = ids
        .iter()
        .map(|&id| {
            let mut c = 0.0;
            while c == 0.0 {
                c = rng.gen_range(-6..=6) as f64;
            }
            (id, c)
        })
        .collect();
    model.set_objective(objective);
    model
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terms_are_merged_sorted_and_zero_free() {
        let mut m = MilpModel::new("t");
        let a = m.add_binary("a");
        let b = m.add_binary("b");
        m.add_constraint(
            "row[r=0]",
            vec![(b, 1.0), (a, 2.0), (b, -1.0), (a, 0.5)],
            Sense::Le,
            1.0,
        );
        // b's coefficients cancel; a's merge to 2.5.
        assert_eq!(m.constraints[0].terms, vec![(a, 2.5)]);
    }

    #[test]
    #[should_panic(expected = "duplicate variable name")]
    fn duplicate_names_are_rejected() {
        let mut m = MilpModel::new("t");
        m.add_binary("a");
        m.add_binary("a");
    }

    #[test]
    #[should_panic(expected = "no nonzero terms")]
    fn empty_rows_are_rejected() {
        let mut m = MilpModel::new("t");
        let a = m.add_binary("a");
        m.add_constraint("row[r=0]", vec![(a, 1.0), (a, -1.0)], Sense::Le, 0.0);
    }

    #[test]
    fn census_counts_families_and_without_family_removes_them() {
        let mut m = MilpModel::new("t");
        let a = m.add_binary("a");
        let b = m.add_binary("b");
        m.add_constraint("one[k=1]", vec![(a, 1.0)], Sense::Le, 1.0);
        m.add_constraint("one[k=2]", vec![(b, 1.0)], Sense::Le, 1.0);
        m.add_constraint("two[k=1]", vec![(a, 1.0), (b, 1.0)], Sense::Ge, 1.0);
        m.set_objective(vec![(a, 1.0), (b, 1.0)]);
        let census = m.census();
        assert_eq!(census["one"], 2);
        assert_eq!(census["two"], 1);
        let reduced = m.without_family("one");
        assert_eq!(reduced.num_constraints(), 1);
        assert_eq!(reduced.num_vars(), 2);
        // Family match is exact, not substring.
        assert_eq!(m.without_family("on").num_constraints(), 3);
    }

    #[test]
    fn family_of_handles_plain_tags() {
        assert_eq!(family_of("link-capacity[(A,B)]"), "link-capacity");
        assert_eq!(family_of("aggregate-capacity"), "aggregate-capacity");
    }

    #[test]
    fn miniature_models_are_deterministic_and_small() {
        for seed in 0..30 {
            let a = miniature_model(seed);
            let b = miniature_model(seed);
            assert_eq!(a, b);
            assert!(a.num_binaries() <= 10);
            assert!(!a.objective.is_empty());
            a.assert_unique_tags();
        }
    }
}
