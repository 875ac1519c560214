//! Row-by-row feasibility audit of a named assignment.
//!
//! [`check_assignment`] re-evaluates every bound, integrality requirement,
//! and constraint of a model against a name-keyed point, so a solution can
//! be verified without trusting the solver that produced it — including
//! points read back from solution files or produced by an external engine.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{MilpModel, Sense, VarKind};

/// Why an audit could not run at all (violations are not errors; they are
/// the audit's result).
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CheckError {
    /// The assignment has no value for a model variable.
    #[error("assignment is missing variable {0}")]
    IncompleteAssignment(String),
}

/// Audits `assignment` against `model` with absolute tolerance `tol` and
/// returns the tags of everything violated, in model order: pseudo-rows
/// `bounds[<name>]` and `integrality[<name>]` per variable in declaration
/// order, then ordinary constraint tags in declaration order. An empty
/// vector means the point is feasible. Every model variable must be
/// assigned; extra names in the assignment are ignored.
pub fn check_assignment(
    model: &MilpModel,
    assignment: &BTreeMap<String, f64>,
    tol: f64,
) -> Result<Vec<String>, CheckError> {
    let mut x = Vec::with_capacity(model.num_vars());
    for v in model.vars() {
        match assignment.get(&v.name) {
            Some(value) => x.push(*value),
            None => return Err(CheckError::IncompleteAssignment(v.name.clone())),
        }
    }
    let mut violated = Vec::new();
    for (v, &value) in model.vars().iter().zip(&x) {
        if value < v.lower - tol || value > v.upper + tol {
            violated.push(format!("bounds[{}]", v.name));
        }
        if v.kind == VarKind::Binary && (value - value.round()).abs() > tol {
            violated.push(format!("integrality[{}]", v.name));
        }
    }
    for con in &model.constraints {
        let lhs = model.lhs_value(con, &x);
        let ok = match con.sense {
            Sense::Le => lhs <= con.rhs + tol,
            Sense::Ge => lhs >= con.rhs - tol,
            Sense::Eq => (lhs - con.rhs).abs() <= tol,
        };
        if !ok {
            violated.push(con.tag.clone());
        }
    }
    Ok(violated)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_var_model() -> MilpModel {
        let mut m = MilpModel::new("audit");
        let a = m.add_binary("a");
        let b = m.add_binary("b");
        let t = m.add_continuous("t", 0.0, 4.0);
        m.add_constraint("pick-one[k=1]", vec![(a, 1.0), (b, 1.0)], Sense::Eq, 1.0);
        m.add_constraint("load[k=1]", vec![(a, 3.0), (t, -1.0)], Sense::Le, 0.0);
        m.set_objective(vec![(t, 1.0)]);
        m
    }

    fn point(vals: &[(&str, f64)]) -> BTreeMap<String, f64> {
        vals.iter().map(|(n, v)| (n.to_string(), *v)).collect()
    }

    #[test]
    fn feasible_point_passes() {
        let m = two_var_model();
        let asg = point(&[("a", 1.0), ("b", 0.0), ("t", 3.0)]);
        assert_eq!(check_assignment(&m, &asg, 1e-6).unwrap(), Vec::<String>::new());
    }

    #[test]
    fn all_zeros_violates_the_equality_row() {
        let m = two_var_model();
        let asg = point(&[("a", 0.0), ("b", 0.0), ("t", 0.0)]);
        assert_eq!(check_assignment(&m, &asg, 1e-6).unwrap(), vec!["pick-one[k=1]"]);
    }

    #[test]
    fn bounds_and_integrality_pseudo_rows_come_first() {
        let m = two_var_model();
        let asg = point(&[("a", 0.4), ("b", 0.6), ("t", -1.0)]);
        let violations = check_assignment(&m, &asg, 1e-6).unwrap();
        assert_eq!(
            violations,
            vec!["integrality[a]", "integrality[b]", "bounds[t]", "load[k=1]"]
        );
    }

    #[test]
    fn missing_variable_is_an_error_and_extras_are_ignored() {
        let m = two_var_model();
        let missing = point(&[("a", 1.0), ("b", 0.0)]);
        assert_eq!(
            check_assignment(&m, &missing, 1e-6),
            Err(CheckError::IncompleteAssignment("t".into()))
        );
        let extra = point(&[("a", 1.0), ("b", 0.0), ("t", 3.0), ("zz", 7.0)]);
        assert!(check_assignment(&m, &extra, 1e-6).unwrap().is_empty());
    }

    #[test]
    fn tolerance_is_absolute_and_respected() {
        let m = two_var_model();
        let asg = point(&[("a", 1.0 + 2e-7), ("b", -2e-7), ("t", 3.0 + 2e-7)]);
        assert!(check_assignment(&m, &asg, 1e-6).unwrap().is_empty());
        let asg2 = point(&[("a", 1.0), ("b", 0.0), ("t", 2.9)]);
        assert_eq!(check_assignment(&m, &asg2, 1e-6).unwrap(), vec!["load[k=1]"]);
    }
}
