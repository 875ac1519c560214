//! Minimal safe wrapper around the HiGHS C API, used as the LP-relaxation
//! engine for models too large for the dense simplex.
//!
//! One instance holds the immutable columns, rows, and objective of a
//! model; branch-and-bound nodes only move column bounds, so every re-solve
//! reuses the factored basis of the previous one. Output is silenced and
//! the solver is pinned to one thread, which keeps node relaxations
//! deterministic.

use std::ffi::{c_void, CString};
use std::os::raw::c_int;
use std::time::Duration;

use super::MilpModel;

/// HiGHS's representation of an infinite bound.
const HIGHS_INF: f64 = 1e30;

// kHighsModelStatus values (C API enum).
const STATUS_OPTIMAL: c_int = 7;
const STATUS_INFEASIBLE: c_int = 8;
const STATUS_UNBOUNDED_OR_INFEASIBLE: c_int = 9;
const STATUS_UNBOUNDED: c_int = 10;
const STATUS_TIME_LIMIT: c_int = 13;

/// Where one LP relaxation landed.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum RelaxOutcome {
    Optimal { x: Vec<f64> },
    Infeasible,
    Unbounded,
    TimeLimit,
}

/// Outcome plus the simplex iterations of this solve.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RelaxResult {
    pub outcome: RelaxOutcome,
    pub iterations: u64,
}

/// A persistent HiGHS instance holding one model's LP relaxation.
pub(crate) struct HighsLp {
    handle: *mut c_void,
    ncols: usize,
    nrows: usize,
    /// Column bounds currently installed in the solver; each solve only
    /// pushes the bounds that differ, so consecutive branch-and-bound
    /// nodes (which move one or two bounds) keep the basis hot.
    cur_lower: Vec<f64>,
    cur_upper: Vec<f64>,
    /// Scratch buffers for the bound-change call.
    delta_index: Vec<c_int>,
    delta_lower: Vec<f64>,
    delta_upper: Vec<f64>,
}

impl HighsLp {
    /// Loads the model's rows and objective. Column bounds passed here are
    /// placeholders; every solve installs its own.
    pub(crate) fn new(model: &MilpModel) -> Result<Self, String> {
        let ncols = model.num_vars();
        let nrows = model.num_constraints();
        let mut cost = vec![0.0; ncols];
        for (v, c) in &model.objective {
            cost[v.0] += *c;
        }
        let col_lower: Vec<f64> =
            model.vars().iter().map(|v| v.lower.max(-HIGHS_INF)).collect();
        let col_upper: Vec<f64> =
            model.vars().iter().map(|v| v.upper.min(HIGHS_INF)).collect();
        let mut row_lower = Vec::with_capacity(nrows);
        let mut row_upper = Vec::with_capacity(nrows);
        let mut by_col: Vec<Vec<(c_int, f64)>> = vec![Vec::new(); ncols];
        for (r, con) in model.constraints.iter().enumerate() {
            let (lo, up) = match con.sense {
                super::Sense::Le => (-HIGHS_INF, con.rhs),
                super::Sense::Ge => (con.rhs, HIGHS_INF),
                super::Sense::Eq => (con.rhs, con.rhs),
            };
            row_lower.push(lo);
            row_upper.push(up);
            for (v, a) in &con.terms {
                by_col[v.0].push((r as c_int, *a));
            }
        }
        let mut a_start: Vec<c_int> = Vec::with_capacity(ncols);
        let mut a_index: Vec<c_int> = Vec::new();
        let mut a_value: Vec<f64> = Vec::new();
        for col in &by_col {
            a_start.push(a_index.len() as c_int);
            for (r, a) in col {
                a_index.push(*r);
                a_value.push(*a);
            }
        }

        let handle = unsafe { highs_sys::Highs_create() };
        if handle.is_null() {
            return Err("failed to create solver instance".into());
        }
        let this = HighsLp {
            handle,
            ncols,
            nrows,
            cur_lower: col_lower.clone(),
            cur_upper: col_upper.clone(),
            delta_index: Vec::with_capacity(ncols),
            delta_lower: Vec::with_capacity(ncols),
            delta_upper: Vec::with_capacity(ncols),
        };
        this.set_bool_option("output_flag", false)?;
        this.set_int_option("threads", 1)?;
        // Branch-and-bound re-solves after changing a bound or two; a hot
        // basis beats presolve there, and rerunning presolve every node
        // costs more than the simplex work itself.
        this.set_string_option("presolve", "off")?;

        // Column-wise matrix (a_format 1), minimization (sense 1), offset 0.
        let status = unsafe {
            highs_sys::Highs_passLp(
                this.handle,
                ncols as c_int,
                nrows as c_int,
                a_value.len() as c_int,
                1,
                1,
                0.0,
                cost.as_ptr(),
                col_lower.as_ptr(),
                col_upper.as_ptr(),
                row_lower.as_ptr(),
                row_upper.as_ptr(),
                a_start.as_ptr(),
                a_index.as_ptr(),
                a_value.as_ptr(),
            )
        };
        if status < 0 {
            return Err("failed to load the LP".into());
        }
        Ok(this)
    }

    fn set_bool_option(&self, name: &str, value: bool) -> Result<(), String> {
        let name_c = CString::new(name).expect("option name");
        let status = unsafe {
            highs_sys::Highs_setBoolOptionValue(self.handle, name_c.as_ptr(), value as c_int)
        };
        if status < 0 {
            return Err(format!("failed to set option {name}"));
        }
        Ok(())
    }

    fn set_int_option(&self, name: &str, value: c_int) -> Result<(), String> {
        let name_c = CString::new(name).expect("option name");
        let status =
            unsafe { highs_sys::Highs_setIntOptionValue(self.handle, name_c.as_ptr(), value) };
        if status < 0 {
            return Err(format!("failed to set option {name}"));
        }
        Ok(())
    }

    fn set_double_option(&self, name: &str, value: f64) -> Result<(), String> {
        let name_c = CString::new(name).expect("option name");
        let status =
            unsafe { highs_sys::Highs_setDoubleOptionValue(self.handle, name_c.as_ptr(), value) };
        if status < 0 {
            return Err(format!("failed to set option {name}"));
        }
        Ok(())
    }

    fn set_string_option(&self, name: &str, value: &str) -> Result<(), String> {
        let name_c = CString::new(name).expect("option name");
        let value_c = CString::new(value).expect("option value");
        let status = unsafe {
            highs_sys::Highs_setStringOptionValue(self.handle, name_c.as_ptr(), value_c.as_ptr())
        };
        if status < 0 {
            return Err(format!("failed to set option {name}"));
        }
        Ok(())
    }

    fn model_status(&self) -> c_int {
        unsafe { highs_sys::Highs_getModelStatus(self.handle) }
    }

    fn run(&mut self) -> Result<c_int, String> {
        let status = unsafe { highs_sys::Highs_run(self.handle) };
        if status < 0 {
            return Err("solver run failed".into());
        }
        Ok(self.model_status())
    }

    fn fetch_solution(&self) -> Vec<f64> {
        let mut col_value = vec![0.0; self.ncols];
        let mut col_dual = vec![0.0; self.ncols];
        let mut row_value = vec![0.0; self.nrows];
        let mut row_dual = vec![0.0; self.nrows];
        unsafe {
            highs_sys::Highs_getSolution(
                self.handle,
                col_value.as_mut_ptr(),
                col_dual.as_mut_ptr(),
                row_value.as_mut_ptr(),
                row_dual.as_mut_ptr(),
            );
        }
        col_value
    }

    fn iterations(&self) -> u64 {
        let name_c = CString::new("simplex_iteration_count").expect("info name");
        let mut value: c_int = 0;
        let status = unsafe {
            highs_sys::Highs_getIntInfoValue(self.handle, name_c.as_ptr(), &mut value)
        };
        if status < 0 {
            0
        } else {
            value.max(0) as u64
        }
    }

    /// Solves the relaxation with the given column bounds (infinities are
    /// fine) and an optional wall-clock budget.
    pub(crate) fn solve(
        &mut self,
        lower: &[f64],
        upper: &[f64],
        time_limit: Option<Duration>,
    ) -> Result<RelaxResult, String> {
        assert_eq!(lower.len(), self.ncols);
        assert_eq!(upper.len(), self.ncols);
        self.delta_index.clear();
        self.delta_lower.clear();
        self.delta_upper.clear();
        for j in 0..self.ncols {
            let lo = lower[j].max(-HIGHS_INF);
            let up = upper[j].min(HIGHS_INF);
            if lo != self.cur_lower[j] || up != self.cur_upper[j] {
                self.delta_index.push(j as c_int);
                self.delta_lower.push(lo);
                self.delta_upper.push(up);
                self.cur_lower[j] = lo;
                self.cur_upper[j] = up;
            }
        }
        if !self.delta_index.is_empty() {
            let status = unsafe {
                highs_sys::Highs_changeColsBoundsBySet(
                    self.handle,
                    self.delta_index.len() as c_int,
                    self.delta_index.as_ptr(),
                    self.delta_lower.as_ptr(),
                    self.delta_upper.as_ptr(),
                )
            };
            if status < 0 {
                return Err("failed to update column bounds".into());
            }
        }
        self.set_double_option(
            "time_limit",
            time_limit.map(|d| d.as_secs_f64().max(0.001)).unwrap_or(HIGHS_INF),
        )?;

        let mut model_status = self.run()?;
        if model_status == STATUS_UNBOUNDED_OR_INFEASIBLE {
            // All-finite bounds make unboundedness impossible; otherwise
            // rerunning from the current basis separates the two verdicts.
            let all_finite = self.cur_lower.iter().all(|v| *v > -HIGHS_INF)
                && self.cur_upper.iter().all(|v| *v < HIGHS_INF);
            if all_finite {
                model_status = STATUS_INFEASIBLE;
            } else {
                model_status = self.run()?;
            }
        }
        let iterations = self.iterations();
        let outcome = match model_status {
            STATUS_OPTIMAL => RelaxOutcome::Optimal { x: self.fetch_solution() },
            STATUS_INFEASIBLE => RelaxOutcome::Infeasible,
            STATUS_UNBOUNDED => RelaxOutcome::Unbounded,
            STATUS_TIME_LIMIT => RelaxOutcome::TimeLimit,
            other => return Err(format!("unexpected solver status {other}")),
        };
        Ok(RelaxResult { outcome, iterations })
    }
}

impl Drop for HighsLp {
    fn drop(&mut self) {
        unsafe { highs_sys::Highs_destroy(self.handle) };
    }
}

#[cfg(test)]
mod tests {
    use super::super::{MilpModel, Sense};
    use super::*;

    fn two_var_model() -> MilpModel {
        let mut m = MilpModel::new("wrapper-smoke");
        let x = m.add_continuous("x", 0.0, 4.0);
        let y = m.add_continuous("y", 0.0, 4.0);
        m.add_constraint("sum", vec![(x, 1.0), (y, 1.0)], Sense::Le, 3.0);
        m.set_objective(vec![(x, -1.0), (y, -2.0)]);
        m
    }

    #[test]
    fn relaxation_solves_and_bound_changes_warm_restart() {
        let model = two_var_model();
        let mut lp = HighsLp::new(&model).unwrap();
        let lower = vec![0.0, 0.0];
        let upper = vec![4.0, 4.0];
        let r = lp.solve(&lower, &upper, None).unwrap();
        match r.outcome {
            RelaxOutcome::Optimal { x } => {
                // min -x - 2y: y to its cap 3... capped by the sum row.
                assert!((x[0] + x[1] - 3.0).abs() < 1e-7);
                assert!((x[1] - 3.0).abs() < 1e-7);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
        // Pin y to 0 and re-solve on the same instance.
        let r2 = lp.solve(&[0.0, 0.0], &[4.0, 0.0], None).unwrap();
        match r2.outcome {
            RelaxOutcome::Optimal { x } => {
                assert!((x[0] - 3.0).abs() < 1e-7);
                assert!(x[1].abs() < 1e-7);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded_bounds_are_reported() {
        let model = two_var_model();
        let mut lp = HighsLp::new(&model).unwrap();
        // Crossed with the row: x + y <= 3 but both lower bounds at 2.5.
        let r = lp.solve(&[2.5, 2.5], &[4.0, 4.0], None).unwrap();
        assert_eq!(r.outcome, RelaxOutcome::Infeasible);

        let mut free = MilpModel::new("free");
        let x = free.add_continuous("x", 0.0, f64::INFINITY);
        free.add_constraint("floor", vec![(x, 1.0)], Sense::Ge, 1.0);
        free.set_objective(vec![(x, -1.0)]);
        let mut lp2 = HighsLp::new(&free).unwrap();
        let r2 = lp2.solve(&[0.0], &[f64::INFINITY], None).unwrap();
        assert_eq!(r2.outcome, RelaxOutcome::Unbounded);
    }
}
