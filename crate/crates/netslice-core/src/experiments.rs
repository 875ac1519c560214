//! Experiment engine behind the command-line harness: side-by-side
//! comparison of the two formulations, seeded sweep campaigns with CSV
//! output, and small reference oracles for cross-checking the weighted
//! objective.
//!
//! CSV layout rule: wall-time columns always come last, so determinism
//! checks can strip them and compare everything else byte for byte.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use thiserror::Error;

use crate::gen::{generate_preset, GenError};
use crate::milp::{solve_exact, Sense, SolveError, SolveLimits, SolveStatus};
use crate::model::{SlicingInstance, SlicingSolution};
use crate::ns1::{build_ns1, BuildError, BuildOptions};
use crate::ns2::build_ns2;
use crate::scalar::Scalar;
use crate::semantics::{decode_ns2, verify_domain, DecodeError};
use crate::vnet::VirtualNetwork;
use crate::{flowdec, Rat};

/// Warns when the delay weight is too large for the activated-node count
/// to take priority: the objective is lexicographic only while
/// `sigma < 1 / sum_k budget_k`. Exact arithmetic; `None` means the weight
/// is inside the window (or there are no services to prioritize).
pub fn sigma_window_warning<S: Scalar>(instance: &SlicingInstance<S>) -> Option<String> {
    let budget_sum = instance
        .services
        .iter()
        .fold(S::zero(), |acc, svc| acc + svc.latency_budget.clone());
    if budget_sum <= S::zero() {
        return None;
    }
    if instance.weights.sigma.clone() * budget_sum.clone() >= S::one() {
        Some(format!(
            "sigma = {} is not below 1/(sum of latency budgets) = 1/{budget_sum}; \
             the objective no longer minimizes the activated-node count first",
            instance.weights.sigma
        ))
    } else {
        None
    }
}

fn status_str(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Optimal => "optimal",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::FeasibleTimeLimit => "time-limit",
        SolveStatus::Unbounded => "unbounded",
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line(fields: &[String]) -> String {
    fields.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(",")
}

fn opt_num<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// One instance solved with both formulations.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    /// Where the instance came from (file name or preset/seed).
    pub label: String,
    pub services: usize,
    pub pairwise_status: String,
    pub aggregated_status: String,
    pub pairwise_objective: Option<f64>,
    pub aggregated_objective: Option<f64>,
    /// Whether the two formulations agree: equal optima (within 1e-6) or
    /// matching infeasibility. Absent when a time limit interfered.
    pub agree: Option<bool>,
    pub pairwise_vars: usize,
    pub pairwise_cons: usize,
    pub aggregated_vars: usize,
    pub aggregated_cons: usize,
    pub pairwise_time_s: f64,
    pub aggregated_time_s: f64,
}

/// Builds and solves both formulations of one instance, timing each solve.
/// Build failures surface as an error string in both status columns.
pub fn compare_instance<S: Scalar>(
    label: &str,
    instance: &SlicingInstance<S>,
    options: &BuildOptions,
    limits: &SolveLimits,
) -> CompareRow {
    let vnet = VirtualNetwork::build(instance);
    let mut row = CompareRow {
        label: label.to_string(),
        services: instance.services.len(),
        pairwise_status: String::new(),
        aggregated_status: String::new(),
        pairwise_objective: None,
        aggregated_objective: None,
        agree: None,
        pairwise_vars: 0,
        pairwise_cons: 0,
        aggregated_vars: 0,
        aggregated_cons: 0,
        pairwise_time_s: 0.0,
        aggregated_time_s: 0.0,
    };
    let mut statuses: Vec<Option<SolveStatus>> = Vec::new();
    for pairwise in [true, false] {
        let built = if pairwise {
            build_ns1(instance, &vnet, options).map(|(m, _)| m)
        } else {
            build_ns2(instance, &vnet, options).map(|(m, _)| m)
        };
        let model = match built {
            Ok(m) => m,
            Err(e) => {
                let text = format!("build-error: {e}");
                if pairwise {
                    row.pairwise_status = text;
                } else {
                    row.aggregated_status = text;
                }
                statuses.push(None);
                continue;
            }
        };
        let t0 = Instant::now();
        let solved = solve_exact(&model, limits);
        let elapsed = t0.elapsed().as_secs_f64();
        let (status_text, objective, status) = match solved {
            Ok(sol) => (status_str(sol.status).to_string(), sol.objective, Some(sol.status)),
            Err(e) => (format!("solve-error: {e}"), None, None),
        };
        statuses.push(status);
        if pairwise {
            row.pairwise_status = status_text;
            row.pairwise_objective = objective;
            row.pairwise_vars = model.num_vars();
            row.pairwise_cons = model.num_constraints();
            row.pairwise_time_s = elapsed;
        } else {
            row.aggregated_status = status_text;
            row.aggregated_objective = objective;
            row.aggregated_vars = model.num_vars();
            row.aggregated_cons = model.num_constraints();
            row.aggregated_time_s = elapsed;
        }
    }
    row.agree = match (statuses[0], statuses[1]) {
        (Some(SolveStatus::Optimal), Some(SolveStatus::Optimal)) => {
            let (Some(a), Some(b)) = (row.pairwise_objective, row.aggregated_objective) else {
                return row;
            };
            Some((a - b).abs() <= 1e-6)
        }
        (Some(SolveStatus::Infeasible), Some(SolveStatus::Infeasible)) => Some(true),
        (Some(SolveStatus::Optimal), Some(SolveStatus::Infeasible))
        | (Some(SolveStatus::Infeasible), Some(SolveStatus::Optimal)) => Some(false),
        _ => None,
    };
    row
}

/// Renders comparison rows as CSV: header, one row per instance, and (when
/// any rows exist) a trailing `mean` row. Time columns are last.
pub fn compare_csv(rows: &[CompareRow]) -> String {
    let mut out = String::from(
        "label,services,pairwise_status,aggregated_status,pairwise_objective,\
         aggregated_objective,agree,pairwise_vars,pairwise_cons,aggregated_vars,\
         aggregated_cons,pairwise_time_s,aggregated_time_s\n",
    );
    for row in rows {
        out.push_str(&csv_line(&[
            row.label.clone(),
            row.services.to_string(),
            row.pairwise_status.clone(),
            row.aggregated_status.clone(),
            opt_num(&row.pairwise_objective),
            opt_num(&row.aggregated_objective),
            row.agree.map(|b| b.to_string()).unwrap_or_default(),
            row.pairwise_vars.to_string(),
            row.pairwise_cons.to_string(),
            row.aggregated_vars.to_string(),
            row.aggregated_cons.to_string(),
            format!("{:.6}", row.pairwise_time_s),
            format!("{:.6}", row.aggregated_time_s),
        ]));
        out.push('\n');
    }
    if !rows.is_empty() {
        let both_optimal: Vec<&CompareRow> = rows
            .iter()
            .filter(|r| r.pairwise_status == "optimal" && r.aggregated_status == "optimal")
            .collect();
        let agree_all = if rows.iter().any(|r| r.agree == Some(false)) {
            "false".to_string()
        } else if rows.iter().all(|r| r.agree == Some(true)) {
            "true".to_string()
        } else {
            String::new()
        };
        let mean_usize =
            |f: fn(&CompareRow) -> usize| -> f64 {
                rows.iter().map(|r| f(r) as f64).sum::<f64>() / rows.len() as f64
            };
        out.push_str(&csv_line(&[
            "mean".to_string(),
            String::new(),
            String::new(),
            String::new(),
            opt_num(&mean(
                &both_optimal.iter().filter_map(|r| r.pairwise_objective).collect::<Vec<_>>(),
            )),
            opt_num(&mean(
                &both_optimal.iter().filter_map(|r| r.aggregated_objective).collect::<Vec<_>>(),
            )),
            agree_all,
            mean_usize(|r| r.pairwise_vars).to_string(),
            mean_usize(|r| r.pairwise_cons).to_string(),
            mean_usize(|r| r.aggregated_vars).to_string(),
            mean_usize(|r| r.aggregated_cons).to_string(),
            format!("{:.6}", rows.iter().map(|r| r.pairwise_time_s).sum::<f64>() / rows.len() as f64),
            format!("{:.6}", rows.iter().map(|r| r.aggregated_time_s).sum::<f64>() / rows.len() as f64),
        ]));
        out.push('\n');
    }
    out
}

/// A sweep campaign: one preset swept over service counts and path budgets,
/// with a fixed number of seeds per point.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Generator preset name (see [`crate::gen::PRESETS`]).
    pub preset: String,
    /// Node-count override for presets that accept one.
    pub nodes: Option<usize>,
    /// Service counts to sweep.
    pub services: Vec<usize>,
    /// Per-segment path budgets to sweep.
    pub paths: Vec<usize>,
    /// Seeds `0..seeds` at every sweep point (the same instances recur
    /// across path budgets, so points are directly comparable).
    pub seeds: u64,
    /// Whether the models enforce latency budgets; when off, budgets are
    /// still post-checked and the failures counted.
    pub latency_enforced: bool,
    /// Delay-weight override (defaults to each instance's own weight).
    pub sigma: Option<f64>,
    pub limits: SolveLimits,
    /// Worker threads solving instances concurrently.
    pub workers: usize,
}

/// Outcome of one (sweep point, seed) solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub preset: String,
    pub services: usize,
    pub paths: usize,
    pub latency_enforced: bool,
    pub seed: u64,
    /// Solver verdict, or `error` when any stage failed outright.
    pub status: String,
    /// Solved, decoded, and clean under the full domain check including
    /// latency budgets.
    pub feasible: bool,
    /// Domain violations of the decoded solution (nonzero only when the
    /// models ran with latency enforcement off).
    pub post_check_violations: usize,
    pub activated: Option<usize>,
    /// Per-service end-to-end delays.
    pub e2e_delays: Vec<f64>,
    /// Per-service end-to-end path counts.
    pub nump: Vec<usize>,
    /// Per-service minimum data rates.
    pub dr: Vec<f64>,
    /// Failure detail for `error` records.
    pub note: String,
    pub time_s: f64,
}

fn run_job(config: &SweepConfig, services: usize, paths: usize, seed: u64) -> SweepRecord {
    let mut record = SweepRecord {
        preset: config.preset.clone(),
        services,
        paths,
        latency_enforced: config.latency_enforced,
        seed,
        status: "error".to_string(),
        feasible: false,
        post_check_violations: 0,
        activated: None,
        e2e_delays: Vec::new(),
        nump: Vec::new(),
        dr: Vec::new(),
        note: String::new(),
        time_s: 0.0,
    };
    let t0 = Instant::now();
    let outcome = solve_generated(config, services, paths, seed, &mut record);
    record.time_s = t0.elapsed().as_secs_f64();
    if let Err(note) = outcome {
        record.status = "error".to_string();
        record.note = note;
    }
    record
}

fn solve_generated(
    config: &SweepConfig,
    services: usize,
    paths: usize,
    seed: u64,
    record: &mut SweepRecord,
) -> Result<(), String> {
    let instance = generate_preset(&config.preset, Some(services), config.nodes, seed)
        .map_err(|e: GenError| format!("generate: {e}"))?;
    let vnet = VirtualNetwork::build(&instance);
    let options = BuildOptions {
        paths,
        sigma: config.sigma,
        latency_enforced: config.latency_enforced,
    };
    let (model, map) =
        build_ns2(&instance, &vnet, &options).map_err(|e: BuildError| format!("build: {e}"))?;
    let sol = solve_exact(&model, &config.limits).map_err(|e: SolveError| format!("solve: {e}"))?;
    record.status = status_str(sol.status).to_string();
    if sol.status != SolveStatus::Optimal {
        return Ok(());
    }
    let assignment = sol.assignment.as_ref().expect("optimal solves carry a point");
    let decoded: SlicingSolution<Rat> = decode_ns2(&model, &map, assignment, &instance, &vnet)
        .map_err(|e: DecodeError| format!("decode: {e}"))?;
    let violations = verify_domain(&decoded, &instance, &vnet, paths);
    record.post_check_violations = violations.len();
    record.feasible = violations.is_empty();
    record.activated = Some(decoded.activated.len());
    for svc in &instance.services {
        record
            .e2e_delays
            .push(decoded.e2e_delay(svc.id).expect("decoded ledgers are complete").to_f64());
    }
    let stats =
        flowdec::path_stats(&decoded, &instance).map_err(|e| format!("path-stats: {e}"))?;
    for per in stats.per_service.values() {
        record.nump.push(per.nump);
        record.dr.push(per.dr.to_f64());
    }
    Ok(())
}

/// Runs the whole sweep: every (service count, path budget, seed) job,
/// solved by up to `workers` threads, returned in the deterministic
/// (service count, path budget, seed) order regardless of completion
/// order. Failures become `error` records, never panics.
pub fn run_sweep(config: &SweepConfig) -> Vec<SweepRecord> {
    let mut jobs: Vec<(usize, usize, u64)> = Vec::new();
    for &services in &config.services {
        for &paths in &config.paths {
            for seed in 0..config.seeds {
                jobs.push((services, paths, seed));
            }
        }
    }
    let results: Mutex<Vec<Option<SweepRecord>>> = Mutex::new(vec![None; jobs.len()]);
    let next = AtomicUsize::new(0);
    let workers = config.workers.clamp(1, jobs.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(services, paths, seed)) = jobs.get(i) else { break };
                let record = run_job(config, services, paths, seed);
                results.lock().expect("no panics hold this lock")[i] = Some(record);
            });
        }
    });
    results
        .into_inner()
        .expect("workers joined")
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect()
}

/// Aggregated view of one sweep point (a `(services, paths)` pair).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPointSummary {
    pub preset: String,
    pub services: usize,
    pub paths: usize,
    pub latency_enforced: bool,
    pub instances: usize,
    /// Solved and clean under the full domain check.
    pub feasible: usize,
    /// Solved but rejected by the post-check (latency-off baseline only).
    pub post_check_failures: usize,
    pub errors: usize,
    /// Means over solved instances.
    pub mean_activated: Option<f64>,
    pub mean_e2e_delay: Option<f64>,
    pub mean_nump: Option<f64>,
    pub max_nump: Option<usize>,
    pub mean_dr: Option<f64>,
    pub min_dr: Option<f64>,
    pub mean_time_s: f64,
}

/// Collapses sweep records into per-point summaries, in record order.
pub fn sweep_points(records: &[SweepRecord]) -> Vec<SweepPointSummary> {
    let mut out: Vec<SweepPointSummary> = Vec::new();
    for record in records {
        let key = (record.services, record.paths);
        if out.last().map(|p| (p.services, p.paths)) != Some(key) {
            out.push(SweepPointSummary {
                preset: record.preset.clone(),
                services: record.services,
                paths: record.paths,
                latency_enforced: record.latency_enforced,
                instances: 0,
                feasible: 0,
                post_check_failures: 0,
                errors: 0,
                mean_activated: None,
                mean_e2e_delay: None,
                mean_nump: None,
                max_nump: None,
                mean_dr: None,
                min_dr: None,
                mean_time_s: 0.0,
            });
        }
        let point = out.last_mut().expect("just pushed");
        point.instances += 1;
        point.feasible += record.feasible as usize;
        point.post_check_failures +=
            (record.status == "optimal" && !record.feasible) as usize;
        point.errors += (record.status == "error") as usize;
    }
    for point in &mut out {
        let solved: Vec<&SweepRecord> = records
            .iter()
            .filter(|r| {
                r.services == point.services && r.paths == point.paths && r.status == "optimal"
            })
            .collect();
        point.mean_activated =
            mean(&solved.iter().filter_map(|r| r.activated.map(|a| a as f64)).collect::<Vec<_>>());
        point.mean_e2e_delay =
            mean(&solved.iter().flat_map(|r| r.e2e_delays.iter().copied()).collect::<Vec<_>>());
        let numps: Vec<f64> =
            solved.iter().flat_map(|r| r.nump.iter().map(|&n| n as f64)).collect();
        point.mean_nump = mean(&numps);
        point.max_nump = solved.iter().flat_map(|r| r.nump.iter().copied()).max();
        let drs: Vec<f64> = solved.iter().flat_map(|r| r.dr.iter().copied()).collect();
        point.mean_dr = mean(&drs);
        point.min_dr = drs.iter().copied().fold(None, |acc: Option<f64>, d| match acc {
            Some(m) if m <= d => Some(m),
            _ => Some(d),
        });
        let times: Vec<f64> = records
            .iter()
            .filter(|r| r.services == point.services && r.paths == point.paths)
            .map(|r| r.time_s)
            .collect();
        point.mean_time_s = times.iter().sum::<f64>() / times.len().max(1) as f64;
    }
    out
}

/// Renders a sweep as CSV: one `point` row per sweep point, plus one
/// `failure` row per errored instance (the sweep never aborts on them).
/// The time column is last.
pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from(
        "preset,services,paths,latency,seed,kind,instances,feasible,post_check_failures,\
         errors,mean_activated,mean_e2e_delay,mean_nump,max_nump,mean_dr,min_dr,note,\
         mean_time_s\n",
    );
    for point in sweep_points(records) {
        out.push_str(&csv_line(&[
            point.preset.clone(),
            point.services.to_string(),
            point.paths.to_string(),
            if point.latency_enforced { "on" } else { "off" }.to_string(),
            String::new(),
            "point".to_string(),
            point.instances.to_string(),
            point.feasible.to_string(),
            point.post_check_failures.to_string(),
            point.errors.to_string(),
            opt_num(&point.mean_activated),
            opt_num(&point.mean_e2e_delay),
            opt_num(&point.mean_nump),
            opt_num(&point.max_nump),
            opt_num(&point.mean_dr),
            opt_num(&point.min_dr),
            String::new(),
            format!("{:.6}", point.mean_time_s),
        ]));
        out.push('\n');
        for record in records.iter().filter(|r| {
            r.services == point.services && r.paths == point.paths && r.status == "error"
        }) {
            out.push_str(&csv_line(&[
                record.preset.clone(),
                record.services.to_string(),
                record.paths.to_string(),
                if record.latency_enforced { "on" } else { "off" }.to_string(),
                record.seed.to_string(),
                "failure".to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                record.note.clone(),
                format!("{:.6}", record.time_s),
            ]));
            out.push('\n');
        }
    }
    out
}

/// Why the two-stage reference optimizer could not run.
#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// The lexicographic optimum found by [`two_stage_optimum`].
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStageOptimum {
    /// The winning activation set.
    pub activation: BTreeSet<String>,
    /// Its cardinality (the first objective).
    pub activated: usize,
    /// The minimum total delay given that activation set (the second
    /// objective).
    pub total_delay: f64,
}

/// Reference optimizer for the lexicographic objective: enumerate
/// activation sets in increasing cardinality (then lexicographic order);
/// for the smallest cardinality admitting a feasible solution, minimize
/// total delay. Exponential in the cloud count — use on tiny instances to
/// cross-check the weighted single-objective optimum. `None` means the
/// instance is infeasible outright.
pub fn two_stage_optimum<S: Scalar>(
    instance: &SlicingInstance<S>,
    paths: usize,
    limits: &SolveLimits,
) -> Result<Option<TwoStageOptimum>, OracleError> {
    let vnet = VirtualNetwork::build(instance);
    let options = BuildOptions { paths, sigma: Some(0.0), latency_enforced: true };
    let (base, map) = build_ns2(instance, &vnet, &options)?;
    let clouds: Vec<&String> = instance.network.clouds.iter().map(|c| &c.id).collect();
    let delay_terms: Vec<(crate::milp::VarId, f64)> = map
        .delays
        .theta_link
        .values()
        .chain(map.delays.theta_node.values())
        .map(|&id| (id, 1.0))
        .collect();
    for count in 0..=clouds.len() {
        let mut best: Option<TwoStageOptimum> = None;
        for mask in 0u64..(1u64 << clouds.len()) {
            if mask.count_ones() as usize != count {
                continue;
            }
            let mut model = base.clone();
            for (i, cloud) in clouds.iter().enumerate() {
                model.add_constraint(
                    format!("fixed-activation[v={cloud}]"),
                    vec![(map.placement.y[*cloud], 1.0)],
                    Sense::Eq,
                    ((mask >> i) & 1) as f64,
                );
            }
            model.set_objective(delay_terms.clone());
            let sol = solve_exact(&model, limits)?;
            if sol.status != SolveStatus::Optimal {
                continue;
            }
            let delay = sol.objective.expect("optimal solves carry an objective");
            if best.as_ref().is_none_or(|b| delay < b.total_delay - 1e-9) {
                best = Some(TwoStageOptimum {
                    activation: clouds
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| (mask >> i) & 1 == 1)
                        .map(|(_, c)| (*c).clone())
                        .collect(),
                    activated: count,
                    total_delay: delay,
                });
            }
        }
        if best.is_some() {
            return Ok(best);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{example_chain, example_pair};
    use crate::milp::LpBackend;

    fn exact() -> SolveLimits {
        SolveLimits { gap: 0.0, ..SolveLimits::default() }
    }

    fn strip_time_columns(csv: &str, time_columns: usize) -> String {
        csv.lines()
            .map(|line| {
                let fields: Vec<&str> = line.split(',').collect();
                fields[..fields.len().saturating_sub(time_columns)].join(",")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    #[test]
    fn formulations_agree_on_the_worked_pair() {
        let instance = example_pair();
        let row = compare_instance("pair", &instance, &BuildOptions::default(), &exact());
        assert_eq!(row.pairwise_status, "optimal");
        assert_eq!(row.aggregated_status, "optimal");
        assert_eq!(row.agree, Some(true));
        assert!((row.pairwise_objective.unwrap() - 2.007).abs() < 1e-6);
        assert!(row.aggregated_vars < row.pairwise_vars);
        assert!(row.aggregated_cons < row.pairwise_cons);
    }

    #[test]
    fn comparison_csv_is_deterministic_outside_time_columns() {
        let instance = example_chain();
        let options = BuildOptions::default();
        let a = compare_csv(&[compare_instance("chain", &instance, &options, &exact())]);
        let b = compare_csv(&[compare_instance("chain", &instance, &options, &exact())]);
        assert_eq!(strip_time_columns(&a, 2), strip_time_columns(&b, 2));
        assert_eq!(a.lines().count(), 3, "header, one row, mean row");
        assert!(a.ends_with('\n'));
        assert!(!a.contains('\r'));
    }

    #[test]
    fn empty_comparison_is_just_the_header() {
        let csv = compare_csv(&[]);
        assert_eq!(csv.lines().count(), 1);
        assert!(csv.starts_with("label,"));
    }

    #[test]
    fn sweeps_are_ordered_deterministic_and_path_monotone() {
        let config = SweepConfig {
            preset: "six-node".to_string(),
            nodes: None,
            services: vec![1],
            paths: vec![1, 2],
            seeds: 3,
            latency_enforced: true,
            sigma: None,
            limits: SolveLimits { gap: 0.0, backend: LpBackend::Dense, ..SolveLimits::default() },
            workers: 2,
        };
        let records = run_sweep(&config);
        assert_eq!(records.len(), 6);
        let keys: Vec<(usize, usize, u64)> =
            records.iter().map(|r| (r.services, r.paths, r.seed)).collect();
        assert_eq!(keys, vec![(1, 1, 0), (1, 1, 1), (1, 1, 2), (1, 2, 0), (1, 2, 1), (1, 2, 2)]);
        for seed in 0..3 {
            let narrow = &records[seed as usize];
            let wide = &records[3 + seed as usize];
            // More admissible paths can only help the same instance.
            assert!(
                !narrow.feasible || wide.feasible,
                "seed {seed}: feasible at one path but not at two"
            );
        }
        for record in &records {
            assert!(record.note.is_empty(), "unexpected failure: {}", record.note);
            if record.status == "optimal" {
                assert!(record.feasible, "latency-on solves must pass the post-check");
                assert_eq!(record.post_check_violations, 0);
                assert_eq!(record.nump.len(), record.services);
            }
        }
        let rerun = run_sweep(&config);
        for (a, b) in records.iter().zip(&rerun) {
            let mut a = a.clone();
            let mut b = b.clone();
            a.time_s = 0.0;
            b.time_s = 0.0;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn sweep_csv_has_point_rows_and_time_last() {
        let config = SweepConfig {
            preset: "six-node".to_string(),
            nodes: None,
            services: vec![1],
            paths: vec![2],
            seeds: 2,
            latency_enforced: true,
            sigma: None,
            limits: SolveLimits { gap: 0.0, backend: LpBackend::Dense, ..SolveLimits::default() },
            workers: 1,
        };
        let records = run_sweep(&config);
        let csv = sweep_csv(&records);
        let mut lines = csv.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("preset,"));
        assert!(header.ends_with(",mean_time_s"));
        let point = lines.next().unwrap();
        assert!(point.contains(",point,"), "{point}");
        let summaries = sweep_points(&records);
        assert_eq!(summaries.len(), 1);
        assert_eq!(summaries[0].instances, 2);
        assert_eq!(summaries[0].errors, 0);
        if summaries[0].feasible > 0 {
            assert!(summaries[0].mean_activated.is_some());
            assert!(summaries[0].max_nump.is_some());
        }
    }

    #[test]
    fn unknown_presets_become_failure_rows_not_panics() {
        let config = SweepConfig {
            preset: "no-such-preset".to_string(),
            nodes: None,
            services: vec![1],
            paths: vec![1],
            seeds: 1,
            latency_enforced: true,
            sigma: None,
            limits: exact(),
            workers: 1,
        };
        let records = run_sweep(&config);
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].status, "error");
        assert!(records[0].note.contains("unknown preset"), "{}", records[0].note);
        let csv = sweep_csv(&records);
        assert!(csv.contains(",failure,"), "{csv}");
    }

    #[test]
    fn two_stage_oracle_matches_the_worked_examples() {
        let chain = example_chain();
        let opt = two_stage_optimum(&chain, 2, &exact()).unwrap().unwrap();
        assert_eq!(opt.activated, 1);
        assert_eq!(opt.activation.iter().collect::<Vec<_>>(), vec!["E"]);
        assert!((opt.total_delay - 5.0).abs() < 1e-6);

        let pair = example_pair();
        let opt = two_stage_optimum(&pair, 2, &exact()).unwrap().unwrap();
        assert_eq!(opt.activated, 2);
        assert!((opt.total_delay - 7.0).abs() < 1e-6);

        // One admissible path starves the worked chain outright.
        assert_eq!(two_stage_optimum(&chain, 1, &exact()).unwrap(), None);
    }

    #[test]
    fn sigma_window_warnings_fire_above_the_threshold() {
        let pair = example_pair();
        assert_eq!(sigma_window_warning(&pair), None);
        let mut loud = pair.clone();
        loud.weights.sigma = crate::Rat::ratio(1, 7);
        assert!(sigma_window_warning(&loud).is_some());
        let mut quiet = pair.clone();
        quiet.weights.sigma = crate::Rat::ratio(1, 8);
        assert_eq!(sigma_window_warning(&quiet), None);
        let mut none = pair;
        none.services.clear();
        assert_eq!(sigma_window_warning(&none), None);
    }
}
