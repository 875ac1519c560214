//! `netslice`: command-line harness for the network slicing toolkit.
//!
//! Subcommands cover the whole pipeline: `generate` benchmark instances,
//! `build` MILP models as LP files, `solve` instances end to end,
//! `validate` instance/solution pairs, `compare` the two formulations, and
//! `experiment` for seeded sweep campaigns with CSV output.
//!
//! Exit codes: 0 success, 1 infeasible (or failed validation/agreement),
//! 2 invalid input or internal failure, 3 solver limit hit.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use netslice_core::experiments::{
    compare_csv, compare_instance, run_sweep, sigma_window_warning, sweep_csv, sweep_points,
    SweepConfig,
};
use netslice_core::fileio::{
    instance_hash, read_instance, read_solution, solution_to_string, write_instance,
    write_solution,
};
use netslice_core::gen::generate_preset;
use netslice_core::milp::{
    check_assignment, export_lp, parse_lp, parse_sol, solve_exact, write_sol, MilpModel,
    SolveLimits, SolveStatus,
};
use netslice_core::model::validate_instance;
use netslice_core::ns1::{build_ns1, BuildOptions, Ns1VarMap};
use netslice_core::ns2::{build_ns2, Ns2VarMap};
use netslice_core::scalar::Scalar;
use netslice_core::semantics::{decode_ns1, decode_ns2, verify_domain};
use netslice_core::{Instance, Solution, Vnet};

const EXIT_OK: i32 = 0;
const EXIT_INFEASIBLE: i32 = 1;
const EXIT_INVALID: i32 = 2;
const EXIT_LIMIT: i32 = 3;

#[derive(Parser)]
#[command(
    name = "netslice",
    about = "Joint VNF placement and traffic routing: generate, solve, compare, sweep",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark instance from a named preset.
    Generate(GenerateArgs),
    /// Build the MILP for an instance and write it in LP format.
    Build(BuildArgs),
    /// Solve an instance and report the embedding.
    Solve(SolveArgs),
    /// Check an instance/solution pair against every domain constraint.
    Validate(ValidateArgs),
    /// Solve instances with both formulations and tabulate the agreement.
    Compare(CompareArgs),
    /// Run a seeded sweep over service counts and path budgets.
    Experiment(ExperimentArgs),
    /// Solve a raw LP-format model file (the external-solver adapter
    /// contract: `<cmd> <model.lp> <out.sol>`).
    #[command(hide = true)]
    SolveLp(SolveLpArgs),
}

#[derive(Args)]
struct ModelOpts {
    /// Which formulation to build.
    #[arg(long, default_value = "aggregated", value_parser = ["pairwise", "aggregated"])]
    formulation: String,
    /// Admissible paths per service segment.
    #[arg(long, default_value_t = 2)]
    paths: usize,
    /// Override the delay weight in the objective.
    #[arg(long)]
    sigma: Option<f64>,
    /// Drop the latency budgets from the model (they are still checked
    /// afterwards by `validate`).
    #[arg(long)]
    no_latency: bool,
}

impl ModelOpts {
    fn build_options(&self) -> BuildOptions {
        BuildOptions {
            paths: self.paths,
            sigma: self.sigma,
            latency_enforced: !self.no_latency,
        }
    }
}

#[derive(Args)]
struct LimitOpts {
    /// Wall-clock limit per solve, in seconds.
    #[arg(long, default_value_t = 600.0)]
    time_limit: f64,
    /// Relative optimality gap at which the search stops; 0 proves optimality.
    #[arg(long, default_value_t = 1e-3)]
    gap: f64,
}

impl LimitOpts {
    fn limits(&self) -> SolveLimits {
        SolveLimits {
            time_limit: Duration::from_secs_f64(self.time_limit.max(0.0)),
            gap: self.gap,
            ..SolveLimits::default()
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Preset name.
    #[arg(long)]
    preset: String,
    /// Number of services (presets carry a default).
    #[arg(long)]
    services: Option<usize>,
    /// Number of nodes, for presets with a configurable topology size.
    #[arg(long)]
    nodes: Option<usize>,
    /// Random seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (canonical JSON); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    /// Instance file (canonical JSON).
    instance: PathBuf,
    #[command(flatten)]
    model: ModelOpts,
    /// Output LP file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file (canonical JSON).
    instance: PathBuf,
    #[command(flatten)]
    model: ModelOpts,
    #[command(flatten)]
    limit: LimitOpts,
    /// `builtin`, or `external:<command>` run as `<command> <model.lp>
    /// <out.sol>` (exit 0 with a solution file, or exit 1 for infeasible).
    #[arg(long, default_value = "builtin")]
    solver: String,
    /// Write the decoded solution (canonical JSON) here; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Instance file (canonical JSON).
    instance: PathBuf,
    /// Solution file (canonical JSON).
    solution: PathBuf,
    /// Path budget per segment the solution must respect (inferred from the
    /// solution when absent).
    #[arg(long)]
    paths: Option<usize>,
}

#[derive(Args)]
struct CompareArgs {
    /// Instance files; an empty list yields a header-only CSV.
    instances: Vec<PathBuf>,
    /// Admissible paths per service segment.
    #[arg(long, default_value_t = 2)]
    paths: usize,
    /// Override the delay weight in the objective.
    #[arg(long)]
    sigma: Option<f64>,
    /// Drop the latency budgets from both models.
    #[arg(long)]
    no_latency: bool,
    #[command(flatten)]
    limit: LimitOpts,
    /// Output CSV file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Preset name.
    #[arg(long)]
    preset: String,
    /// Number of nodes, for presets with a configurable topology size.
    #[arg(long)]
    nodes: Option<usize>,
    /// Service counts to sweep (comma separated).
    #[arg(long, value_delimiter = ',', required = true)]
    services: Vec<usize>,
    /// Path budgets to sweep (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "2")]
    paths: Vec<usize>,
    /// Seeds per sweep point (seed values 0..N).
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    /// Override the delay weight in the objective.
    #[arg(long)]
    sigma: Option<f64>,
    /// Drop the latency budgets from the models; budget violations are then
    /// counted by the post-check instead.
    #[arg(long)]
    no_latency: bool,
    #[command(flatten)]
    limit: LimitOpts,
    /// Worker threads solving instances concurrently.
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
    /// Output CSV file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveLpArgs {
    /// LP-format model file.
    model: PathBuf,
    /// Where to write the solution file.
    out: PathBuf,
    #[command(flatten)]
    limit: LimitOpts,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Generate(args) => cmd_generate(&args),
        Command::Build(args) => cmd_build(&args),
        Command::Solve(args) => cmd_solve(&args),
        Command::Validate(args) => cmd_validate(&args),
        Command::Compare(args) => cmd_compare(&args),
        Command::Experiment(args) => cmd_experiment(&args),
        Command::SolveLp(args) => cmd_solve_lp(&args),
    };
    std::process::exit(code);
}

fn fail(message: impl std::fmt::Display) -> i32 {
    eprintln!("error: {message}");
    EXIT_INVALID
}

/// Writes `text` to `out`, or to stdout when no path was given.
fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance, String> {
    let instance =
        read_instance(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let violations = validate_instance(&instance);
    if violations.is_empty() {
        Ok(instance)
    } else {
        let mut lines = format!("{} is not a valid instance:", path.display());
        for v in violations {
            lines.push_str(&format!("\n  {v}"));
        }
        Err(lines)
    }
}

fn warn_sigma(instance: &Instance, override_sigma: Option<f64>) {
    match override_sigma {
        Some(sigma) => {
            let budget_sum: f64 =
                instance.services.iter().map(|svc| svc.latency_budget.to_f64()).sum();
            if budget_sum > 0.0 && sigma * budget_sum >= 1.0 {
                eprintln!(
                    "warning: sigma = {sigma} is not below 1/(sum of latency budgets) = \
                     1/{budget_sum}; the objective no longer minimizes the activated-node \
                     count first"
                );
            }
        }
        None => {
            if let Some(warning) = sigma_window_warning(instance) {
                eprintln!("warning: {warning}");
            }
        }
    }
}

/// A built model together with the variable map needed to decode it.
enum Built {
    Pairwise(MilpModel, Ns1VarMap),
    Aggregated(MilpModel, Ns2VarMap),
}

impl Built {
    fn model(&self) -> &MilpModel {
        match self {
            Built::Pairwise(m, _) => m,
            Built::Aggregated(m, _) => m,
        }
    }

    fn decode(
        &self,
        assignment: &BTreeMap<String, f64>,
        instance: &Instance,
        vnet: &Vnet,
    ) -> Result<Solution, String> {
        match self {
            Built::Pairwise(model, map) => decode_ns1(model, map, assignment, instance, vnet),
            Built::Aggregated(model, map) => decode_ns2(model, map, assignment, instance, vnet),
        }
        .map_err(|e| format!("cannot decode the solver point: {e}"))
    }
}

fn build_model(instance: &Instance, vnet: &Vnet, opts: &ModelOpts) -> Result<Built, String> {
    let options = opts.build_options();
    let built = if opts.formulation == "pairwise" {
        build_ns1(instance, vnet, &options).map(|(m, map)| Built::Pairwise(m, map))
    } else {
        build_ns2(instance, vnet, &options).map(|(m, map)| Built::Aggregated(m, map))
    };
    built.map_err(|e| format!("cannot build the model: {e}"))
}

fn cmd_generate(args: &GenerateArgs) -> i32 {
    let instance = match generate_preset(&args.preset, args.services, args.nodes, args.seed) {
        Ok(instance) => instance,
        Err(e) => return fail(e),
    };
    warn_sigma(&instance, None);
    let outcome = match &args.out {
        Some(path) => write_instance(path, &instance)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => emit(&None, &netslice_core::fileio::instance_to_string(&instance)),
    };
    if let Err(e) = outcome {
        return fail(e);
    }
    eprintln!(
        "generated {} seed {}: {} nodes, {} links, {} clouds, {} services (hash {})",
        args.preset,
        args.seed,
        instance.network.nodes.len(),
        instance.network.links.len(),
        instance.network.clouds.len(),
        instance.services.len(),
        &instance_hash(&instance)[..12],
    );
    EXIT_OK
}

fn cmd_build(args: &BuildArgs) -> i32 {
    let instance = match load_instance(&args.instance) {
        Ok(i) => i,
        Err(e) => return fail(e),
    };
    warn_sigma(&instance, args.model.sigma);
    let vnet = Vnet::build(&instance);
    let built = match build_model(&instance, &vnet, &args.model) {
        Ok(b) => b,
        Err(e) => return fail(e),
    };
    let lp = match export_lp(built.model()) {
        Ok(lp) => lp,
        Err(e) => return fail(format!("cannot export the model: {e}")),
    };
    if let Err(e) = emit(&args.out, &lp) {
        return fail(e);
    }
    eprintln!(
        "{} model: {} variables, {} constraints",
        args.model.formulation,
        built.model().num_vars(),
        built.model().num_constraints()
    );
    EXIT_OK
}

/// Runs the external-solver adapter: `<command> <model.lp> <out.sol>`.
/// `Ok(None)` means the adapter reported infeasibility (exit code 1).
fn run_external(
    command: &str,
    model: &MilpModel,
) -> Result<Option<BTreeMap<String, f64>>, String> {
    let lp = export_lp(model).map_err(|e| format!("cannot export the model: {e}"))?;
    let dir = tempfile::tempdir().map_err(|e| format!("cannot create a temp dir: {e}"))?;
    let lp_path = dir.path().join("model.lp");
    let sol_path = dir.path().join("model.sol");
    std::fs::write(&lp_path, lp).map_err(|e| format!("cannot write the LP file: {e}"))?;
    let mut parts = command.split_whitespace();
    let program = parts.next().ok_or("empty external solver command")?;
    let status = std::process::Command::new(program)
        .args(parts)
        .arg(&lp_path)
        .arg(&sol_path)
        .status()
        .map_err(|e| format!("cannot run the external solver {program:?}: {e}"))?;
    match status.code() {
        Some(0) => {
            let text = std::fs::read_to_string(&sol_path)
                .map_err(|e| format!("external solver wrote no solution file: {e}"))?;
            let (mut assignment, _objective) =
                parse_sol(&text).map_err(|e| format!("unreadable solution file: {e}"))?;
            // Solvers commonly omit zero variables.
            for var in model.vars() {
                assignment.entry(var.name.clone()).or_insert(0.0);
            }
            Ok(Some(assignment))
        }
        Some(1) => Ok(None),
        other => Err(format!("external solver exited with status {other:?}")),
    }
}

fn print_solution_summary(instance: &Instance, solution: &Solution, objective: f64) {
    eprintln!("objective: {objective}");
    eprintln!(
        "activated: {} ({} of {} clouds)",
        solution.activated.iter().cloned().collect::<Vec<_>>().join(" "),
        solution.activated.len(),
        instance.network.clouds.len()
    );
    for svc in &instance.services {
        if let Some(delay) = solution.e2e_delay(svc.id) {
            eprintln!(
                "service {}: end-to-end delay {} (budget {})",
                svc.id, delay, svc.latency_budget
            );
        }
    }
}

fn cmd_solve(args: &SolveArgs) -> i32 {
    let instance = match load_instance(&args.instance) {
        Ok(i) => i,
        Err(e) => return fail(e),
    };
    warn_sigma(&instance, args.model.sigma);
    let vnet = Vnet::build(&instance);
    let built = match build_model(&instance, &vnet, &args.model) {
        Ok(b) => b,
        Err(e) => return fail(e),
    };

    let assignment: BTreeMap<String, f64> = if let Some(command) =
        args.solver.strip_prefix("external:")
    {
        match run_external(command, built.model()) {
            Ok(Some(assignment)) => {
                match check_assignment(built.model(), &assignment, 1e-6) {
                    Ok(violations) if violations.is_empty() => {}
                    Ok(violations) => {
                        return fail(format!(
                            "external solution violates the model: {}",
                            violations.join(", ")
                        ))
                    }
                    Err(e) => return fail(format!("external solution is unusable: {e}")),
                }
                assignment
            }
            Ok(None) => {
                eprintln!("status: infeasible (external solver)");
                return EXIT_INFEASIBLE;
            }
            Err(e) => return fail(e),
        }
    } else if args.solver == "builtin" {
        let sol = match solve_exact(built.model(), &args.limit.limits()) {
            Ok(sol) => sol,
            Err(e) => return fail(format!("solve failed: {e}")),
        };
        eprintln!(
            "solver: {} nodes, {} LP iterations in {:.2}s (bound {})",
            sol.stats.nodes,
            sol.stats.lp_iterations,
            sol.stats.wall.as_secs_f64(),
            sol.bound.map(|b| b.to_string()).unwrap_or_else(|| "none".into()),
        );
        match sol.status {
            SolveStatus::Optimal => sol.assignment.expect("optimal solves carry a point"),
            SolveStatus::Infeasible => {
                eprintln!("status: infeasible");
                return EXIT_INFEASIBLE;
            }
            SolveStatus::FeasibleTimeLimit => {
                eprintln!("status: limit hit before optimality was proven");
                if let (Some(objective), Some(assignment)) = (sol.objective, &sol.assignment) {
                    if let Ok(solution) = built.decode(assignment, &instance, &vnet) {
                        eprintln!("best found so far:");
                        print_solution_summary(&instance, &solution, objective);
                    }
                }
                return EXIT_LIMIT;
            }
            SolveStatus::Unbounded => return fail("the model is unbounded"),
        }
    } else {
        return fail(format!(
            "unknown solver {:?}; use \"builtin\" or \"external:<command>\"",
            args.solver
        ));
    };

    let solution = match built.decode(&assignment, &instance, &vnet) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let objective = built.model().objective_value(
        &built.model().vars().iter().map(|v| assignment[&v.name]).collect::<Vec<_>>(),
    );
    eprintln!("status: optimal");
    print_solution_summary(&instance, &solution, objective);
    let violations = verify_domain(&solution, &instance, &vnet, args.model.paths);
    for v in &violations {
        eprintln!("post-check: {v}");
    }
    let outcome = match &args.out {
        Some(path) => write_solution(path, &solution)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => emit(&None, &solution_to_string(&solution)),
    };
    if let Err(e) = outcome {
        return fail(e);
    }
    EXIT_OK
}

fn cmd_validate(args: &ValidateArgs) -> i32 {
    let instance = match load_instance(&args.instance) {
        Ok(i) => i,
        Err(e) => return fail(e),
    };
    let solution = match read_solution(&args.solution) {
        Ok(s) => s,
        Err(e) => return fail(format!("cannot read {}: {e}", args.solution.display())),
    };
    let paths = args.paths.unwrap_or_else(|| {
        solution.paths.keys().map(|&(_, _, p)| p + 1).max().unwrap_or(1)
    });
    let vnet = Vnet::build(&instance);
    let violations = verify_domain(&solution, &instance, &vnet, paths);
    if violations.is_empty() {
        println!("ok: the solution satisfies every domain constraint");
        EXIT_OK
    } else {
        for v in &violations {
            println!("{v}");
        }
        eprintln!("{} violation(s)", violations.len());
        EXIT_INFEASIBLE
    }
}

fn cmd_compare(args: &CompareArgs) -> i32 {
    let options = BuildOptions {
        paths: args.paths,
        sigma: args.sigma,
        latency_enforced: !args.no_latency,
    };
    let limits = args.limit.limits();
    let mut rows = Vec::new();
    for path in &args.instances {
        let instance = match load_instance(path) {
            Ok(i) => i,
            Err(e) => return fail(e),
        };
        warn_sigma(&instance, args.sigma);
        let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        rows.push(compare_instance(&label, &instance, &options, &limits));
    }
    let csv = compare_csv(&rows);
    if let Err(e) = emit(&args.out, &csv) {
        return fail(e);
    }
    if rows.iter().any(|r| r.agree == Some(false)) {
        eprintln!("error: the formulations disagree on at least one instance");
        return EXIT_INFEASIBLE;
    }
    if rows.iter().any(|r| {
        r.pairwise_status == "time-limit" || r.aggregated_status == "time-limit"
    }) {
        eprintln!("warning: time-limit rows were excluded from the agreement check");
        return EXIT_LIMIT;
    }
    EXIT_OK
}

fn cmd_experiment(args: &ExperimentArgs) -> i32 {
    let config = SweepConfig {
        preset: args.preset.clone(),
        nodes: args.nodes,
        services: args.services.clone(),
        paths: args.paths.clone(),
        seeds: args.seeds,
        latency_enforced: !args.no_latency,
        sigma: args.sigma,
        limits: args.limit.limits(),
        workers: args.workers.max(1),
    };
    let records = run_sweep(&config);
    let csv = sweep_csv(&records);
    if let Err(e) = emit(&args.out, &csv) {
        return fail(e);
    }
    // More admissible paths can only widen the feasible set, so on paired
    // seeds the feasible count must be monotone in the path budget.
    let summaries = sweep_points(&records);
    let mut sorted_paths = args.paths.clone();
    sorted_paths.sort_unstable();
    for &services in &args.services {
        let feasible_at = |paths: usize| {
            summaries
                .iter()
                .find(|p| p.services == services && p.paths == paths)
                .map(|p| p.feasible)
        };
        for pair in sorted_paths.windows(2) {
            if let (Some(narrow), Some(wide)) = (feasible_at(pair[0]), feasible_at(pair[1])) {
                if narrow > wide {
                    eprintln!(
                        "error: feasible count dropped from {narrow} to {wide} when the path \
                         budget grew from {} to {} at {services} services",
                        pair[0], pair[1]
                    );
                    return EXIT_INFEASIBLE;
                }
            }
        }
    }
    EXIT_OK
}

fn cmd_solve_lp(args: &SolveLpArgs) -> i32 {
    let text = match std::fs::read_to_string(&args.model) {
        Ok(t) => t,
        Err(e) => return fail(format!("cannot read {}: {e}", args.model.display())),
    };
    let model = match parse_lp(&text) {
        Ok(m) => m,
        Err(e) => return fail(format!("cannot parse {}: {e}", args.model.display())),
    };
    let sol = match solve_exact(&model, &args.limit.limits()) {
        Ok(sol) => sol,
        Err(e) => return fail(format!("solve failed: {e}")),
    };
    match sol.status {
        SolveStatus::Optimal => {
            let assignment = sol.assignment.expect("optimal solves carry a point");
            if let Err(e) = std::fs::write(&args.out, write_sol(&assignment, sol.objective)) {
                return fail(format!("cannot write {}: {e}", args.out.display()));
            }
            EXIT_OK
        }
        SolveStatus::Infeasible => {
            eprintln!("status: infeasible");
            EXIT_INFEASIBLE
        }
        SolveStatus::FeasibleTimeLimit => {
            if let Some(assignment) = &sol.assignment {
                let _ = std::fs::write(&args.out, write_sol(assignment, sol.objective));
            }
            eprintln!("status: limit hit before optimality was proven");
            EXIT_LIMIT
        }
        SolveStatus::Unbounded => fail("the model is unbounded"),
    }
}
