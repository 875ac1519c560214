//! End-to-end tests of the `netslice` binary: the full
//! generate → build → solve → validate pipeline, the exit-code contract,
//! the external-solver adapter, and CSV determinism.

use std::path::Path;
use std::process::{Command, Output};

fn netslice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netslice"))
        .args(args)
        .output()
        .expect("the binary runs")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn assert_code(output: &Output, expected: i32) {
    assert_eq!(
        output.status.code(),
        Some(expected),
        "stdout:\n{}\nstderr:\n{}",
        stdout_of(output),
        stderr_of(output)
    );
}

fn generate(dir: &Path, preset: &str, seed: &str) -> String {
    let path = dir.join(format!("{preset}-{seed}.json"));
    let out = netslice(&["generate", "--preset", preset, "--seed", seed, "--out"])
        .status
        .code();
    assert_eq!(out, Some(2), "missing --out value must be rejected");
    let output = netslice(&[
        "generate",
        "--preset",
        preset,
        "--seed",
        seed,
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_code(&output, 0);
    assert!(stderr_of(&output).contains("generated"));
    path.to_str().unwrap().to_string()
}

/// Strips the given number of trailing CSV columns from every line, for
/// comparisons that must ignore wall-clock timings.
fn strip_time_columns(csv: &str, columns: usize) -> String {
    csv.lines()
        .map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            fields[..fields.len().saturating_sub(columns)].join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn the_pipeline_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let instance = generate(dir.path(), "example-pair", "0");

    let lp_path = dir.path().join("model.lp");
    let output = netslice(&["build", &instance, "--out", lp_path.to_str().unwrap()]);
    assert_code(&output, 0);
    let lp = std::fs::read_to_string(&lp_path).unwrap();
    assert!(lp.contains("Minimize"), "{}", &lp[..lp.len().min(120)]);
    assert!(stderr_of(&output).contains("aggregated model:"));

    let sol_path = dir.path().join("solution.json");
    let output = netslice(&["solve", &instance, "--gap", "0", "--out", sol_path.to_str().unwrap()]);
    assert_code(&output, 0);
    let log = stderr_of(&output);
    assert!(log.contains("status: optimal"), "{log}");
    assert!(log.contains("activated:"), "{log}");

    let output = netslice(&["validate", &instance, sol_path.to_str().unwrap()]);
    assert_code(&output, 0);
    assert!(stdout_of(&output).contains("ok:"));
}

#[test]
fn validation_pinpoints_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let instance = generate(dir.path(), "example-pair", "0");
    let sol_path = dir.path().join("solution.json");
    let output = netslice(&["solve", &instance, "--gap", "0", "--out", sol_path.to_str().unwrap()]);
    assert_code(&output, 0);

    let mut value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&sol_path).unwrap()).unwrap();
    value["activated"] = serde_json::json!([]);
    std::fs::write(&sol_path, serde_json::to_string(&value).unwrap()).unwrap();

    let output = netslice(&["validate", &instance, sol_path.to_str().unwrap()]);
    assert_code(&output, 1);
    assert!(stdout_of(&output).contains("activation"), "{}", stdout_of(&output));
}

#[test]
fn narrow_path_budgets_are_reported_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let instance = generate(dir.path(), "example-chain", "0");
    let output = netslice(&["solve", &instance, "--paths", "1", "--gap", "0"]);
    assert_code(&output, 1);
    assert!(stderr_of(&output).contains("infeasible"));
}

#[test]
fn exhausted_time_limits_use_their_own_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let instance = generate(dir.path(), "example-pair", "0");
    let output = netslice(&["solve", &instance, "--time-limit", "0"]);
    assert_code(&output, 3);
    assert!(stderr_of(&output).contains("limit"));
}

#[test]
fn the_binary_is_its_own_external_solver() {
    let dir = tempfile::tempdir().unwrap();
    let instance = generate(dir.path(), "example-pair", "0");

    let builtin_path = dir.path().join("builtin.json");
    let output =
        netslice(&["solve", &instance, "--gap", "0", "--out", builtin_path.to_str().unwrap()]);
    assert_code(&output, 0);

    let adapter = format!("external:{} solve-lp", env!("CARGO_BIN_EXE_netslice"));
    let external_path = dir.path().join("external.json");
    let output = netslice(&[
        "solve",
        &instance,
        "--solver",
        &adapter,
        "--out",
        external_path.to_str().unwrap(),
    ]);
    assert_code(&output, 0);
    assert!(stderr_of(&output).contains("status: optimal"));

    // Exact decoding and canonical serialization make the two runs
    // byte-identical, not merely equivalent.
    assert_eq!(
        std::fs::read_to_string(&builtin_path).unwrap(),
        std::fs::read_to_string(&external_path).unwrap()
    );

    // The adapter also reports infeasibility through its exit code.
    let chain = generate(dir.path(), "example-chain", "0");
    let output = netslice(&["solve", &chain, "--paths", "1", "--solver", &adapter]);
    assert_code(&output, 1);
}

#[test]
fn comparisons_emit_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let pair = generate(dir.path(), "example-pair", "0");
    let six = generate(dir.path(), "six-node", "7");

    let csv_a = dir.path().join("a.csv");
    let output = netslice(&[
        "compare", &pair, &six, "--gap", "0", "--out", csv_a.to_str().unwrap(),
    ]);
    assert_code(&output, 0);
    let a = std::fs::read_to_string(&csv_a).unwrap();
    let mut lines = a.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("label,"));
    assert!(header.ends_with(",pairwise_time_s,aggregated_time_s"));
    assert_eq!(a.lines().count(), 4, "header, two rows, mean row:\n{a}");
    for line in lines.take(2) {
        assert!(line.contains(",true,"), "every solved row must agree: {line}");
    }

    let csv_b = dir.path().join("b.csv");
    let output = netslice(&[
        "compare", &pair, &six, "--gap", "0", "--out", csv_b.to_str().unwrap(),
    ]);
    assert_code(&output, 0);
    let b = std::fs::read_to_string(&csv_b).unwrap();
    assert_eq!(strip_time_columns(&a, 2), strip_time_columns(&b, 2));

    let output = netslice(&["compare", "--out", csv_a.to_str().unwrap()]);
    assert_code(&output, 0);
    let empty = std::fs::read_to_string(&csv_a).unwrap();
    assert_eq!(empty.lines().count(), 1, "empty input list yields a header-only CSV");
}

#[test]
fn sweeps_emit_point_rows_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("sweep.csv");
    let args = [
        "experiment",
        "--preset",
        "six-node",
        "--services",
        "1",
        "--paths",
        "1,2",
        "--seeds",
        "2",
        "--gap",
        "0",
        "--workers",
        "2",
        "--out",
    ];
    let output = netslice(&[&args[..], &[csv_path.to_str().unwrap()]].concat());
    assert_code(&output, 0);
    let a = std::fs::read_to_string(&csv_path).unwrap();
    let header = a.lines().next().unwrap();
    assert!(header.starts_with("preset,"));
    assert!(header.ends_with(",mean_time_s"));
    assert_eq!(a.lines().filter(|l| l.contains(",point,")).count(), 2);

    let output = netslice(&[&args[..], &[csv_path.to_str().unwrap()]].concat());
    assert_code(&output, 0);
    let b = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(strip_time_columns(&a, 1), strip_time_columns(&b, 1));
}

#[test]
fn invalid_inputs_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let output = netslice(&["generate", "--preset", "no-such-preset"]);
    assert_code(&output, 2);
    assert!(stderr_of(&output).contains("unknown preset"));

    let output = netslice(&["solve", "/nonexistent/instance.json"]);
    assert_code(&output, 2);

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    let output = netslice(&["validate", garbage.to_str().unwrap(), garbage.to_str().unwrap()]);
    assert_code(&output, 2);

    let instance = generate(dir.path(), "example-pair", "0");
    let output = netslice(&["solve", &instance, "--solver", "mystery"]);
    assert_code(&output, 2);
    assert!(stderr_of(&output).contains("unknown solver"));
}

#[test]
fn oversized_delay_weights_draw_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let instance = generate(dir.path(), "example-pair", "0");
    // The two worked services have budgets 4 and 3, so the warning window
    // closes at sigma = 1/7.
    let output = netslice(&["solve", &instance, "--sigma", "0.2", "--gap", "0"]);
    assert_code(&output, 0);
    assert!(stderr_of(&output).contains("warning: sigma"), "{}", stderr_of(&output));

    let output = netslice(&["solve", &instance, "--sigma", "0.001", "--gap", "0"]);
    assert_code(&output, 0);
    assert!(!stderr_of(&output).contains("warning"), "{}", stderr_of(&output));
}
