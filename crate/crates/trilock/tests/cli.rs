//! End-to-end runs of the `trilock` binary: artifact round trips, exit
//! codes, and report reproducibility.

use std::path::Path;
use std::process::{Command, Output};

use trilock::samples::{S27, TOY2};

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trilock"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn json_of(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&output.stdout),
            String::from_utf8_lossy(&output.stderr)
        )
    })
}

#[test]
fn lock_writes_bench_and_metadata_that_reparse() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s27.bench"), S27).unwrap();
    let out = run(
        &[
            "lock",
            "--bench",
            "s27.bench",
            "--kappa-s",
            "1",
            "--kappa-f",
            "1",
            "--alpha",
            "0.6",
            "--pairs",
            "1",
            "--seed",
            "42",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = json_of(&out);
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["verified"], "equivalent");

    let bench_path = dir.path().join("s27_locked.bench");
    let meta_path = dir.path().join("s27_locked.meta");
    assert!(
        bench_path.exists() && meta_path.exists(),
        "two files written"
    );
    let text = std::fs::read_to_string(&bench_path).unwrap();
    let circuit = trilock::parse_bench(&text).expect("locked netlist reparses");
    let again = trilock::parse_bench(&trilock::write_bench(&circuit)).unwrap();
    assert_eq!(circuit, again, "locked netlist round-trips");
}

#[test]
fn lock_without_reencoding_adds_no_encoder_gates() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s27.bench"), S27).unwrap();
    let out = run(
        &[
            "lock",
            "--bench",
            "s27.bench",
            "--kappa-s",
            "1",
            "--seed",
            "1",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("s27_locked.bench")).unwrap();
    assert!(!text.contains("lk_re_"), "no encoded registers at S = 0");
    assert!(!text.contains("lk_enc_"), "no encoder gates at S = 0");
}

#[test]
fn invalid_error_free_word_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("toy.bench"), TOY2).unwrap();
    // k** equal to the k* suffix violates the configuration invariant.
    let out = run(
        &[
            "lock",
            "--bench",
            "toy.bench",
            "--kappa-s",
            "2",
            "--kappa-f",
            "1",
            "--kstar",
            "100101",
            "--kdstar",
            "01",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("k**"));
}

#[test]
fn attack_report_matches_expected_baseline_resilience() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("toy.bench"), TOY2).unwrap();
    let out = run(
        &[
            "lock",
            "--bench",
            "toy.bench",
            "--naive",
            "--kappa-s",
            "2",
            "--kstar",
            "1001",
            "--seed",
            "9",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let out = run(
        &[
            "attack",
            "--locked",
            "toy2_locked.bench",
            "--oracle",
            "toy.bench",
            "--kappa",
            "2",
            "--trace",
            "trace.jsonl",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let report = json_of(&out);
    assert_eq!(report["status"], "KeyRecovered");
    assert_eq!(report["n_dip"], 15);
    assert_eq!(report["key"], "10 01");
    // One JSONL record per distinguishing input.
    let trace = std::fs::read_to_string(dir.path().join("trace.jsonl")).unwrap();
    assert_eq!(trace.lines().count(), 15);
    for line in trace.lines() {
        let rec: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(rec.get("input").is_some() && rec.get("oracle_output").is_some());
    }
}

#[test]
fn attack_reports_are_reproducible_excluding_timing() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("toy.bench"), TOY2).unwrap();
    run(
        &[
            "lock",
            "--bench",
            "toy.bench",
            "--kappa-s",
            "2",
            "--kappa-f",
            "1",
            "--kstar",
            "100101",
            "--kdstar",
            "11",
            "--seed",
            "5",
        ],
        dir.path(),
    );
    let args = [
        "attack",
        "--locked",
        "toy2_locked.bench",
        "--oracle",
        "toy.bench",
        "--kappa",
        "3",
        "--bstar",
        "2",
    ];
    let strip_timing = |mut v: serde_json::Value| {
        v.as_object_mut().unwrap().remove("wall_time_s");
        v
    };
    let a = strip_timing(json_of(&run(&args, dir.path())));
    let b = strip_timing(json_of(&run(&args, dir.path())));
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap(),
        "identical runs must produce byte-identical reports"
    );
}

#[test]
fn attack_timeout_exits_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("toy.bench"), TOY2).unwrap();
    run(
        &[
            "lock",
            "--bench",
            "toy.bench",
            "--kappa-s",
            "2",
            "--kappa-f",
            "1",
            "--seed",
            "5",
        ],
        dir.path(),
    );
    let out = run(
        &[
            "attack",
            "--locked",
            "toy2_locked.bench",
            "--oracle",
            "toy.bench",
            "--kappa",
            "3",
            "--timeout",
            "0.000001",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    let report = json_of(&out);
    assert_eq!(report["status"], "TimedOut");
}

#[test]
fn eval_report_schema_and_fc_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("toy.bench"), TOY2).unwrap();
    run(
        &[
            "lock",
            "--bench",
            "toy.bench",
            "--kappa-s",
            "2",
            "--kappa-f",
            "1",
            "--alpha",
            "0.6",
            "--kstar",
            "100101",
            "--kdstar",
            "11",
            "--seed",
            "5",
        ],
        dir.path(),
    );
    let out = run(
        &[
            "eval",
            "--locked",
            "toy2_locked.bench",
            "--oracle",
            "toy.bench",
            "--depth",
            "2",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = json_of(&out);
    for field in ["O", "E", "M", "P_M"] {
        assert!(report["scc"].get(field).is_some(), "missing scc.{field}");
    }
    // Locked without re-encoding: no mixed component.
    assert_eq!(report["scc"]["M"], 0);
    // Census corruptibility stays within the paper-grade error band of
    // the closed-form prediction plus its discretization allowance; at
    // toy scale the band is checked in the acceptance suite, here we
    // only require the sampled estimate to sit within 0.05 of exact.
    let exact = report["fc"]["estimate"].as_f64().unwrap();
    let out = run(
        &[
            "eval",
            "--locked",
            "toy2_locked.bench",
            "--oracle",
            "toy.bench",
            "--depth",
            "2",
            "--samples",
            "800",
        ],
        dir.path(),
    );
    let sampled = json_of(&out)["fc"]["estimate"].as_f64().unwrap();
    assert!(
        (sampled - exact).abs() <= 0.05,
        "800-sample estimate {sampled} vs census {exact}"
    );
}

#[test]
fn eval_after_reencoding_reports_mixed_sccs() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s27.bench"), S27).unwrap();
    run(
        &[
            "lock",
            "--bench",
            "s27.bench",
            "--kappa-s",
            "1",
            "--kappa-f",
            "1",
            "--pairs",
            "1",
            "--seed",
            "42",
        ],
        dir.path(),
    );
    let out = run(
        &[
            "eval",
            "--locked",
            "s27_locked.bench",
            "--oracle",
            "s27.bench",
            "--samples",
            "200",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let report = json_of(&out);
    assert!(report["scc"]["M"].as_u64().unwrap() >= 1);
    assert!(report["scc"]["P_M"].as_f64().unwrap() > 0.0);
    assert!(report["overhead"]["gate_pct"].as_f64().unwrap() > 0.0);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("toy.bench"), TOY2).unwrap();
    std::fs::write(
        dir.path().join("lock.conf"),
        "kappa_s = 2\nkappa_f = 1\nalpha = 0.6\nkstar = 100101\nkdstar = 11\nseed = 5\n",
    )
    .unwrap();
    let out = run(
        &["lock", "--bench", "toy.bench", "--config", "lock.conf"],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = json_of(&out);
    assert_eq!(report["kappa_s"], 2);
    assert_eq!(report["kappa_f"], 1);
    let meta = std::fs::read_to_string(dir.path().join("toy2_locked.meta")).unwrap();
    assert!(meta.contains("k_star = 10 01 01"));
}

#[test]
fn attack_can_dump_the_unrolled_dimacs() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("toy.bench"), TOY2).unwrap();
    run(
        &[
            "lock",
            "--bench",
            "toy.bench",
            "--kappa-s",
            "1",
            "--kappa-f",
            "1",
            "--seed",
            "5",
        ],
        dir.path(),
    );
    let out = run(
        &[
            "attack",
            "--locked",
            "toy2_locked.bench",
            "--oracle",
            "toy.bench",
            "--kappa",
            "2",
            "--bstar",
            "1",
            "--dump-dimacs",
            "unrolled.cnf",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let cnf = std::fs::read_to_string(dir.path().join("unrolled.cnf")).unwrap();
    assert!(cnf.contains("p cnf "));
    assert!(cnf.contains("c var 1 = "));
}
