//! End-to-end tests of the command-line interface: exit codes, golden
//! tables, document round-trips, and determinism across configurations.

use std::process::{Command, Output};

/// Run the binary from the crate root so relative data paths resolve.
fn qhom(args: &[&str]) -> Output {
    qhom_env(args, &[])
}

fn qhom_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qhom"));
    cmd.args(args).current_dir(env!("CARGO_MANIFEST_DIR"));
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

#[test]
fn check_accepts_the_builtin_associative_operad() {
    let out = qhom(&["check", "--operad", "ass", "--max-arity", "3"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("unit laws: ok"));
    assert!(text.contains("arity dimensions [1:1, 2:2, 3:6]"));
}

#[test]
fn qh_of_the_free_algebra_matches_the_golden_table() {
    let args = [
        "qh", "--operad", "com", "--algebra", "free:1", "--max-weight", "3", "--levels", "4",
    ];
    let out = qhom(&args);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), include_str!("golden/qh_free.tsv"));

    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let out = qhom(&json_args);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), include_str!("golden/qh_free.json"));
}

#[test]
fn qh_of_the_square_zero_algebra_matches_the_golden_table() {
    let out = qhom(&[
        "qh", "--operad", "com", "--max-arity", "3", "--algebra", "squarezero:1",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), include_str!("golden/qh_squarezero_com.tsv"));
}

#[test]
fn an_operad_with_constants_checks_but_refuses_qh() {
    let out = qhom(&["check", "--input", "tests/data/constant.json"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let out = qhom(&["qh", "--operad", "tests/data/constant.json"]);
    assert_eq!(code(&out), 3);
    let msg = stderr(&out);
    assert!(msg.contains("arity 0"), "stderr: {msg}");
    assert!(msg.contains("at least one input"), "stderr: {msg}");
}

#[test]
fn a_degree_beyond_the_trustworthy_window_exits_three() {
    let out = qhom(&[
        "qh", "--operad", "com", "--max-arity", "2", "--algebra", "free:1", "--levels", "3",
        "--max-degree", "10",
    ]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("total degree 2"));
}

#[test]
fn a_broken_coxeter_relation_is_rejected_by_name() {
    let out = qhom(&["check", "--input", "tests/data/broken-coxeter.json"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("s_0^2 = 1"), "stderr: {}", stderr(&out));
}

#[test]
fn schema_errors_exit_two() {
    for path in [
        "tests/data/malformed.json",
        "tests/data/unknown-kind.json",
        "tests/data/bad-index.json",
    ] {
        let out = qhom(&["check", "--input", path]);
        assert_eq!(code(&out), 2, "{path}: {}", stderr(&out));
        assert!(stderr(&out).contains(path) || stderr(&out).contains("out of range"));
    }
    let out = qhom(&["free", "--operad", "com", "--format", "yaml"]);
    assert_eq!(code(&out), 2);
    let out = qhom(&["free"]);
    assert_eq!(code(&out), 2);
    let out = qhom(&["check", "--input", "tests/data/constant.json", "--operad", "com"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn emitted_operads_round_trip_byte_for_byte() {
    let dir = tempfile::tempdir().expect("tempdir");
    let first = dir.path().join("com.json");
    let second = dir.path().join("com2.json");
    let out = qhom(&[
        "check", "--operad", "com", "--max-arity", "3", "--emit", first.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let out = qhom(&[
        "check", "--input", first.to_str().unwrap(), "--emit", second.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let a = std::fs::read(&first).unwrap();
    let b = std::fs::read(&second).unwrap();
    assert_eq!(a, b);

    // identical tables through the builtin and through its document
    let from_doc = qhom(&["qh", "--operad", first.to_str().unwrap(), "--algebra", "free:1"]);
    let from_builtin = qhom(&["qh", "--operad", "com", "--max-arity", "3", "--algebra", "free:1"]);
    assert_eq!(code(&from_doc), 0);
    assert_eq!(stdout(&from_doc), stdout(&from_builtin));
}

#[test]
fn outputs_are_identical_across_thread_counts() {
    let args = ["qh", "--operad", "com", "--max-arity", "3", "--algebra", "squarezero:1"];
    let one = qhom_env(&args, &[("QHOM_THREADS", "1")]);
    let eight = qhom_env(&args, &[("QHOM_THREADS", "8")]);
    assert_eq!(code(&one), 0);
    assert_eq!(stdout(&one), stdout(&eight));

    let bad = qhom_env(&["check", "--operad", "com"], &[("QHOM_THREADS", "abc")]);
    assert_eq!(code(&bad), 2);
    assert!(stderr(&bad).contains("positive integer"));
}

#[test]
fn an_explicit_action_table_matches_the_builtin_square_zero_algebra() {
    let out = qhom(&["check", "--input", "tests/data/squarezero-embedded.json"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("unit and associativity of the action: ok"));

    let out = qhom(&[
        "qh", "--operad", "com", "--max-arity", "3", "--algebra",
        "tests/data/squarezero-action.json",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), include_str!("golden/qh_squarezero_com.tsv"));
}

#[test]
fn an_algebra_document_with_an_embedded_operad_conflicts_with_the_flag() {
    let out = qhom(&[
        "qh", "--operad", "com", "--algebra", "tests/data/squarezero-embedded.json",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("embeds an operad"));
}

#[test]
fn free_dimensions_of_the_commutative_algebra_on_two_generators() {
    let out = qhom(&["free", "--operad", "com", "--max-arity", "3", "--algebra", "free:2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        "weight\tarity\tdegree\tdim\n1\t0\t0\t2\n2\t0\t0\t3\n3\t0\t0\t4\n"
    );
}

#[test]
fn bar_levels_over_the_unit_operad_match_the_golden_table() {
    let out = qhom(&[
        "bar", "--operad", "unit", "--max-arity", "2", "--algebra", "free:1", "--levels", "2",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), include_str!("golden/bar_unit.tsv"));
}

#[test]
fn homology_of_an_interval_is_a_single_class() {
    let out = qhom(&["homology", "--input", "tests/data/interval.json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "weight\tarity\tdegree\tbetti\n0\t0\t0\t1\n");
}

#[test]
fn change_along_the_projection_matches_the_golden_table() {
    let out = qhom(&["change", "--map", "proj", "--algebra", "free:1", "--max-arity", "3"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), include_str!("golden/change_proj.tsv"));
}

#[test]
fn change_along_a_map_document_runs() {
    let out = qhom(&["change", "--map", "tests/data/identity-map.json", "--algebra", "free:1"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("2\t0\t0\t1"));
}

#[test]
fn dold_kan_report_matches_the_golden_transcript() {
    let out = qhom(&["dold-kan", "--input", "tests/data/copower.json"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), include_str!("golden/doldkan_copower.txt"));
}

#[test]
fn planar_mode_reproduces_the_symmetric_free_algebra_table() {
    let out = qhom(&[
        "qh", "--operad", "ass", "--non-sigma", "--max-arity", "3", "--algebra", "free:1",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let sym = qhom(&["qh", "--operad", "ass", "--max-arity", "3", "--algebra", "free:1"]);
    assert_eq!(stdout(&out), stdout(&sym));
}

#[test]
fn selftest_matches_the_committed_transcript() {
    let out = qhom(&["selftest"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), include_str!("golden/selftest.txt"));
}
