//! End-to-end tests of the command line interface: exit codes, report
//! shape, determinism, and the environment override. Most cases drive
//! the dispatcher in process; the environment test spawns the real
//! binary so it cannot race other tests.

use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("prodiso").chain(args.iter().copied());
    let code = prodiso::cli::dispatch_to(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn parse_report(stdout: &str) -> Value {
    serde_json::from_str(stdout).expect("stdout is a JSON report")
}

#[test]
fn malformed_inputs_exit_one_with_diagnostics() {
    let (code, out, err) = run(&["validate", &fixture("bad_ratio.json")]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("denominator"), "stderr was: {err}");

    let (code, _, err) = run(&["validate", &fixture("asym.json")]);
    assert_eq!(code, 1);
    assert!(err.contains("asymmetry"), "stderr was: {err}");

    let (code, _, err) = run(&["validate", "/nonexistent/nowhere.json"]);
    assert_eq!(code, 1);
    assert!(err.contains("cannot read"), "stderr was: {err}");
}

#[test]
fn usage_errors_exit_sixty_four() {
    let (code, _, _) = run(&["--bogus-flag", "validate", "x.json"]);
    assert_eq!(code, 64);

    let (code, _, err) = run(&["decompose", "--products", &fixture("p3xp3.json")]);
    assert_eq!(code, 64);
    assert!(err.contains("--all or --map"), "stderr was: {err}");

    let (code, _, _) = run(&["verify", "--criteria", "9"]);
    assert_eq!(code, 64);

    let (code, _, _) = run(&["verify", "--suite", "bench"]);
    assert_eq!(code, 64);

    let (code, _, err) = run(&["quad"]);
    assert_eq!(code, 64);
    assert!(err.contains("--dim"), "stderr was: {err}");
}

#[test]
fn help_and_version_exit_zero_on_stdout() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("decompose"));

    let (code, out, _) = run(&["--version"]);
    assert_eq!(code, 0);
    assert!(out.contains("prodiso"));
}

#[test]
fn grid_decomposition_is_all_reducible() {
    let a = fixture("p3xp3.json");
    let (code, out, _) = run(&["decompose", "--products", &a, &a, "--all"]);
    assert_eq!(code, 0);
    let report = parse_report(&out);
    assert_eq!(report["verdict"], "all-reducible");
    assert_eq!(report["results"]["count"], 8);
    assert_eq!(report["results"]["reducible"], 8);
    assert_eq!(report["results"]["certificates"].as_array().unwrap().len(), 8);
}

#[test]
fn simplex_square_yields_irreducibles_and_exit_two() {
    let (code, out, _) = run(&["decompose", "--products", &fixture("p2xp2.json"), "--all"]);
    assert_eq!(code, 2);
    let report = parse_report(&out);
    assert_eq!(report["verdict"], "irreducible-found");
    assert_eq!(report["results"]["count"], 24);
    assert_eq!(report["results"]["reducible"], 8);
    assert_eq!(report["results"]["irreducible"], 16);
}

#[test]
fn factor_count_mismatch_exits_three() {
    let (code, out, _) = run(&[
        "decompose",
        "--products",
        &fixture("simplex_flat.json"),
        &fixture("p2xp2.json"),
        "--all",
    ]);
    assert_eq!(code, 3);
    let report = parse_report(&out);
    assert_eq!(report["verdict"], "hypothesis-violation");
    let first = &report["results"]["certificates"][0];
    assert_eq!(first["violation"]["kind"], "factor-count");
}

#[test]
fn quad_graph_emission_matches_closed_forms() {
    let (code, out, _) = run(&["quad", "--dim", "3", "--scale", "1"]);
    assert_eq!(code, 0);
    let report = parse_report(&out);
    assert_eq!(report["results"]["vertex_count"], 14);
    assert_eq!(report["results"]["edge_count"], 24);
    assert_eq!(report["results"]["vertices"][0]["label"], "+e0");
}

#[test]
fn chain_embedding_certifies_into_the_square() {
    let (code, out, _) = run(&["quad", "--target", &fixture("p5xp5.json")]);
    assert_eq!(code, 0);
    let report = parse_report(&out);
    assert_eq!(report["verdict"], "certified");
    let results = &report["results"];
    assert_eq!(results["admissible"], true);
    assert_eq!(results["standard"], true);
    assert_eq!(results["tip_multiplicities"], serde_json::json!([1, 1]));
    assert_eq!(results["embedding"]["+e0"], serde_json::json!(["4", "2"]));
    assert_eq!(results["embedding"]["(-,-)"], serde_json::json!(["1", "1"]));
}

#[test]
fn max_dim_search_reports_two_for_the_square() {
    let (code, out, _) = run(&["quad", "--target", &fixture("p5xp5.json"), "--max-dim"]);
    assert_eq!(code, 0);
    let report = parse_report(&out);
    assert_eq!(report["results"]["max_dim"], 2);
    assert!(report["results"]["embedding"].is_object());
}

#[test]
fn map_files_decompose_or_are_rejected() {
    let a = fixture("p3xp3.json");
    let (code, out, _) =
        run(&["decompose", "--products", &a, "--map", &fixture("swap_map.json")]);
    assert_eq!(code, 0);
    let report = parse_report(&out);
    assert_eq!(report["results"]["certificates"][0]["perm"], serde_json::json!([1, 0]));

    let (code, _, err) =
        run(&["decompose", "--products", &a, "--map", &fixture("not_isometry_map.json")]);
    assert_eq!(code, 1);
    assert!(err.contains("not an isometry"), "stderr was: {err}");

    let (code, _, err) =
        run(&["decompose", "--products", &a, "--map", &fixture("incomplete_map.json")]);
    assert_eq!(code, 1);
    assert!(err.contains("8 of 9"), "stderr was: {err}");
}

#[test]
fn an_irreducible_map_exits_two_with_a_witness() {
    let (code, out, _) = run(&[
        "decompose",
        "--products",
        &fixture("p2xp2.json"),
        "--map",
        &fixture("three_cycle_map.json"),
    ]);
    assert_eq!(code, 2);
    let report = parse_report(&out);
    let witness = &report["results"]["certificates"][0]["witness"];
    assert!(witness["kind"].is_string());
}

#[test]
fn isometry_enumeration_reports_a_closed_group() {
    let (code, out, _) = run(&["isometries", &fixture("p3xp3.json")]);
    assert_eq!(code, 0);
    let report = parse_report(&out);
    assert_eq!(report["results"]["count"], 8);
    assert_eq!(report["results"]["group"]["closed"], true);
    assert_eq!(report["results"]["group"]["identity"], true);
    assert_eq!(report["results"]["group"]["inverses"], true);

    let (code, out, _) = run(&["isometries", &fixture("p3.json"), &fixture("p5.json")]);
    assert_eq!(code, 0);
    let report = parse_report(&out);
    assert_eq!(report["verdict"], "none");
    assert_eq!(report["results"]["count"], 0);
}

#[test]
fn product_subcommand_lists_slices_and_matrix() {
    let (code, out, _) = run(&["product", &fixture("p3xp3.json"), "--slices", "0", "--matrix"]);
    assert_eq!(code, 0);
    let report = parse_report(&out);
    assert_eq!(report["results"]["points"], 9);
    assert_eq!(report["results"]["slices"]["count"], 9);
    let matrix = &report["results"]["matrix"];
    assert_eq!(matrix["points"].as_array().unwrap().len(), 9);

    let (code, _, err) = run(&["product", &fixture("p3xp3.json"), "--slices", "5"]);
    assert_eq!(code, 1);
    assert!(err.contains("out of range"), "stderr was: {err}");
}

#[test]
fn reports_are_deterministic_modulo_timing() {
    let a = fixture("p3xp3.json");
    let strip = |s: &str| -> String {
        s.lines().filter(|l| !l.contains("timing_ms")).collect::<Vec<_>>().join("\n")
    };
    let (_, first, _) = run(&["decompose", "--products", &a, &a, "--all"]);
    let (_, second, _) = run(&["decompose", "--products", &a, &a, "--all"]);
    assert_eq!(strip(&first), strip(&second));

    let (_, first, _) = run(&["quad", "--target", &fixture("p5xp5.json")]);
    let (_, second, _) = run(&["quad", "--target", &fixture("p5xp5.json")]);
    assert_eq!(strip(&first), strip(&second));
}

#[test]
fn text_format_renders_the_report() {
    let (code, out, _) = run(&["validate", &fixture("p3.json"), "--format", "text"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("command: validate"), "stdout was: {out}");
    assert!(out.contains("verdict: valid"));
}

#[test]
fn output_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let (code, out, _) = run(&[
        "validate",
        &fixture("p3.json"),
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written["verdict"], "valid");
}

#[test]
fn fast_verification_checks_pass_and_render_a_table() {
    let (code, out, err) = run(&["verify", "--criteria", "2"]);
    assert_eq!(code, 0);
    let report = parse_report(&out);
    assert_eq!(report["verdict"], "pass");
    assert_eq!(report["results"]["checks"][0]["id"], 2);
    assert!(err.contains("two-point-contrast"), "stderr was: {err}");
    assert!(err.contains("pass"), "stderr was: {err}");
}

#[test]
fn node_cap_env_is_honored_and_the_flag_wins() {
    let exe = env!("CARGO_BIN_EXE_prodiso");
    let a = fixture("p3xp3.json");

    let starved = Command::new(exe)
        .args(["isometries", &a])
        .env("PRODISO_NODE_CAP", "3")
        .output()
        .expect("binary runs");
    assert_eq!(starved.status.code(), Some(1));
    let err = String::from_utf8_lossy(&starved.stderr);
    assert!(err.contains("budget 3"), "stderr was: {err}");

    let rescued = Command::new(exe)
        .args(["isometries", &a, "--node-cap", "10000000"])
        .env("PRODISO_NODE_CAP", "3")
        .output()
        .expect("binary runs");
    assert_eq!(rescued.status.code(), Some(0));

    let invalid = Command::new(exe)
        .args(["isometries", &a])
        .env("PRODISO_NODE_CAP", "zero")
        .output()
        .expect("binary runs");
    assert_eq!(invalid.status.code(), Some(0));
    let err = String::from_utf8_lossy(&invalid.stderr);
    assert!(err.contains("ignoring invalid"), "stderr was: {err}");
}
