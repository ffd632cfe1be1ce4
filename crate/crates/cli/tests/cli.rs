use std::process::Command;

use nlbox::BellExpression;
use nlbox_cli::{cmd_verify_table3, run, summary_path, Format, RunConfig, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE};
use clap::Parser;

fn nlbox(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_nlbox")).args(args).output().unwrap()
}

fn json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).unwrap()
}

#[test]
fn verify_table3_json() {
    let out = run(["nlbox", "verify-table3"]);
    assert_eq!(out.code, EXIT_OK);
    let doc = json(&out.stdout);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["matches"], 256);
    assert_eq!(doc["mismatches"].as_array().unwrap().len(), 0);
    assert_eq!(doc["values"][0][0], 9.0);
    assert_eq!(doc["values"][0][3], -3.0);
}

#[test]
fn verify_table3_csv_has_header_and_sixteen_rows() {
    let out = run(["nlbox", "verify-table3", "--format", "csv"]);
    assert_eq!(out.code, EXIT_OK);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 17);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(reader.headers().unwrap().len(), 18);
    for record in reader.records() {
        let record = record.unwrap();
        for v in record.iter().skip(2) {
            assert!(["9", "1", "-3"].contains(&v), "{v}");
        }
    }
}

#[test]
fn corrupted_sign_table_is_reported() {
    let mut exprs: Vec<BellExpression> = BellExpression::all().to_vec();
    let mut signs = *exprs[4].signs();
    signs[2][1] = -signs[2][1];
    exprs[4] = BellExpression::from_signs(5, signs).unwrap();
    let config = RunConfig::try_parse_from(["nlbox", "verify-table3"]).unwrap();
    let out = cmd_verify_table3(&config, &exprs);
    assert_eq!(out.code, EXIT_MISMATCH);
    let doc = json(&out.stdout);
    let cells = doc["mismatches"].as_array().unwrap();
    assert_eq!(cells.len(), 16);
    assert!(cells.iter().all(|c| c["inequality"] == 5));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("mismatch: state 5 (PM,PP) inequality 5"));
}

#[test]
fn bounds_report() {
    let out = run(["nlbox", "bounds"]);
    assert_eq!(out.code, EXIT_OK);
    let doc = json(&out.stdout);
    assert_eq!(doc["polytope_dim"], 99);
    assert_eq!(doc["strategies"], 4096);
    let rows = doc["inequalities"].as_array().unwrap();
    assert_eq!(rows.len(), 16);
    for r in rows {
        assert_eq!(r["lhv_max"], 7);
        assert_eq!(r["ns_value"], 9);
        assert_eq!(r["is_facet"], true);
        assert_eq!(r["saturator_dim"], 98);
    }
}

#[test]
fn swap_map_for_all_source_choices() {
    for sources in ["SM,SM", "PP,PP", "SP,PM"] {
        let out = run(["nlbox", "swap-map", "--sources", sources]);
        assert_eq!(out.code, EXIT_OK, "{sources}");
        let doc = json(&out.stdout);
        assert_eq!(doc["sources"], sources);
        assert_eq!(doc["is_permutation"], true);
        for e in doc["entries"].as_array().unwrap() {
            assert_eq!(e["probability"], 0.0625);
            assert_eq!(e["beta"], 9.0);
        }
    }
}

#[test]
fn sample_writes_events_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let events = dir.path().join("runs.csv");
    let out = run([
        "nlbox",
        "sample",
        "--shots",
        "5000",
        "--seed",
        "12",
        "--out",
        events.to_str().unwrap(),
    ]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&events).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("run_id,x,y,a1,a2,b1,b2,r1,r2"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 9);
    assert_eq!(first[0], "0");
    assert!(first[3..7].iter().all(|b| *b == "+1" || *b == "-1"));
    assert!(first[7..].iter().all(|r| ["PP", "PM", "SP", "SM"].contains(r)));
    assert_eq!(text.lines().count(), 5001);

    let summary = json(&std::fs::read(summary_path(&events, Format::Json)).unwrap());
    assert_eq!(summary["shots"], 5000);
    let classes = summary["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 16);
    let total: u64 = classes.iter().map(|c| c["count"].as_u64().unwrap()).sum();
    assert_eq!(total, 5000);
    for c in classes {
        assert_eq!(c["beta_hat"], 9.0);
        assert!((c["frequency"].as_f64().unwrap() - 0.0625).abs() < 0.02);
    }
}

#[test]
fn sparse_sample_reports_insufficient_cells() {
    let out = run(["nlbox", "sample", "--shots", "30", "--format", "csv"]);
    assert_eq!(out.code, EXIT_OK);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("insufficient samples"));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 17);
}

#[test]
fn summary_path_sits_next_to_events() {
    let p = summary_path(std::path::Path::new("/tmp/out/runs.csv"), Format::Csv);
    assert_eq!(p, std::path::Path::new("/tmp/out/runs.summary.csv"));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["nlbox"],
        vec!["nlbox", "teleport"],
        vec!["nlbox", "sample", "--shots", "0"],
        vec!["nlbox", "sample", "--shots", "many"],
        vec!["nlbox", "swap-map", "--sources", "PP"],
        vec!["nlbox", "swap-map", "--sources", "PP,XX"],
        vec!["nlbox", "bounds", "--format", "xml"],
    ] {
        assert_eq!(run(args.clone()).code, EXIT_USAGE, "{args:?}");
    }
    assert_eq!(run(["nlbox", "--help"]).code, EXIT_OK);
}

#[test]
fn unwritable_output_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no/such/dir/out.json");
    let out = run(["nlbox", "bounds", "--out", missing.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_USAGE);
}

#[test]
fn binary_exit_codes_and_streams() {
    let ok = nlbox(&["swap-map", "--format", "csv"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8(ok.stdout).unwrap().lines().count(), 17);
    let bad = nlbox(&["sample", "--shots", "0"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(!bad.stderr.is_empty());
}

#[test]
fn different_seeds_differ() {
    let a = run(["nlbox", "sample", "--shots", "2000", "--seed", "1"]);
    let b = run(["nlbox", "sample", "--shots", "2000", "--seed", "2"]);
    assert_ne!(a.stdout, b.stdout);
}
