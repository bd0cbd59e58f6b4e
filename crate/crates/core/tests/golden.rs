//! Text reports for the corpus, compared against `specs/golden/`.
//! Set `UPDATE_GOLDEN=1` to rewrite the expected files.

mod common;

use std::process::Command;

use common::*;
use prodcheck::cli::{run, Mode, ReportFormat, RunConfig};
use prodcheck::translate::Caps;

fn config(file: &str) -> RunConfig {
    RunConfig { input: spec_path(file), ..Default::default() }
}

#[test]
fn corpus_reports() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for file in CORPUS {
        let out = run(&config(file));
        let text = format!("exit {}\n{}", out.code, out.stdout);
        let path = spec_path("golden").join(file.replace(".spec", ".txt"));
        if update {
            std::fs::write(&path, &text).unwrap();
        } else {
            let want = std::fs::read_to_string(&path).unwrap();
            assert_eq!(text, want, "{file}");
        }
    }
}

#[test]
fn exit_codes() {
    let code = |cfg: RunConfig| run(&cfg).code;
    assert_eq!(code(config("pascal.spec")), 0);
    assert_eq!(code(config("do_m.spec")), 1);
    assert_eq!(code(config("nested.spec")), 1);
    assert_eq!(code(config("convolution.spec")), 2);
    assert_eq!(code(config("bad/syntax.spec")), 10);
    assert_eq!(code(config("bad/overlap.spec")), 11);
    assert_eq!(code(config("bad/unfriendly.spec")), 12);
    assert_eq!(code(RunConfig { root: Some("Nope".into()), ..config("pascal.spec") }), 12);
    let tiny = Caps { max_columns: 1, ..Caps::default() };
    assert_eq!(code(RunConfig { caps: tiny, ..config("traces.spec") }), 13);
    assert_eq!(code(RunConfig { mode: Mode::Gates, ..config("convolution.spec") }), 0);
    assert_eq!(code(RunConfig { mode: Mode::OracleCheck, ..config("pascal.spec") }), 0);
}

#[test]
fn root_selects_one_constant() {
    let out = run(&RunConfig { root: Some("ones".into()), ..config("convolution.spec") });
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("The specification of ones is productive."));
    assert!(!out.stdout.contains("nats depends"));
}

#[test]
fn diagnostics_carry_positions() {
    let out = run(&config("bad/syntax.spec"));
    assert!(out.stderr.contains("syntax.spec:5:"), "{}", out.stderr);
    let out = run(&config("bad/overlap.spec"));
    assert!(out.stderr.contains("overlap.spec:8:1: error: rule overlaps with the rule at 7:1"), "{}", out.stderr);
}

#[test]
fn json_report_is_parseable() {
    let out = run(&RunConfig { report: ReportFormat::Json, ..config("morse_pure.spec") });
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["gates"]["zip"]["args"][1], "(+-+)");
    assert_eq!(v["constants"][0]["verdict"], "productive");
}

#[test]
fn binary_runs() {
    let out = Command::new(env!("CARGO_BIN_EXE_prodcheck"))
        .arg(spec_path("do_m.spec"))
        .args(["--report", "json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["constants"][0]["production"], 1);
}
