//! The `prodcheck` driver: runs the pipeline on a file and renders a report.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::ValueEnum;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::conat::{Approx, CoNat};
use crate::dogame::{do_low_constant, do_low_function};
use crate::error::{Diagnostic, Error, Result};
use crate::prodcalc::Gate;
use crate::solver::solve_traced;
use crate::streamspec::parse;
use crate::translate::{analyze, Analysis, Answer, Caps, Context};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    #[default]
    Decide,
    Gates,
    OracleCheck,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub input: PathBuf,
    pub mode: Mode,
    pub root: Option<String>,
    pub report: ReportFormat,
    pub caps: Caps,
    pub verbose: bool,
    pub dump_columns: bool,
}

/// What a run prints and how it exits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub name: String,
    pub production: CoNat,
    pub context: Context,
    pub verdict: Answer,
}

/// Machine-readable form of a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub file: String,
    pub constants: Vec<ConstantReport>,
    pub gates: IndexMap<String, Gate>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Report {
    pub fn new(file: &str, a: &Analysis) -> Report {
        Report {
            file: file.to_string(),
            constants: a
                .verdicts
                .iter()
                .map(|v| ConstantReport {
                    name: v.name.clone(),
                    production: v.production,
                    context: v.context,
                    verdict: v.answer,
                })
                .collect(),
            gates: a.gates.iter().map(|(f, t)| (f.clone(), t.gate.clone())).collect(),
            diagnostics: a.diagnostics.clone(),
        }
    }
}

fn context_line(name: &str, ctx: Context) -> String {
    match ctx {
        Context::AllPure => format!("{name} depends only on pure stream functions, we can decide productivity."),
        Context::AllFlat => {
            format!("{name} depends only on flat stream functions, we can decide data-oblivious productivity.")
        }
        Context::FriendlyNesting => {
            format!("{name} depends on friendly nesting stream functions, we try to prove productivity.")
        }
    }
}

fn gates_text(a: &Analysis, cfg: &RunConfig, out: &mut String) -> Result<()> {
    for (f, t) in &a.gates {
        let guard = if t.guarded { "" } else { ", unguarded" };
        writeln!(out, "The function symbol {f} is {}{guard}.", t.class.describe()).unwrap();
        writeln!(out, "  {f} : {}", t.gate).unwrap();
        if cfg.verbose {
            writeln!(out, "  star: {}", t.star).unwrap();
            for line in t.system.to_string().lines() {
                writeln!(out, "    {line}").unwrap();
            }
        }
        if cfg.dump_columns {
            for r in &t.system.roots {
                let s = solve_traced(&t.system, r, cfg.caps.max_columns)?;
                writeln!(out, "  diagram for {r}:").unwrap();
                for line in s.to_string().lines() {
                    writeln!(out, "    {line}").unwrap();
                }
            }
        }
    }
    Ok(())
}

fn decide_text(a: &Analysis, cfg: &RunConfig, out: &mut String) -> Result<()> {
    gates_text(a, cfg, out)?;
    if a.verdicts.is_empty() {
        writeln!(out, "No stream constant declared; only gates were computed.").unwrap();
    }
    for v in &a.verdicts {
        writeln!(out).unwrap();
        writeln!(out, "{}", context_line(&v.name, v.context)).unwrap();
        writeln!(out, "  {}", v.term).unwrap();
        for s in &v.trace {
            writeln!(out, "  {} -> {}", s.rule.id(), s.term).unwrap();
        }
        writeln!(out, "{}", v.sentence()).unwrap();
    }
    Ok(())
}

/// Compares gates and constant productions with the game oracle.
fn oracle_text(a: &Analysis, cfg: &RunConfig, out: &mut String) -> Result<bool> {
    let caps = &cfg.caps;
    let mut ok = true;
    for (f, t) in &a.gates {
        if !t.class.is_flat() {
            writeln!(out, "{f}: skipped (not flat)").unwrap();
            continue;
        }
        let k = t.gate.arity();
        let mut checked = 0;
        let mut bad = 0;
        let mut n = vec![0u64; k];
        loop {
            let game = do_low_function(&a.spec, &a.classification, f, &n, caps.oracle_prod_cap, caps.oracle_steps)?;
            let supplies: Vec<CoNat> = n.iter().map(|&x| CoNat::Fin(x)).collect();
            let gate = t.gate.interpret(&supplies);
            checked += 1;
            if !game.admits(gate) && !(gate.is_top() && matches!(game, Approx::AtLeast(_))) {
                bad += 1;
                writeln!(out, "{f}{n:?}: gate {gate}, game {game}").unwrap();
            }
            let Some(i) = n.iter().position(|&x| x < 8) else { break };
            n[i] += 1;
            n[..i].iter_mut().for_each(|x| *x = 0);
        }
        writeln!(out, "{f}: {}/{checked} supplies agree", checked - bad).unwrap();
        ok &= bad == 0;
    }
    for v in &a.verdicts {
        if v.context == Context::FriendlyNesting {
            writeln!(out, "{}: skipped (friendly nesting)", v.name).unwrap();
            continue;
        }
        let game = do_low_constant(&a.spec, &a.classification, &v.name, caps.oracle_prod_cap, caps.oracle_steps)?;
        let agree = game.admits(v.production) || (v.production.is_top() && matches!(game, Approx::AtLeast(_)));
        let tag = if agree { "agrees" } else { "DISAGREES" };
        writeln!(out, "{}: production {}, game {game} ({tag})", v.name, v.production).unwrap();
        ok &= agree;
    }
    Ok(ok)
}

fn run_inner(cfg: &RunConfig, file: &str) -> Result<(i32, String, Vec<Diagnostic>)> {
    let src = std::fs::read_to_string(&cfg.input)?;
    let spec = parse(&src)?;
    let root = if cfg.mode == Mode::Gates { None } else { cfg.root.as_deref() };
    let a = analyze(spec, &cfg.caps, root)?;
    let mut out = String::new();
    let code = match (cfg.mode, cfg.report) {
        (_, ReportFormat::Json) => {
            out = serde_json::to_string_pretty(&Report::new(file, &a)).expect("serializable");
            out.push('\n');
            if cfg.mode == Mode::Decide {
                a.verdicts.iter().map(|v| v.answer.exit_code()).max().unwrap_or(0)
            } else {
                0
            }
        }
        (Mode::Decide, ReportFormat::Text) => {
            decide_text(&a, cfg, &mut out)?;
            a.verdicts.iter().map(|v| v.answer.exit_code()).max().unwrap_or(0)
        }
        (Mode::Gates, ReportFormat::Text) => {
            gates_text(&a, cfg, &mut out)?;
            0
        }
        (Mode::OracleCheck, ReportFormat::Text) => {
            if oracle_text(&a, cfg, &mut out)? {
                0
            } else {
                1
            }
        }
    };
    Ok((code, out, a.diagnostics))
}

/// Runs the analyzer as configured. Never panics on bad input; failures become
/// diagnostics on `stderr` and an exit code of 10 or more.
pub fn run(cfg: &RunConfig) -> Outcome {
    let file = cfg.input.display().to_string();
    match run_inner(cfg, &file) {
        Ok((code, stdout, diags)) => {
            let stderr = diags.iter().map(|d| d.with_file(&file) + "\n").collect();
            Outcome { code, stdout, stderr }
        }
        Err(e) => {
            let stderr = match &e {
                Error::Parse(ds) | Error::Invalid(ds) => ds.iter().map(|d| d.with_file(&file) + "\n").collect(),
                e => format!("{file}: error: {e}\n"),
            };
            Outcome { code: e.exit_code(), stdout: String::new(), stderr }
        }
    }
}
