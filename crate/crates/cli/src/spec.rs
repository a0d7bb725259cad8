//! TOML experiment specs: a gauge section plus a list of tasks, each a thin
//! call into the same operations the subcommands expose. Reports are written
//! atomically; a task with an `expect` whose verdict differs is a contract
//! failure (exit 1). Parse and validation problems exit 2.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use serde::Deserialize;
use serde_json::Value;

use crate::ops;
use crate::GridArgs;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    /// Spec schema tag, e.g. "gennum-spec/1".
    schema: Option<String>,
    gauge: Option<GaugeSection>,
    #[serde(default, rename = "task")]
    tasks: Vec<TaskSpec>,
}

#[derive(Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
struct GaugeSection {
    k_min: Option<u32>,
    k_max: Option<u32>,
    q_max: Option<u32>,
    big_q_max: Option<u32>,
}

#[derive(Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct TaskSpec {
    /// Operation name; one of the subcommand ops.
    op: String,
    name: Option<String>,
    /// Expected verdict string; mismatch is a contract failure.
    expect: Option<String>,
    /// Report destination, relative to the spec file's directory.
    output: Option<PathBuf>,

    // op arguments (validated per op)
    family: Option<String>,
    f: Option<String>,
    z: Option<String>,
    k: Option<String>,
    term: Option<String>,
    test: Option<String>,
    n0: Option<f64>,
    center: Option<String>,
    radius: Option<String>,
    n_max: Option<usize>,
    omega: Option<String>,
    steps: Option<usize>,
    q_h: Option<f64>,
    csv: Option<PathBuf>,
}

struct TaskResult {
    name: String,
    verdict: String,
    contract_ok: bool,
    detail: Option<String>,
}

pub fn run_spec(path: &Path, grid: &GridArgs) -> ExitCode {
    match run_spec_inner(path, grid) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run_spec_inner(path: &Path, grid: &GridArgs) -> Result<bool> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow!("reading {}: {e}", path.display()))?;
    // toml parse errors carry line/column spans in their Display output
    let spec: SpecFile = toml::from_str(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    if let Some(schema) = &spec.schema {
        if schema != "gennum-spec/1" {
            bail!("{}: unsupported spec schema '{schema}'", path.display());
        }
    }
    if spec.tasks.is_empty() {
        bail!("{}: spec declares no tasks", path.display());
    }

    let mut grid = grid.clone();
    if let Some(gs) = spec.gauge {
        grid.k_min = grid.k_min.or(gs.k_min);
        grid.k_max = grid.k_max.or(gs.k_max);
        grid.q_max = grid.q_max.or(gs.q_max);
        grid.big_q_max = grid.big_q_max.or(gs.big_q_max);
    }
    let g = grid.gauge();
    let base = path.parent().unwrap_or(Path::new("."));

    // validate before executing anything
    for (i, t) in spec.tasks.iter().enumerate() {
        validate_task(t).map_err(|e| anyhow!("task {} ({}): {e}", i + 1, task_name(t, i)))?;
    }

    // worker pool: tasks are independent, outputs are distinct files
    let results: Vec<Result<TaskResult>> = std::thread::scope(|scope| {
        let handles: Vec<_> = spec
            .tasks
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let g = &g;
                scope.spawn(move || exec_task(g, base, t, i))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("task panicked")).collect()
    });

    let mut all_ok = true;
    for r in results {
        match r {
            Ok(tr) => {
                let mark = if tr.contract_ok { "ok" } else { "FAIL" };
                println!(
                    "{mark:4} {} -> {}{}",
                    tr.name,
                    tr.verdict,
                    tr.detail.as_deref().map(|d| format!(" ({d})")).unwrap_or_default()
                );
                all_ok &= tr.contract_ok;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(all_ok)
}

fn task_name(t: &TaskSpec, i: usize) -> String {
    t.name.clone().unwrap_or_else(|| format!("{}#{}", t.op, i + 1))
}

fn validate_task(t: &TaskSpec) -> Result<()> {
    let need = |field: Option<&String>, what: &str| -> Result<()> {
        if field.is_none() {
            bail!("missing required field '{what}'");
        }
        Ok(())
    };
    match t.op.as_str() {
        "sum" | "radius" | "classify" | "setconv" => need(t.family.as_ref(), "family"),
        "hyperlim" => need(t.term.as_ref(), "term"),
        "goursat" | "hft" | "pw" => need(t.f.as_ref(), "f"),
        other => bail!("unknown op '{other}'"),
    }
}

fn exec_task(g: &gennum::gauge::Gauge, base: &Path, t: &TaskSpec, i: usize) -> Result<TaskResult> {
    let name = task_name(t, i);
    let z = t.z.clone().or_else(|| t.k.clone()).unwrap_or_else(|| "0.5".into());
    let report: Value = match t.op.as_str() {
        "sum" => ops::op_sum(g, t.family.as_ref().unwrap(), &z),
        "hyperlim" => ops::op_hyperlim(g, t.term.as_ref().unwrap()),
        "radius" => ops::op_radius(g, t.family.as_ref().unwrap()),
        "classify" => ops::op_classify(
            g,
            t.family.as_ref().unwrap(),
            &z,
            t.test.as_deref().unwrap_or("ratio"),
            t.n0,
        ),
        "setconv" => ops::op_setconv(g, t.family.as_ref().unwrap(), &z),
        "goursat" => ops::op_goursat(
            g,
            t.f.as_ref().unwrap(),
            t.center.as_deref().unwrap_or("0"),
            t.radius.as_deref().unwrap_or("0.5"),
            t.n_max.unwrap_or(8),
        ),
        "hft" => ops::op_hft(
            g,
            t.f.as_ref().unwrap(),
            t.omega.as_deref().unwrap_or("0..10"),
            t.steps.unwrap_or(11),
            t.q_h.unwrap_or(1.0),
            t.csv.as_ref().map(|c| base.join(c)).as_deref(),
        ),
        "pw" => ops::op_pw(g, t.f.as_ref().unwrap(), t.q_h.unwrap_or(1.0)),
        other => bail!("unknown op '{other}'"),
    }
    .map_err(|e| anyhow!("task {name}: {e:#}"))?;

    let verdict = report
        .get("verdict")
        .and_then(Value::as_str)
        .unwrap_or("?")
        .to_string();
    let op_ok = report.get("ok").and_then(Value::as_bool).unwrap_or(true);
    let (contract_ok, detail) = match &t.expect {
        Some(want) if *want != verdict => {
            (false, Some(format!("expected '{want}', got '{verdict}'")))
        }
        _ => (op_ok, None),
    };

    // contract outcome travels with the stored report
    let mut stored = report;
    stored["ok"] = Value::Bool(contract_ok);
    if let Some(want) = &t.expect {
        stored["expect"] = Value::String(want.clone());
    }
    if let Some(out) = &t.output {
        let dest = base.join(out);
        ops::atomic_write(&dest, (serde_json::to_string_pretty(&stored)? + "\n").as_bytes())?;
    }

    Ok(TaskResult { name, verdict, contract_ok, detail })
}
