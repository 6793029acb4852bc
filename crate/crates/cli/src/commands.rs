//! Subcommand implementations, kept apart from terminal handling so tests
//! can drive them directly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::json;

use betaplan::{build_task_graph, verify, DedupPolicy, Program, Value};

use crate::file::CliError;

/// Needed-index (beta) distributions of every kernel, as a JSON array.
pub fn cmd_beta(program: &Program) -> Result<String, CliError> {
    let mut entries = Vec::new();
    for kernel in program.kernels() {
        let needed = kernel.needed_dist()?;
        entries.push(json!({
            "kernel": kernel.name(),
            "beta": needed.sets(),
        }));
    }
    Ok(pretty(&serde_json::Value::Array(entries)))
}

/// Message plans of every kernel as a JSON array on stdout, plus a
/// per-kernel traffic table for stderr.
pub fn cmd_messages(program: &Program, policy: DedupPolicy) -> Result<(String, String), CliError> {
    let mut plans = Vec::new();
    let name_width = program
        .kernels()
        .iter()
        .map(|k| k.name().len())
        .max()
        .unwrap_or(0)
        .max("kernel".len());
    let mut table = format!(
        "{:<name_width$}  {:>14}  {:>12}  {:>8}\n",
        "kernel", "cross_messages", "cross_volume", "max_halo"
    );
    for kernel in program.kernels() {
        let plan = kernel.message_plan(policy)?;
        let stats = plan.stats(kernel.input_dist());
        let _ = writeln!(
            table,
            "{:<name_width$}  {:>14}  {:>12}  {:>8}",
            kernel.name(),
            stats.cross_messages,
            stats.cross_volume,
            stats.max_halo
        );
        plans.push(plan);
    }
    let mut out = serde_json::to_string_pretty(&plans).expect("plans serialize");
    out.push('\n');
    Ok((out, table))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DagFormat {
    Dot,
    Json,
}

/// The task graph, rendered as Graphviz or JSON.
pub fn cmd_dag(program: &Program, format: DagFormat) -> Result<String, CliError> {
    let graph = build_task_graph(program)?;
    Ok(match format {
        DagFormat::Dot => graph.to_dot(),
        DagFormat::Json => pretty(&graph.to_json()),
    })
}

/// One line per kernel; `all_local` is true when no kernel needs traffic.
pub fn cmd_check_local(program: &Program) -> Result<(String, bool), CliError> {
    let mut out = String::new();
    let mut all_local = true;
    for kernel in program.kernels() {
        if kernel.is_local()? {
            let _ = writeln!(out, "{}: local", kernel.name());
        } else {
            all_local = false;
            let stats = kernel
                .message_plan(DedupPolicy::LowestOwner)?
                .stats(kernel.input_dist());
            let _ = writeln!(
                out,
                "{}: non-local (max halo {}, {} values over the wire)",
                kernel.name(),
                stats.max_halo,
                stats.cross_volume
            );
        }
    }
    Ok((out, all_local))
}

/// Simulates the program and compares against the sequential reference.
///
/// Returns the report text and whether the outputs matched. With `trace`,
/// writes the distributed run's event log as JSON lines.
pub fn cmd_simulate(
    program: &Program,
    input: &[Value],
    policy: DedupPolicy,
    trace: Option<&Path>,
) -> Result<(String, bool), CliError> {
    let report = verify(program, input, policy)?;
    if let Some(path) = trace {
        fs::write(path, report.trace.to_json_lines()).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    }
    let mut out = String::new();
    let rendered: Vec<String> = report
        .output
        .iter()
        .map(|v| match v {
            Some(v) => v.to_string(),
            None => "_".to_string(),
        })
        .collect();
    let _ = writeln!(out, "{}", rendered.join(" "));
    match &report.first_mismatch {
        None => {
            let cross = report.trace.cross_messages().count();
            let _ = writeln!(
                out,
                "distributed run matches the sequential reference ({cross} cross messages)"
            );
        }
        Some(m) => {
            let show = |v: Option<Value>| match v {
                Some(v) => v.to_string(),
                None => "undefined".to_string(),
            };
            let _ = writeln!(
                out,
                "mismatch at index {}: sequential {} vs distributed {}",
                m.index,
                show(m.sequential),
                show(m.distributed)
            );
        }
    }
    Ok((out, report.outputs_match))
}

fn pretty(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("values render");
    text.push('\n');
    text
}
