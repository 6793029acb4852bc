//! Layered task graphs for kernel pipelines.
//!
//! Layer 0 holds synthetic source tasks, one per processor holding part of
//! the first input. Layer `k + 1` holds kernel `k`'s per-processor tasks.
//! Edges connect adjacent layers only and carry the indices that flow along
//! them, taken from the all-owners message plan, so the edge set is exactly
//! the dependency relation: an edge from `q` means `q` holds data `p` needs.

use std::fmt::Write as _;

use serde_json::json;

use crate::error::Result;
use crate::indexset::IndexSet;
use crate::kernel::DedupPolicy;
use crate::program::Program;

/// A task: processor `proc` working at graph layer `layer`.
///
/// Rendered as `k<layer>_p<proc>`; layer 0 is the source layer.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TaskId {
    pub layer: usize,
    pub proc: usize,
}

impl TaskId {
    pub fn node_id(&self) -> String {
        format!("k{}_p{}", self.layer, self.proc)
    }
}

/// A data dependency between tasks in adjacent layers.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TaskEdge {
    pub from: TaskId,
    pub to: TaskId,
    pub indices: IndexSet,
}

/// An acyclic task graph, layered by construction.
#[derive(Clone, Debug)]
pub struct TaskGraph {
    layers: Vec<Vec<TaskId>>,
    /// Layer 0: the input object's name; layer k+1: kernel k's name.
    layer_labels: Vec<String>,
    edges: Vec<TaskEdge>,
}

/// Derives the task graph of a program.
///
/// Fails when some kernel's needs are not coverable; the error names the
/// kernel, processor, and index.
pub fn build_task_graph(program: &Program) -> Result<TaskGraph> {
    let mut layers = Vec::with_capacity(program.kernels().len() + 1);
    let mut layer_labels = Vec::with_capacity(program.kernels().len() + 1);

    let input = program.input_object();
    layers.push(
        input
            .distribution
            .procs()
            .filter(|&p| !input.distribution.get(p).is_empty())
            .map(|p| TaskId {
                layer: 0,
                proc: p.0,
            })
            .collect(),
    );
    layer_labels.push(input.name.clone());

    let mut edges = Vec::new();
    for (k, kernel) in program.kernels().iter().enumerate() {
        // Every processor appears, even with nothing to compute: rank k+1
        // tasks exist so later layers can address them uniformly.
        layers.push(
            (0..kernel.nprocs())
                .map(|proc| TaskId { layer: k + 1, proc })
                .collect(),
        );
        layer_labels.push(kernel.name().to_string());
        let plan = kernel.message_plan(DedupPolicy::AllOwners)?;
        edges.extend(plan.messages().iter().map(|m| TaskEdge {
            from: TaskId {
                layer: k,
                proc: m.from.0,
            },
            to: TaskId {
                layer: k + 1,
                proc: m.to.0,
            },
            indices: m.indices.clone(),
        }));
    }
    edges.sort_by_key(|e| (e.to, e.from));

    Ok(TaskGraph {
        layers,
        layer_labels,
        edges,
    })
}

impl TaskGraph {
    /// Tasks grouped by layer, in execution order; ascending rank within.
    pub fn layers(&self) -> &[Vec<TaskId>] {
        &self.layers
    }

    pub fn layer_label(&self, layer: usize) -> &str {
        &self.layer_labels[layer]
    }

    pub fn tasks(&self) -> impl Iterator<Item = TaskId> + '_ {
        self.layers.iter().flatten().copied()
    }

    pub fn edges(&self) -> &[TaskEdge] {
        &self.edges
    }

    pub fn edges_into(&self, task: TaskId) -> impl Iterator<Item = &TaskEdge> {
        self.edges.iter().filter(move |e| e.to == task)
    }

    /// Length in tasks of the longest dependency chain, unit cost per task.
    pub fn critical_path_length(&self) -> usize {
        let mut longest: std::collections::BTreeMap<TaskId, usize> = self
            .tasks()
            .map(|t| (t, if t.layer == 0 { 1 } else { 0 }))
            .collect();
        for layer in &self.layers[1..] {
            for &task in layer {
                let best = self
                    .edges_into(task)
                    .map(|e| longest[&e.from])
                    .max()
                    .unwrap_or(0);
                longest.insert(task, best + 1);
            }
        }
        longest.values().copied().max().unwrap_or(0)
    }

    /// Graphviz rendering; output is byte-stable for equal graphs.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph taskgraph {\n  rankdir=LR;\n  node [shape=box];\n");
        for (layer, tasks) in self.layers.iter().enumerate() {
            for task in tasks {
                let _ = writeln!(
                    out,
                    "  {} [label=\"{} @ p{}\"];",
                    task.node_id(),
                    self.layer_labels[layer],
                    task.proc
                );
            }
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "  {} -> {} [label=\"{}\"];",
                e.from.node_id(),
                e.to.node_id(),
                e.indices
            );
        }
        out.push_str("}\n");
        out
    }

    /// JSON rendering with the same information as the DOT form.
    pub fn to_json(&self) -> serde_json::Value {
        let tasks: Vec<_> = self
            .layers
            .iter()
            .enumerate()
            .flat_map(|(layer, tasks)| {
                tasks.iter().map(move |t| {
                    json!({
                        "id": t.node_id(),
                        "layer": t.layer,
                        "proc": t.proc,
                        "label": self.layer_labels[layer],
                    })
                })
            })
            .collect();
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|e| {
                json!({
                    "from": e.from.node_id(),
                    "to": e.to.node_id(),
                    "indices": e.indices,
                })
            })
            .collect();
        json!({ "tasks": tasks, "edges": edges })
    }
}
