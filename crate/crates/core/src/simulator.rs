//! Simulated execution of kernel pipelines.
//!
//! Two executors over exact integer values: a sequential reference that
//! ignores distributions, and a distributed run that moves values strictly
//! along a derived message plan. Agreement between the two is the evidence
//! that a plan carries everything the computation touches. The distributed
//! run also records a deterministic trace of message and compute events.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::distribution::ProcId;
use crate::error::{Error, Result};
use crate::indexset::IndexSet;
use crate::kernel::{CombinerSpec, DedupPolicy, Kernel};
use crate::program::Program;
use crate::signature::SignatureKind;

/// Exact value carried by one array slot.
pub type Value = i64;

/// One event of a distributed run.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "ev", rename_all = "lowercase")]
pub enum TraceEvent {
    /// `from` delivered the values at `indices` to `to` before `kernel` ran.
    Msg {
        kernel: String,
        from: usize,
        to: usize,
        indices: IndexSet,
        count: u64,
    },
    /// `proc` computed its outputs of `kernel`.
    Compute {
        kernel: String,
        proc: usize,
        indices: IndexSet,
        count: u64,
    },
}

/// Deterministic event log of a distributed run.
///
/// Events are grouped by kernel; within a kernel all message events (ordered
/// by receiver, then sender) precede all compute events (ordered by rank).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ExecutionTrace {
    events: Vec<TraceEvent>,
}

impl ExecutionTrace {
    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    /// Cross-processor message events, skipping local copies.
    pub fn cross_messages(&self) -> impl Iterator<Item = &TraceEvent> {
        self.events.iter().filter(|e| match e {
            TraceEvent::Msg { from, to, .. } => from != to,
            TraceEvent::Compute { .. } => false,
        })
    }

    /// One JSON object per line, in event order.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("trace events serialize"));
            out.push('\n');
        }
        out
    }
}

/// Computed values of a distributed object, one store per processor.
#[derive(Clone, Debug, Default)]
pub struct DataObject {
    per_proc: Vec<BTreeMap<u64, Value>>,
}

impl DataObject {
    fn new(nprocs: usize) -> Self {
        Self {
            per_proc: vec![BTreeMap::new(); nprocs],
        }
    }

    pub fn get(&self, p: ProcId, index: u64) -> Option<Value> {
        self.per_proc[p.0].get(&index).copied()
    }

    fn insert(&mut self, p: ProcId, index: u64, value: Value) {
        self.per_proc[p.0].insert(index, value);
    }
}

/// Folds the dependency values of output index `i` per the kernel's combiner.
///
/// `read` resolves an input index to its value; a gap is an undefined-value
/// error naming `object`. Values fold in ascending input-index order with
/// checked arithmetic.
fn evaluate_output(
    kernel: &Kernel,
    object: &str,
    i: u64,
    read: impl Fn(u64) -> Option<Value>,
) -> Result<Value> {
    let fetch = |j: u64| -> Result<Value> {
        read(j).ok_or(Error::UndefinedValue {
            object: object.to_string(),
            index: j,
        })
    };
    let overflow = Error::ValueOverflow { index: i };
    match kernel.combiner() {
        CombinerSpec::Sum => {
            let mut acc: Value = 0;
            for j in kernel.signature().apply_index(i)?.iter() {
                acc = acc.checked_add(fetch(j)?).ok_or(overflow.clone())?;
            }
            Ok(acc)
        }
        CombinerSpec::Max => {
            let deps = kernel.signature().apply_index(i)?;
            if deps.is_empty() {
                return Err(Error::EmptyDependencies { index: i });
            }
            let mut best = Value::MIN;
            for j in deps.iter() {
                best = best.max(fetch(j)?);
            }
            Ok(best)
        }
        CombinerSpec::Weighted { weights } => {
            let SignatureKind::Stencil { offsets } = kernel.signature().kind() else {
                unreachable!("weighted combiners are validated to use stencils");
            };
            let bound = kernel.signature().domain_bound() as i128;
            let mut acc: Value = 0;
            for &d in offsets {
                let j = i as i128 + d as i128;
                if j < 0 || j >= bound {
                    continue;
                }
                let term = weights[&d]
                    .checked_mul(fetch(j as u64)?)
                    .ok_or(overflow.clone())?;
                acc = acc.checked_add(term).ok_or(overflow.clone())?;
            }
            Ok(acc)
        }
    }
}

fn check_input_len(program: &Program, input: &[Value]) -> Result<()> {
    let object = program.input_object();
    if input.len() as u64 != object.size {
        return Err(Error::InputLength {
            object: object.name.clone(),
            expected: object.size,
            actual: input.len(),
        });
    }
    Ok(())
}

/// Runs the pipeline on one flat array, ignoring distributions.
///
/// The result has the final object's size; slots no kernel computed are
/// `None` (the final distribution need not cover its array).
pub fn run_sequential(program: &Program, input: &[Value]) -> Result<Vec<Option<Value>>> {
    check_input_len(program, input)?;
    let mut store: BTreeMap<u64, Value> = input
        .iter()
        .enumerate()
        .map(|(i, &v)| (i as u64, v))
        .collect();
    let mut out_size = program.input_object().size;
    for (k, kernel) in program.kernels().iter().enumerate() {
        let in_name = &program.kernel_input(k).name;
        let mut next = BTreeMap::new();
        for i in kernel.output_dist().global_span().iter() {
            let value = evaluate_output(kernel, in_name, i, |j| store.get(&j).copied())?;
            next.insert(i, value);
        }
        store = next;
        out_size = program.kernel_output(k).size;
    }
    Ok((0..out_size).map(|i| store.get(&i).copied()).collect())
}

/// Runs the pipeline processor by processor, moving data only along the
/// message plans derived under `policy`.
///
/// Scatters the input per its distribution, then for each kernel delivers
/// the planned messages into per-processor receive buffers, computes every
/// processor's outputs from its buffer alone, and checks that redundantly
/// computed copies agree. The final object is gathered from the
/// lowest-ranked owner of each index.
pub fn run_distributed(
    program: &Program,
    input: &[Value],
    policy: DedupPolicy,
) -> Result<(Vec<Option<Value>>, ExecutionTrace)> {
    check_input_len(program, input)?;
    let input_object = program.input_object();
    let mut current = DataObject::new(input_object.distribution.nprocs());
    for p in input_object.distribution.procs() {
        for i in input_object.distribution.get(p).iter() {
            current.insert(p, i, input[i as usize]);
        }
    }

    let mut trace = ExecutionTrace::default();
    for (k, kernel) in program.kernels().iter().enumerate() {
        let plan = kernel.message_plan(policy)?;
        let in_name = &program.kernel_input(k).name;
        let out_name = &program.kernel_output(k).name;

        // Deliver. Plan order is already (receiver, sender).
        let mut buffers: Vec<BTreeMap<u64, Value>> = vec![BTreeMap::new(); kernel.nprocs()];
        for m in plan.messages() {
            for i in m.indices.iter() {
                let value = current
                    .get(m.from, i)
                    .expect("plan senders own what they send");
                if let Some(prev) = buffers[m.to.0].insert(i, value) {
                    // Redundant deliveries must carry the same value.
                    assert_eq!(
                        prev, value,
                        "conflicting copies of `{in_name}`[{i}] delivered to {}",
                        m.to
                    );
                }
            }
            trace.events.push(TraceEvent::Msg {
                kernel: kernel.name().to_string(),
                from: m.from.0,
                to: m.to.0,
                indices: m.indices.clone(),
                count: m.indices.len(),
            });
        }

        // Every buffer must hold the full needed set before computing.
        for p in kernel.output_dist().procs() {
            for i in plan.needed_dist().get(p).iter() {
                assert!(
                    buffers[p.0].contains_key(&i),
                    "receive buffer of {p} is missing `{in_name}`[{i}]"
                );
            }
        }

        // Compute from the receive buffers alone.
        let mut next = DataObject::new(kernel.nprocs());
        for p in kernel.output_dist().procs() {
            let mine = kernel.output_dist().get(p);
            for i in mine.iter() {
                let value = evaluate_output(kernel, in_name, i, |j| buffers[p.0].get(&j).copied())?;
                next.insert(p, i, value);
            }
            trace.events.push(TraceEvent::Compute {
                kernel: kernel.name().to_string(),
                proc: p.0,
                indices: mine.clone(),
                count: mine.len(),
            });
        }

        // Overlapping output distributions compute some indices repeatedly;
        // all copies must agree.
        for i in kernel.output_dist().global_span().iter() {
            let owners = kernel.output_dist().owners(i);
            let first = next.get(owners[0], i).expect("owners computed their span");
            for &p in &owners[1..] {
                let other = next.get(p, i).expect("owners computed their span");
                if other != first {
                    return Err(Error::CopyMismatch {
                        object: out_name.clone(),
                        index: i,
                        left: first,
                        right: other,
                    });
                }
            }
        }
        current = next;
    }

    // Gather from the lowest-ranked owner of each index.
    let output_object = program.output_object();
    let gathered = (0..output_object.size)
        .map(|i| {
            let owners = output_object.distribution.owners(i);
            owners.first().and_then(|&p| current.get(p, i))
        })
        .collect();
    Ok((gathered, trace))
}

/// Index and differing values of the first sequential/distributed mismatch.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Mismatch {
    pub index: u64,
    pub sequential: Option<Value>,
    pub distributed: Option<Value>,
}

/// Outcome of checking a distributed run against the sequential reference.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub outputs_match: bool,
    pub first_mismatch: Option<Mismatch>,
    pub output: Vec<Option<Value>>,
    pub trace: ExecutionTrace,
}

/// Runs both executors and compares outputs index by index.
pub fn verify(program: &Program, input: &[Value], policy: DedupPolicy) -> Result<VerifyReport> {
    let sequential = run_sequential(program, input)?;
    let (distributed, trace) = run_distributed(program, input, policy)?;
    let first_mismatch = sequential
        .iter()
        .zip(&distributed)
        .enumerate()
        .find(|(_, (s, d))| s != d)
        .map(|(i, (&s, &d))| Mismatch {
            index: i as u64,
            sequential: s,
            distributed: d,
        });
    Ok(VerifyReport {
        outputs_match: first_mismatch.is_none(),
        first_mismatch,
        output: distributed,
        trace,
    })
}
