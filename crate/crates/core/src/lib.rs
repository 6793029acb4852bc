//! Index-set algebra and derived communication structure for data-parallel
//! kernels over distributed arrays.
//!
//! A kernel is described by three ingredients: a distribution of its input
//! array (who owns which indices), a distribution of its output array (who
//! computes which results), and a signature function (which input indices
//! each output index reads). Everything operational is derived from them:
//!
//! * the needed-set distribution, i.e. per processor the inputs it must see
//!   before computing (its owned part plus the halo),
//! * whether the kernel can run with no communication at all,
//! * per-processor-pair message plans under pluggable deduplication,
//! * layered task graphs for kernel pipelines, and
//! * simulated executions whose results are checked bit for bit against a
//!   sequential reference.

pub mod distribution;
pub mod error;
pub mod indexset;
pub(crate) mod intkeys;
pub mod kernel;
pub mod program;
pub mod signature;
pub mod simulator;
pub mod taskgraph;

pub use distribution::{Distribution, DistributionSpec, ProcId};
pub use error::{Error, Result};
pub use indexset::IndexSet;
pub use kernel::{CombinerSpec, CommunicationStats, DedupPolicy, Kernel, Message, MessagePlan};
pub use program::{KernelDecl, ObjectDecl, Program};
pub use signature::{SignatureFunction, SignatureKind, SignatureSpec, SignatureSpecKind};
pub use simulator::{
    run_distributed, run_sequential, verify, DataObject, ExecutionTrace, Mismatch, TraceEvent,
    Value, VerifyReport,
};
pub use taskgraph::{build_task_graph, TaskEdge, TaskGraph, TaskId};
