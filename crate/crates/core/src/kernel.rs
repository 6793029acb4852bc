//! Kernels and the communication structure derived from them.
//!
//! A kernel pairs an input distribution (who owns the data), an output
//! distribution (who computes which results), and a signature function (what
//! each result reads). Everything else is derived: the needed-set
//! distribution, whether the kernel can run without communication, which
//! processors must talk to which, and a concrete message plan.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distribution::{Distribution, ProcId};
use crate::error::{Error, Result};
use crate::indexset::IndexSet;
use crate::signature::{SignatureFunction, SignatureKind};

/// How a kernel folds the values of a dependency set into one output value.
///
/// Values are combined in ascending input-index order.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CombinerSpec {
    /// Plain sum; an empty dependency set yields 0.
    Sum,
    /// Weighted sum over a stencil; weights are keyed by stencil offset.
    Weighted {
        #[serde(with = "crate::intkeys")]
        weights: BTreeMap<i64, i64>,
    },
    /// Maximum; rejected at run time on an empty dependency set.
    Max,
}

/// Deduplication policy when several processors own a needed index.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DedupPolicy {
    /// Every owner sends; receivers see redundant copies.
    AllOwners,
    /// Exactly one sender per index: the receiver itself when possible,
    /// otherwise the lowest-ranked owner.
    LowestOwner,
}

impl fmt::Display for DedupPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::AllOwners => "all-owners",
            Self::LowestOwner => "lowest-owner",
        })
    }
}

impl FromStr for DedupPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "all-owners" => Ok(Self::AllOwners),
            "lowest-owner" => Ok(Self::LowestOwner),
            other => Err(format!(
                "unknown policy `{other}` (expected `all-owners` or `lowest-owner`)"
            )),
        }
    }
}

/// A single data-parallel step over distributed arrays.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Kernel {
    name: String,
    input_dist: Distribution,
    output_dist: Distribution,
    signature: SignatureFunction,
    combiner: CombinerSpec,
}

impl Kernel {
    /// Validates the pieces against each other.
    ///
    /// Both distributions must use the same processor count, both must stay
    /// inside their index spaces, and a weighted combiner must cover every
    /// stencil offset.
    pub fn new(
        name: impl Into<String>,
        input_dist: Distribution,
        output_dist: Distribution,
        signature: SignatureFunction,
        combiner: CombinerSpec,
    ) -> Result<Self> {
        let name = name.into();
        if input_dist.nprocs() != output_dist.nprocs() {
            return Err(Error::ProcCountMismatch {
                kernel: name,
                input: input_dist.nprocs(),
                output: output_dist.nprocs(),
            });
        }
        if let Some(max) = input_dist.global_span().max() {
            if max >= signature.domain_bound() {
                return Err(Error::DistOutOfBounds {
                    kernel: name,
                    dist: "input",
                    index: max,
                    bound: signature.domain_bound(),
                });
            }
        }
        if let CombinerSpec::Weighted { weights } = &combiner {
            let SignatureKind::Stencil { offsets } = signature.kind() else {
                return Err(Error::WeightedNeedsStencil { kernel: name });
            };
            for &d in offsets {
                if !weights.contains_key(&d) {
                    return Err(Error::MissingWeight {
                        kernel: name,
                        offset: d,
                    });
                }
            }
        }
        Ok(Self {
            name,
            input_dist,
            output_dist,
            signature,
            combiner,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn input_dist(&self) -> &Distribution {
        &self.input_dist
    }

    pub fn output_dist(&self) -> &Distribution {
        &self.output_dist
    }

    pub fn signature(&self) -> &SignatureFunction {
        &self.signature
    }

    pub fn combiner(&self) -> &CombinerSpec {
        &self.combiner
    }

    pub fn nprocs(&self) -> usize {
        self.input_dist.nprocs()
    }

    /// The needed-set distribution (the beta distribution): for each
    /// processor, every input index read while computing its outputs. The
    /// part not already owned is the halo.
    pub fn needed_dist(&self) -> Result<Distribution> {
        self.signature.apply_distribution(&self.output_dist)
    }

    /// True when every processor already owns everything it needs.
    pub fn is_local(&self) -> Result<bool> {
        let needed = self.needed_dist()?;
        Ok(self
            .input_dist
            .procs()
            .all(|p| self.input_dist.get(p).is_superset(needed.get(p))))
    }

    /// Processors whose owned inputs intersect what `p` needs, ascending.
    /// `p` itself appears whenever it owns part of its own needs.
    pub fn predecessors(&self, p: ProcId) -> Result<Vec<ProcId>> {
        let needed = self.needed_dist()?;
        Ok(self
            .input_dist
            .procs()
            .filter(|&q| !self.input_dist.get(q).is_disjoint(needed.get(p)))
            .collect())
    }

    /// Derives who sends which indices to whom.
    ///
    /// Fails when some processor needs an index that no processor owns; the
    /// error names the first such (processor, index) pair.
    pub fn message_plan(&self, policy: DedupPolicy) -> Result<MessagePlan> {
        let needed = self.needed_dist()?;
        let owned_span = self.input_dist.global_span();
        for p in self.output_dist.procs() {
            let missing = needed.get(p).difference(&owned_span);
            if let Some(index) = missing.min() {
                return Err(Error::Uncoverable {
                    kernel: self.name.clone(),
                    proc: p.0,
                    index,
                });
            }
        }

        let mut messages = Vec::new();
        for p in self.output_dist.procs() {
            match policy {
                DedupPolicy::AllOwners => {
                    for q in self.input_dist.procs() {
                        let indices = self.input_dist.get(q).intersect(needed.get(p));
                        if !indices.is_empty() {
                            messages.push(Message::new(q, p, indices));
                        }
                    }
                }
                DedupPolicy::LowestOwner => {
                    let self_part = self.input_dist.get(p).intersect(needed.get(p));
                    let mut remaining = needed.get(p).difference(&self_part);
                    if !self_part.is_empty() {
                        messages.push(Message::new(p, p, self_part));
                    }
                    for q in self.input_dist.procs() {
                        if remaining.is_empty() {
                            break;
                        }
                        let indices = self.input_dist.get(q).intersect(&remaining);
                        if !indices.is_empty() {
                            remaining = remaining.difference(&indices);
                            messages.push(Message::new(q, p, indices));
                        }
                    }
                }
            }
        }
        messages.sort_by_key(|m| (m.to, m.from));
        Ok(MessagePlan {
            kernel: self.name.clone(),
            policy,
            messages,
            needed,
        })
    }
}

/// One entry of a message plan: `from` sends the values at `indices` to `to`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Message {
    pub from: ProcId,
    pub to: ProcId,
    pub indices: IndexSet,
    /// True for `from == to`: a local copy, not a wire transfer.
    pub local: bool,
}

impl Message {
    fn new(from: ProcId, to: ProcId, indices: IndexSet) -> Self {
        Self {
            from,
            to,
            indices,
            local: from == to,
        }
    }
}

/// All messages required before a kernel can run, sorted by (receiver, sender).
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct MessagePlan {
    kernel: String,
    policy: DedupPolicy,
    messages: Vec<Message>,
    #[serde(skip)]
    needed: Distribution,
}

impl MessagePlan {
    pub fn kernel(&self) -> &str {
        &self.kernel
    }

    pub fn policy(&self) -> DedupPolicy {
        self.policy
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    /// The needed-set distribution the plan was derived from.
    pub fn needed_dist(&self) -> &Distribution {
        &self.needed
    }

    /// Messages delivered to processor `p`.
    pub fn incoming(&self, p: ProcId) -> impl Iterator<Item = &Message> {
        self.messages.iter().filter(move |m| m.to == p)
    }

    /// Wire traffic summary; local copies do not count.
    pub fn stats(&self, input_dist: &Distribution) -> CommunicationStats {
        let cross: Vec<&Message> = self.messages.iter().filter(|m| !m.local).collect();
        let max_halo = self
            .needed
            .procs()
            .map(|p| self.needed.get(p).difference(input_dist.get(p)).len())
            .max()
            .unwrap_or(0);
        CommunicationStats {
            cross_messages: cross.len(),
            cross_volume: cross.iter().map(|m| m.indices.len()).sum(),
            max_halo,
        }
    }
}

/// Wire-traffic cost summary of a message plan.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct CommunicationStats {
    /// Messages between distinct processors.
    pub cross_messages: usize,
    /// Total indices carried by those messages.
    pub cross_volume: u64,
    /// Largest per-processor halo, `max_p |needed(p) \ owned(p)|`.
    pub max_halo: u64,
}
