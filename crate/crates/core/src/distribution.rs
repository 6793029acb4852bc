//! Ownership maps from processors to index sets.
//!
//! A distribution assigns every processor the set of array indices it holds.
//! Sets of different processors may overlap (replicated data) and need not
//! cover the whole array.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indexset::IndexSet;

/// A processor rank; valid ranks are `0..nprocs` of the distribution at hand.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProcId(pub usize);

impl fmt::Display for ProcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

impl From<usize> for ProcId {
    fn from(rank: usize) -> Self {
        ProcId(rank)
    }
}

/// Maps each of `nprocs` processors to the indices it owns.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Distribution {
    per_proc: Vec<IndexSet>,
}

impl Distribution {
    /// Contiguous blocks: processor `p` owns `[floor(p*n/nprocs), floor((p+1)*n/nprocs))`.
    ///
    /// Blocks partition `[0, n)` and their sizes differ by at most one.
    pub fn block(n: u64, nprocs: usize) -> Result<Self> {
        Self::check_nprocs(nprocs)?;
        let bound = |p: usize| (p as u128 * n as u128 / nprocs as u128) as u64;
        let per_proc = (0..nprocs)
            .map(|p| IndexSet::range(bound(p), bound(p + 1)))
            .collect();
        Ok(Self { per_proc })
    }

    /// Round-robin: processor `p` owns `{i < n : i mod nprocs == p}`.
    pub fn cyclic(n: u64, nprocs: usize) -> Result<Self> {
        Self::check_nprocs(nprocs)?;
        let per_proc = (0..nprocs)
            .map(|p| {
                let mut pairs = Vec::new();
                let mut i = p as u64;
                while i < n {
                    pairs.push((i, i + 1));
                    match i.checked_add(nprocs as u64) {
                        Some(next) => i = next,
                        None => break,
                    }
                }
                IndexSet::from_intervals(pairs).expect("strides are well-formed")
            })
            .collect();
        Ok(Self { per_proc })
    }

    /// Every processor owns the full array `[0, n)`.
    pub fn replicated(n: u64, nprocs: usize) -> Result<Self> {
        Self::check_nprocs(nprocs)?;
        Ok(Self {
            per_proc: vec![IndexSet::range(0, n); nprocs],
        })
    }

    /// Arbitrary per-processor sets, taken verbatim; `nprocs` is the length.
    pub fn from_sets(sets: Vec<IndexSet>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::NoProcessors);
        }
        Ok(Self { per_proc: sets })
    }

    fn check_nprocs(nprocs: usize) -> Result<()> {
        if nprocs == 0 {
            Err(Error::NoProcessors)
        } else {
            Ok(())
        }
    }

    pub fn nprocs(&self) -> usize {
        self.per_proc.len()
    }

    /// All processor ranks, ascending.
    pub fn procs(&self) -> impl Iterator<Item = ProcId> {
        (0..self.nprocs()).map(ProcId)
    }

    /// The index set of processor `p`. Panics when `p` is out of range.
    pub fn get(&self, p: ProcId) -> &IndexSet {
        &self.per_proc[p.0]
    }

    pub fn sets(&self) -> &[IndexSet] {
        &self.per_proc
    }

    /// Processors owning `index`, ascending; may be empty or have several entries.
    pub fn owners(&self, index: u64) -> Vec<ProcId> {
        self.procs()
            .filter(|&p| self.get(p).contains(index))
            .collect()
    }

    /// Union of all per-processor sets.
    pub fn global_span(&self) -> IndexSet {
        self.per_proc
            .iter()
            .fold(IndexSet::empty(), |acc, s| acc.union(s))
    }
}

/// Serializable recipe for a [`Distribution`].
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DistributionSpec {
    Block {
        #[serde(rename = "N")]
        n: u64,
        #[serde(rename = "P")]
        nprocs: usize,
    },
    Cyclic {
        #[serde(rename = "N")]
        n: u64,
        #[serde(rename = "P")]
        nprocs: usize,
    },
    Replicated {
        #[serde(rename = "N")]
        n: u64,
        #[serde(rename = "P")]
        nprocs: usize,
    },
    Explicit {
        sets: Vec<IndexSet>,
    },
}

impl DistributionSpec {
    pub fn build(&self) -> Result<Distribution> {
        match self {
            Self::Block { n, nprocs } => Distribution::block(*n, *nprocs),
            Self::Cyclic { n, nprocs } => Distribution::cyclic(*n, *nprocs),
            Self::Replicated { n, nprocs } => Distribution::replicated(*n, *nprocs),
            Self::Explicit { sets } => Distribution::from_sets(sets.clone()),
        }
    }

    /// The array size the spec was written for, when it names one.
    pub fn declared_size(&self) -> Option<u64> {
        match self {
            Self::Block { n, .. } | Self::Cyclic { n, .. } | Self::Replicated { n, .. } => Some(*n),
            Self::Explicit { .. } => None,
        }
    }
}
