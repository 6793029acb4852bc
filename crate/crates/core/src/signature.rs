//! Signature functions: which input indices each output index reads.
//!
//! A signature maps output index `i` to a set of indices of the input array.
//! All results are clipped to the input bound `[0, n_in)`, so stencils simply
//! truncate at array edges instead of failing. The map extends to sets by
//! union and to distributions pointwise, which is how needed-set (halo)
//! distributions are derived.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::indexset::IndexSet;

/// The dependency shape of a kernel.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SignatureKind {
    /// `i` reads `i + d` for each offset `d`.
    Stencil { offsets: Vec<i64> },
    /// `i` reads `stride * i + b` for each offset `b`; coarsening maps.
    Affine { stride: u64, offsets: Vec<u64> },
    /// Explicit per-row sets; every output index needs a row.
    Sparse { rows: BTreeMap<u64, IndexSet> },
    /// Every output index reads the whole input; reductions.
    Total,
}

/// A [`SignatureKind`] together with the input bound it is clipped to.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SignatureFunction {
    kind: SignatureKind,
    n_in: u64,
}

impl SignatureFunction {
    pub fn stencil<I>(offsets: I, n_in: u64) -> Result<Self>
    where
        I: IntoIterator<Item = i64>,
    {
        let mut offsets: Vec<i64> = offsets.into_iter().collect();
        offsets.sort_unstable();
        offsets.dedup();
        if offsets.is_empty() {
            return Err(Error::EmptyStencil);
        }
        Ok(Self {
            kind: SignatureKind::Stencil { offsets },
            n_in,
        })
    }

    pub fn affine<I>(stride: u64, offsets: I, n_in: u64) -> Result<Self>
    where
        I: IntoIterator<Item = u64>,
    {
        if stride == 0 {
            return Err(Error::ZeroStride);
        }
        let mut offsets: Vec<u64> = offsets.into_iter().collect();
        offsets.sort_unstable();
        offsets.dedup();
        if offsets.is_empty() {
            return Err(Error::EmptyAffineOffsets);
        }
        Ok(Self {
            kind: SignatureKind::Affine { stride, offsets },
            n_in,
        })
    }

    pub fn sparse(rows: BTreeMap<u64, IndexSet>, n_in: u64) -> Self {
        Self {
            kind: SignatureKind::Sparse { rows },
            n_in,
        }
    }

    pub fn total(n_in: u64) -> Self {
        Self {
            kind: SignatureKind::Total,
            n_in,
        }
    }

    /// Size of the input index space; every result lies in `[0, n_in)`.
    pub fn domain_bound(&self) -> u64 {
        self.n_in
    }

    pub fn kind(&self) -> &SignatureKind {
        &self.kind
    }

    /// Input indices read by output index `index`, clipped to the bound.
    pub fn apply_index(&self, index: u64) -> Result<IndexSet> {
        match &self.kind {
            SignatureKind::Stencil { offsets } => {
                let deps = offsets
                    .iter()
                    .filter_map(|&d| {
                        let j = index as i128 + d as i128;
                        (j >= 0 && j < self.n_in as i128).then_some(j as u64)
                    })
                    .map(|j| (j, j + 1));
                IndexSet::from_intervals(deps)
            }
            SignatureKind::Affine { stride, offsets } => {
                let deps = offsets
                    .iter()
                    .filter_map(|&b| {
                        let j = *stride as u128 * index as u128 + b as u128;
                        (j < self.n_in as u128).then_some(j as u64)
                    })
                    .map(|j| (j, j + 1));
                IndexSet::from_intervals(deps)
            }
            SignatureKind::Sparse { rows } => {
                let row = rows.get(&index).ok_or(Error::MissingSparseRow { index })?;
                Ok(row.intersect(&IndexSet::range(0, self.n_in)))
            }
            SignatureKind::Total => Ok(IndexSet::range(0, self.n_in)),
        }
    }

    /// Union of `apply_index` over the set; interval-level fast paths where
    /// the shape allows.
    pub fn apply_set(&self, set: &IndexSet) -> Result<IndexSet> {
        match &self.kind {
            SignatureKind::Stencil { offsets } => Ok(offsets
                .iter()
                .map(|&d| shift_clipped(set, d, self.n_in))
                .fold(IndexSet::empty(), |acc, s| acc.union(&s))),
            SignatureKind::Affine { .. } | SignatureKind::Sparse { .. } => {
                let mut out = IndexSet::empty();
                for i in set.iter() {
                    out = out.union(&self.apply_index(i)?);
                }
                Ok(out)
            }
            SignatureKind::Total => Ok(if set.is_empty() {
                IndexSet::empty()
            } else {
                IndexSet::range(0, self.n_in)
            }),
        }
    }

    /// Applies the signature to every processor's set of `dist`.
    pub fn apply_distribution(&self, dist: &Distribution) -> Result<Distribution> {
        let sets = dist
            .sets()
            .iter()
            .map(|s| self.apply_set(s))
            .collect::<Result<Vec<_>>>()?;
        Distribution::from_sets(sets)
    }
}

/// Translates every interval by `offset` and clips to `[0, bound)`.
fn shift_clipped(set: &IndexSet, offset: i64, bound: u64) -> IndexSet {
    let shifted = set
        .intervals()
        .iter()
        .filter_map(|&(lo, hi)| {
            let lo = (lo as i128 + offset as i128).clamp(0, bound as i128);
            let hi = (hi as i128 + offset as i128).clamp(0, bound as i128);
            (lo < hi).then_some((lo as u64, hi as u64))
        })
        .collect();
    // Uniform translation and end-clipping keep the list canonical.
    IndexSet::from_canonical(shifted)
}

/// Serializable recipe for a [`SignatureFunction`].
///
/// The input bound is optional here; program assembly fills it in from the
/// input object and rejects a declared bound that disagrees.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SignatureSpec {
    #[serde(flatten)]
    pub kind: SignatureSpecKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_in: Option<u64>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SignatureSpecKind {
    Stencil {
        offsets: Vec<i64>,
    },
    Affine {
        stride: u64,
        offsets: Vec<u64>,
    },
    Sparse {
        #[serde(with = "crate::intkeys")]
        rows: BTreeMap<u64, IndexSet>,
    },
    Total,
}

impl SignatureSpec {
    pub fn stencil(offsets: Vec<i64>) -> Self {
        Self {
            kind: SignatureSpecKind::Stencil { offsets },
            n_in: None,
        }
    }

    pub fn affine(stride: u64, offsets: Vec<u64>) -> Self {
        Self {
            kind: SignatureSpecKind::Affine { stride, offsets },
            n_in: None,
        }
    }

    pub fn sparse(rows: BTreeMap<u64, IndexSet>) -> Self {
        Self {
            kind: SignatureSpecKind::Sparse { rows },
            n_in: None,
        }
    }

    pub fn total() -> Self {
        Self {
            kind: SignatureSpecKind::Total,
            n_in: None,
        }
    }

    pub fn with_n_in(mut self, n_in: u64) -> Self {
        self.n_in = Some(n_in);
        self
    }

    /// Materializes the signature against input size `n_in`.
    pub fn build(&self, n_in: u64) -> Result<SignatureFunction> {
        if let Some(declared) = self.n_in {
            if declared != n_in {
                return Err(Error::DomainSizeMismatch {
                    declared,
                    expected: n_in,
                });
            }
        }
        match &self.kind {
            SignatureSpecKind::Stencil { offsets } => {
                SignatureFunction::stencil(offsets.iter().copied(), n_in)
            }
            SignatureSpecKind::Affine { stride, offsets } => {
                SignatureFunction::affine(*stride, offsets.iter().copied(), n_in)
            }
            SignatureSpecKind::Sparse { rows } => Ok(SignatureFunction::sparse(rows.clone(), n_in)),
            SignatureSpecKind::Total => Ok(SignatureFunction::total(n_in)),
        }
    }
}
