//! Finite sets of array indices in canonical interval form.
//!
//! Every set is stored as sorted, pairwise disjoint, non-adjacent, non-empty
//! half-open intervals `[lo, hi)`. Canonical form makes structural equality
//! coincide with set equality and keeps the algebra linear in the number of
//! intervals rather than the number of elements.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite set of `u64` indices, stored as canonical half-open intervals.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IndexSet {
    intervals: Vec<(u64, u64)>,
}

impl IndexSet {
    /// The empty set.
    pub fn empty() -> Self {
        Self::default()
    }

    /// The contiguous set `[lo, hi)`; empty when `lo >= hi`.
    pub fn range(lo: u64, hi: u64) -> Self {
        if lo < hi {
            Self {
                intervals: vec![(lo, hi)],
            }
        } else {
            Self::empty()
        }
    }

    /// Builds a set from arbitrary elements; duplicates collapse.
    ///
    /// Rejects negative values, since indices address array slots.
    pub fn from_elements<I>(elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = i64>,
    {
        let mut pairs = Vec::new();
        for e in elements {
            if e < 0 {
                return Err(Error::NegativeIndex(e));
            }
            let e = e as u64;
            pairs.push((e, e + 1));
        }
        Ok(Self::canonicalize(pairs))
    }

    /// Builds a set from arbitrary intervals, merging overlap and adjacency.
    ///
    /// Empty intervals (`lo == hi`) are dropped; reversed bounds are an error.
    pub fn from_intervals<I>(intervals: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        let mut pairs = Vec::new();
        for (lo, hi) in intervals {
            if lo > hi {
                return Err(Error::ReversedInterval { lo, hi });
            }
            if lo < hi {
                pairs.push((lo, hi));
            }
        }
        Ok(Self::canonicalize(pairs))
    }

    /// Wraps an interval list that is already canonical.
    pub(crate) fn from_canonical(intervals: Vec<(u64, u64)>) -> Self {
        let set = Self { intervals };
        debug_assert!(set.is_canonical());
        set
    }

    fn canonicalize(mut pairs: Vec<(u64, u64)>) -> Self {
        pairs.sort_unstable();
        let mut intervals: Vec<(u64, u64)> = Vec::with_capacity(pairs.len());
        for (lo, hi) in pairs {
            match intervals.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => intervals.push((lo, hi)),
            }
        }
        Self { intervals }
    }

    fn is_canonical(&self) -> bool {
        self.intervals.iter().all(|&(lo, hi)| lo < hi)
            && self.intervals.windows(2).all(|w| w[0].1 < w[1].0)
    }

    /// The canonical intervals, sorted ascending.
    pub fn intervals(&self) -> &[(u64, u64)] {
        &self.intervals
    }

    /// Number of elements.
    pub fn len(&self) -> u64 {
        self.intervals.iter().map(|&(lo, hi)| hi - lo).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn min(&self) -> Option<u64> {
        self.intervals.first().map(|&(lo, _)| lo)
    }

    pub fn max(&self) -> Option<u64> {
        self.intervals.last().map(|&(_, hi)| hi - 1)
    }

    pub fn contains(&self, index: u64) -> bool {
        let k = self.intervals.partition_point(|&(lo, _)| lo <= index);
        k > 0 && self.intervals[k - 1].1 > index
    }

    /// Elements in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.intervals.iter().flat_map(|&(lo, hi)| lo..hi)
    }

    /// Elements in ascending order, materialized.
    pub fn elements(&self) -> Vec<u64> {
        self.iter().collect()
    }

    pub fn union(&self, other: &Self) -> Self {
        let (a, b) = (&self.intervals, &other.intervals);
        let mut out: Vec<(u64, u64)> = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let next = if j == b.len() || (i < a.len() && a[i].0 <= b[j].0) {
                i += 1;
                a[i - 1]
            } else {
                j += 1;
                b[j - 1]
            };
            match out.last_mut() {
                Some(last) if next.0 <= last.1 => last.1 = last.1.max(next.1),
                _ => out.push(next),
            }
        }
        Self::from_canonical(out)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let (a, b) = (&self.intervals, &other.intervals);
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let lo = a[i].0.max(b[j].0);
            let hi = a[i].1.min(b[j].1);
            if lo < hi {
                out.push((lo, hi));
            }
            if a[i].1 <= b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_canonical(out)
    }

    /// Elements of `self` not in `other`.
    pub fn difference(&self, other: &Self) -> Self {
        let b = &other.intervals;
        let mut out = Vec::new();
        let mut j = 0;
        for &(alo, ahi) in &self.intervals {
            let mut lo = alo;
            while j < b.len() && b[j].1 <= alo {
                j += 1;
            }
            let mut k = j;
            while k < b.len() && b[k].0 < ahi {
                let (blo, bhi) = b[k];
                if blo > lo {
                    out.push((lo, blo));
                }
                lo = lo.max(bhi);
                k += 1;
            }
            if lo < ahi {
                out.push((lo, ahi));
            }
        }
        Self::from_canonical(out)
    }

    pub fn is_superset(&self, other: &Self) -> bool {
        let a = &self.intervals;
        let mut i = 0;
        for &(blo, bhi) in &other.intervals {
            while i < a.len() && a[i].1 < bhi {
                i += 1;
            }
            if i == a.len() || a[i].0 > blo || a[i].1 < bhi {
                return false;
            }
        }
        true
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i].0.max(b[j].0) < a[i].1.min(b[j].1) {
                return false;
            }
            if a[i].1 <= b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        true
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (lo, hi)) in self.intervals.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "[{lo},{hi})")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IndexSet{self}")
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.intervals.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(u64, u64)>::deserialize(deserializer)?;
        IndexSet::from_intervals(pairs).map_err(serde::de::Error::custom)
    }
}
