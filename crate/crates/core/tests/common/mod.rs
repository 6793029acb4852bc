//! Random kernel/program generation and independent brute-force oracles.
//!
//! The oracles work on explicit element sets and scalar arithmetic only, so
//! they share no code path with the interval algebra they check.

// Each test target compiles this module and uses its own subset.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::Rng;

use betaplan::{
    CombinerSpec, Distribution, IndexSet, Kernel, KernelDecl, ObjectDecl, ProcId, Program,
    SignatureFunction, SignatureKind, SignatureSpec,
};

pub fn random_index_set(rng: &mut StdRng, bound: u64) -> IndexSet {
    if bound == 0 {
        return IndexSet::empty();
    }
    let count = rng.random_range(0..=3);
    let pairs = (0..count).map(|_| {
        let lo = rng.random_range(0..bound);
        let span = rng.random_range(0..=(bound - lo).min(8));
        (lo, lo + span)
    });
    IndexSet::from_intervals(pairs).unwrap()
}

/// Any of the four constructors. With `covering`, every index in `[0, n)`
/// has at least one owner (explicit sets get a block partition underneath).
pub fn random_distribution(
    rng: &mut StdRng,
    n: u64,
    nprocs: usize,
    covering: bool,
) -> Distribution {
    match rng.random_range(0..4) {
        0 => Distribution::block(n, nprocs).unwrap(),
        1 => Distribution::cyclic(n, nprocs).unwrap(),
        2 => Distribution::replicated(n, nprocs).unwrap(),
        _ => {
            let base = Distribution::block(n, nprocs).unwrap();
            let sets = (0..nprocs)
                .map(|p| {
                    let extra = random_index_set(rng, n);
                    if covering {
                        base.get(ProcId(p)).union(&extra)
                    } else if rng.random_bool(0.7) {
                        extra
                    } else {
                        IndexSet::empty()
                    }
                })
                .collect();
            Distribution::from_sets(sets).unwrap()
        }
    }
}

pub struct Shape {
    pub signature: SignatureSpec,
    pub n_out: u64,
    /// Every output index in `[0, n_out)` has a non-empty dependency set,
    /// so a `max` combiner is safe.
    pub rows_nonempty: bool,
}

/// A random signature consuming an input of size `n_in`.
pub fn random_shape(rng: &mut StdRng, n_in: u64, max_n: u64) -> Shape {
    match rng.random_range(0..4) {
        0 => {
            let width = rng.random_range(1..=4);
            let offsets: Vec<i64> = (0..width).map(|_| rng.random_range(-3..=3)).collect();
            let rows_nonempty = offsets.contains(&0);
            Shape {
                signature: SignatureSpec::stencil(offsets),
                n_out: n_in,
                rows_nonempty,
            }
        }
        1 => {
            let stride = rng.random_range(1..=3u64);
            let count = rng.random_range(1..=3);
            let offsets: Vec<u64> = (0..count).map(|_| rng.random_range(0..=3)).collect();
            let max_b = *offsets.iter().max().unwrap();
            // Mostly proper coarsening maps; sometimes rows clip away.
            if n_in > max_b && rng.random_bool(0.7) {
                let n_out_max = (n_in - 1 - max_b) / stride + 1;
                Shape {
                    signature: SignatureSpec::affine(stride, offsets),
                    n_out: rng.random_range(1..=n_out_max),
                    rows_nonempty: true,
                }
            } else {
                Shape {
                    signature: SignatureSpec::affine(stride, offsets),
                    n_out: rng.random_range(1..=max_n),
                    rows_nonempty: false,
                }
            }
        }
        2 => {
            let n_out = rng.random_range(1..=max_n.min(24));
            let nonempty = rng.random_bool(0.5);
            let rows: BTreeMap<u64, IndexSet> = (0..n_out)
                .map(|i| {
                    let mut row = random_index_set(rng, n_in);
                    if nonempty && row.is_empty() {
                        let j = rng.random_range(0..n_in);
                        row = row.union(&IndexSet::range(j, j + 1));
                    }
                    (i, row)
                })
                .collect();
            Shape {
                signature: SignatureSpec::sparse(rows),
                n_out,
                rows_nonempty: nonempty,
            }
        }
        _ => Shape {
            signature: SignatureSpec::total(),
            n_out: rng.random_range(1..=max_n),
            rows_nonempty: true,
        },
    }
}

fn random_combiner(rng: &mut StdRng, shape: &Shape) -> CombinerSpec {
    let stencil_offsets = match &shape.signature {
        SignatureSpec {
            kind: betaplan::SignatureSpecKind::Stencil { offsets },
            ..
        } => Some(offsets.clone()),
        _ => None,
    };
    match rng.random_range(0..3) {
        0 => CombinerSpec::Sum,
        1 if shape.rows_nonempty => CombinerSpec::Max,
        2 if stencil_offsets.is_some() => CombinerSpec::Weighted {
            weights: stencil_offsets
                .unwrap()
                .into_iter()
                .map(|d| (d, rng.random_range(-3..=3)))
                .collect(),
        },
        _ => CombinerSpec::Sum,
    }
}

/// A random single kernel whose input distribution covers `[0, n_in)`, so a
/// message plan always exists.
pub fn random_kernel(rng: &mut StdRng, max_n: u64, max_p: usize) -> Kernel {
    let n_in = rng.random_range(1..=max_n);
    let shape = random_shape(rng, n_in, max_n);
    let nprocs = rng.random_range(1..=max_p);
    let input = random_distribution(rng, n_in, nprocs, true);
    let output = random_distribution(rng, shape.n_out, nprocs, false);
    let signature = shape.signature.build(n_in).unwrap();
    Kernel::new("k", input, output, signature, CombinerSpec::Sum).unwrap()
}

/// A random pipeline plus input values for it. Every distribution except the
/// final output's is covering, so all plans exist.
pub fn random_program(
    rng: &mut StdRng,
    max_n: u64,
    max_p: usize,
    max_kernels: usize,
) -> (Program, Vec<i64>) {
    let steps = rng.random_range(1..=max_kernels);
    let nprocs = rng.random_range(1..=max_p);
    let n0 = rng.random_range(1..=max_n);

    let mut objects = vec![ObjectDecl::new(
        "o0",
        n0,
        random_distribution(rng, n0, nprocs, true),
    )];
    let mut kernels = Vec::new();
    let mut n_in = n0;
    for k in 0..steps {
        let shape = random_shape(rng, n_in, max_n);
        let last = k + 1 == steps;
        let object = ObjectDecl::new(
            format!("o{}", k + 1),
            shape.n_out,
            random_distribution(rng, shape.n_out, nprocs, !last),
        );
        kernels.push(KernelDecl {
            name: format!("k{k}"),
            input: format!("o{k}"),
            output: object.name.clone(),
            combiner: random_combiner(rng, &shape),
            signature: shape.signature,
        });
        n_in = shape.n_out;
        objects.push(object);
    }
    let input = (0..n0).map(|_| rng.random_range(-50..=50)).collect();
    (Program::new(objects, kernels).unwrap(), input)
}

/// Scalar enumeration of one signature row, independent of the algebra.
pub fn row_brute(sig: &SignatureFunction, i: u64) -> BTreeSet<u64> {
    let n_in = sig.domain_bound();
    match sig.kind() {
        SignatureKind::Stencil { offsets } => offsets
            .iter()
            .filter_map(|&d| {
                let j = i as i128 + d as i128;
                (j >= 0 && j < n_in as i128).then_some(j as u64)
            })
            .collect(),
        SignatureKind::Affine { stride, offsets } => offsets
            .iter()
            .filter_map(|&b| {
                let j = *stride as u128 * i as u128 + b as u128;
                (j < n_in as u128).then_some(j as u64)
            })
            .collect(),
        SignatureKind::Sparse { rows } => rows
            .get(&i)
            .map(|row| row.iter().filter(|&j| j < n_in).collect())
            .unwrap_or_default(),
        SignatureKind::Total => (0..n_in).collect(),
    }
}

/// Per-processor needed sets by brute-force per-index enumeration.
pub fn beta_brute(kernel: &Kernel) -> Vec<BTreeSet<u64>> {
    kernel
        .output_dist()
        .sets()
        .iter()
        .map(|mine| {
            let mut needed = BTreeSet::new();
            for i in mine.iter() {
                needed.extend(row_brute(kernel.signature(), i));
            }
            needed
        })
        .collect()
}

/// Predecessor ranks of `p` by element-level intersection.
pub fn predecessors_brute(kernel: &Kernel, needed: &[BTreeSet<u64>], p: usize) -> Vec<usize> {
    (0..kernel.nprocs())
        .filter(|&q| {
            let owned: BTreeSet<u64> = kernel.input_dist().get(ProcId(q)).iter().collect();
            !owned.is_disjoint(&needed[p])
        })
        .collect()
}
