//! Builders for benchmark workloads: large but regular kernels and pipelines
//! whose derivation cost is dominated by the interval algebra under test.

use betaplan::{
    CombinerSpec, Distribution, IndexSet, Kernel, KernelDecl, ObjectDecl, Program, SignatureSpec,
};

/// Two interleaved striped sets over `[0, n)`, each with `stripes` intervals.
/// Their union merges nothing and their intersection is empty, so the ops
/// walk every interval.
pub fn striped_sets(n: u64, stripes: u64) -> (IndexSet, IndexSet) {
    let width = n / (2 * stripes);
    assert!(width >= 2, "stripes too fine for n");
    let a =
        IndexSet::from_intervals((0..stripes).map(|s| (2 * s * width, 2 * s * width + width - 1)))
            .unwrap();
    let b = IndexSet::from_intervals(
        (0..stripes).map(|s| ((2 * s + 1) * width, (2 * s + 1) * width + width - 1)),
    )
    .unwrap();
    (a, b)
}

/// A symmetric stencil kernel of the given half-width over `n` values split
/// into blocks. A cyclic output distribution shatters the needed sets into
/// many small intervals, which stresses the derivation far more than blocks.
pub fn stencil_kernel(n: u64, nprocs: usize, half_width: i64, cyclic_output: bool) -> Kernel {
    let offsets: Vec<i64> = (-half_width..=half_width).collect();
    let input = Distribution::block(n, nprocs).unwrap();
    let output = if cyclic_output {
        Distribution::cyclic(n, nprocs).unwrap()
    } else {
        Distribution::block(n, nprocs).unwrap()
    };
    let signature = SignatureSpec::stencil(offsets).build(n).unwrap();
    Kernel::new("stencil", input, output, signature, CombinerSpec::Sum).unwrap()
}

/// A pipeline of `depth` three-point stencil kernels over `n` values.
pub fn chained_program(n: u64, nprocs: usize, depth: usize) -> Program {
    let objects = (0..=depth)
        .map(|k| ObjectDecl::new(format!("o{k}"), n, Distribution::block(n, nprocs).unwrap()))
        .collect();
    let kernels = (0..depth)
        .map(|k| KernelDecl {
            name: format!("k{k}"),
            input: format!("o{k}"),
            output: format!("o{}", k + 1),
            signature: SignatureSpec::stencil(vec![-1, 0, 1]),
            combiner: CombinerSpec::Sum,
        })
        .collect();
    Program::new(objects, kernels).unwrap()
}
