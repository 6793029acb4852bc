use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("negative index {0} cannot appear in an index set")]
    NegativeIndex(i64),
    #[error("interval [{lo}, {hi}) has its bounds reversed")]
    ReversedInterval { lo: u64, hi: u64 },
    #[error("a distribution needs at least one processor")]
    NoProcessors,
    #[error("stencil offset set must be non-empty")]
    EmptyStencil,
    #[error("affine offset set must be non-empty")]
    EmptyAffineOffsets,
    #[error("affine stride must be positive")]
    ZeroStride,
    #[error("sparse signature has no row for output index {index}")]
    MissingSparseRow { index: u64 },
    #[error("signature declares input size {declared} but the input object has size {expected}")]
    DomainSizeMismatch { declared: u64, expected: u64 },
    #[error(
        "kernel `{kernel}`: input and output distributions disagree on processor count \
         ({input} vs {output})"
    )]
    ProcCountMismatch {
        kernel: String,
        input: usize,
        output: usize,
    },
    #[error("kernel `{kernel}`: {dist} distribution reaches index {index}, outside [0, {bound})")]
    DistOutOfBounds {
        kernel: String,
        dist: &'static str,
        index: u64,
        bound: u64,
    },
    #[error("kernel `{kernel}`: a weighted combiner requires a stencil signature")]
    WeightedNeedsStencil { kernel: String },
    #[error("kernel `{kernel}`: weighted combiner has no weight for stencil offset {offset}")]
    MissingWeight { kernel: String, offset: i64 },
    #[error(
        "kernel `{kernel}`: processor {proc} needs input index {index}, which no processor owns"
    )]
    Uncoverable {
        kernel: String,
        proc: usize,
        index: u64,
    },
    #[error("invalid program: {0}")]
    InvalidProgram(String),
    #[error("`{object}` has size {expected} but {actual} values were supplied")]
    InputLength {
        object: String,
        expected: u64,
        actual: usize,
    },
    #[error("value for index {index} of `{object}` was never computed")]
    UndefinedValue { object: String, index: u64 },
    #[error("arithmetic overflow while combining values for output index {index}")]
    ValueOverflow { index: u64 },
    #[error("output index {index} has an empty dependency set and `max` has no identity")]
    EmptyDependencies { index: u64 },
    #[error("redundant copies of index {index} of `{object}` disagree ({left} vs {right})")]
    CopyMismatch {
        object: String,
        index: u64,
        left: i64,
        right: i64,
    },
}
