use thiserror::Error;

/// Errors raised by the decomposition engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{labels} labels but {weights} weights")]
    LengthMismatch { labels: usize, weights: usize },

    #[error("duplicate outcome label `{0}`")]
    DuplicateLabel(String),

    #[error("negative weight {weight} for outcome `{label}`")]
    NegativeWeight { label: String, weight: f64 },

    #[error("weight {weight} for outcome `{label}` is not finite")]
    NonFiniteWeight { label: String, weight: f64 },

    #[error("space has {size} outcomes, above the cap of {cap}")]
    SpaceTooLarge { size: usize, cap: usize },

    #[error("unknown outcome label `{0}`")]
    UnknownLabel(String),

    #[error("outcome `{0}` appears in more than one block")]
    OverlappingBlocks(String),

    #[error("outcome `{0}` is not covered by any block")]
    MissingOutcome(String),

    #[error("partition contains an empty block")]
    EmptyBlock,

    #[error("operands live on different spaces ({left} vs {right} outcomes)")]
    SpaceMismatch { left: usize, right: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("order d = {0} must be a positive finite number")]
    InvalidOrder(f64),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),

    #[error("{kind} expects {expected} variables, got {got}")]
    Arity {
        kind: String,
        expected: &'static str,
        got: usize,
    },

    #[error("cannot parse `{input}` at offset {offset}: {message}")]
    Parse {
        input: String,
        offset: usize,
        message: String,
    },

    #[error("{what}: size {size} exceeds the enumeration cap of {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("children of `{label}` weigh {got}, parent weighs {expected}")]
    WeightMismatch {
        label: String,
        expected: f64,
        got: f64,
    },

    #[error("weights sum to {0}, expected 1")]
    NotNormalized(f64),

    #[error("expected {expected} bins, got {got} weights")]
    BinCount { expected: usize, got: usize },

    #[error("refinement maps do not share a common child space")]
    NoCommonRefinement,

    #[error("parts of a star product must be pairwise disjoint")]
    OverlappingParts,

    #[error("unknown canonical system `{0}`")]
    UnknownSystem(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
