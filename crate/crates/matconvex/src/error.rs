use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point} lies outside the domain {domain}")]
    DomainViolation { point: f64, domain: String },

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("degenerate Moebius map: ad - bc = 0")]
    DegenerateMobius,

    #[error("Moebius image {image} escapes the inner domain {domain}")]
    ImageEscapesDomain { image: String, domain: String },

    #[error("node set must contain at least one node")]
    EmptyNodeSet,

    #[error("node {node} lies outside the interval {interval}")]
    NodeOutsideInterval { node: f64, interval: String },

    #[error("non-positive node {0} in reciprocal closed form")]
    NonPositiveNode(f64),

    #[error("iterated quadrature depth {0} exceeds the supported bound of 6")]
    QuadratureDepth(usize),

    #[error("quadrature rule order must be at least 2, got {0}")]
    InvalidRuleOrder(usize),

    #[error("nodes must be pairwise distinct: gap |{a} - {b}| below {min_gap}")]
    NodesTooClose { a: f64, b: f64, min_gap: f64 },

    #[error("interval {interval} too small for {count} nodes at min_gap {min_gap}")]
    IntervalTooSmall {
        interval: String,
        count: usize,
        min_gap: f64,
    },

    #[error("matrix is not symmetric")]
    AsymmetricMatrix,

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("cannot parse {what}: {input:?}")]
    ParseError { what: &'static str, input: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
