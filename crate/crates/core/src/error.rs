use thiserror::Error;

/// Errors produced anywhere in the discretization pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration rejected:\n  - {}", .0.join("\n  - "))]
    InvalidConfig(Vec<String>),

    #[error("cell set is empty")]
    EmptyCellSet,

    #[error("the discrete level set has no negative sample on the background mesh")]
    NoActiveCells,

    #[error("unsupported polynomial degree {degree} in dimension {dim}")]
    UnsupportedDegree { dim: usize, degree: usize },

    #[error("no quadrature rule of exactness {exactness} available in dimension {dim}")]
    QuadratureUnavailable { dim: usize, exactness: usize },

    #[error("non-finite value in {what} at {location}")]
    NonFinite { what: String, location: String },

    #[error("active exterior facet {facet} lies on the boundary of the background box")]
    ActiveFacetOnBox { facet: usize },

    #[error("singular matrix: pivot {pivot} has magnitude {magnitude:e}")]
    SingularMatrix { pivot: usize, magnitude: f64 },

    #[error("step {step}: relative residual {residual:e} exceeds {tolerance:e}")]
    ResidualTooLarge {
        step: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("iterative solver stalled after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("reference norm vanishes; relative error undefined")]
    ZeroReference,

    #[error("time grid with {coarse} steps is not nested in the reference grid with {reference} steps")]
    NonNestedTimeGrid { coarse: usize, reference: usize },

    #[error("at least two records are needed to fit an order, got {0}")]
    TooFewRecords(usize),

    #[error("expression error: {0}")]
    Expression(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
