use thiserror::Error;

/// Errors produced by the geometry, variation and norm kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite coordinate in input")]
    NonFinite,
    #[error("invalid point list: {0}")]
    InvalidPointList(String),
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("degenerate result: {0}")]
    Degenerate(String),
    #[error("function evaluation failed at ({x}, {y}): {reason}")]
    Eval { x: f64, y: f64, reason: String },
    #[error("empty input: {0}")]
    Empty(String),
    #[error("picset validation failed: {0}")]
    Validation(String),
    #[error("partition failed: {0}")]
    Partition(String),
    #[error("curve is not convex")]
    NotConvex,
    #[error("curve is not projectable: {0}")]
    NotProjectable(String),
    #[error("homeomorphism construction failed: {0}")]
    Homeo(String),
    #[error("domains are not separated: {0}")]
    NotSeparated(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("spec file error: {0}")]
    SpecFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
