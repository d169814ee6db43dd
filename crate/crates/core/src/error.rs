use thiserror::Error;

/// Errors raised by the symmetric-function, geometry and verification layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degree {k} is outside 1..={n}")]
    DegreeOutOfRange { k: usize, n: usize },

    #[error("curvature vector is empty")]
    EmptyCurvature,

    #[error("curvature entry {index} is not finite ({value})")]
    NonFiniteCurvature { index: usize, value: f64 },

    #[error("sigma_{k} vanishes, the ratio is undefined")]
    DegenerateSigma { k: usize },

    #[error("point is outside the Garding cone Gamma_{k}")]
    OutsideCone { k: usize },

    #[error("sigma_{k} = {value} at node {node} is not positive")]
    ConeExit { k: usize, node: usize, value: f64 },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("radius {value} at node {node} is not positive")]
    NonPositiveRadius { node: usize, value: f64 },

    #[error("non-finite geometry at node {node}")]
    NonFiniteGeometry { node: usize },

    #[error("V_{index} drifted by {drift:e} relative, allowed {allowed:e}")]
    ConservationDrift { index: usize, drift: f64, allowed: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
