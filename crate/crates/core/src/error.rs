use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the solver, oracle and scenario layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported order {order} (maximum {max})")]
    UnsupportedOrder { order: usize, max: usize },

    #[error("{what}: argument {value} outside the admissible domain")]
    Domain { what: &'static str, value: f64 },

    #[error("surface resolution {0} is too coarse (minimum 4)")]
    TooCoarse(usize),

    #[error("spheroid with equatorial semi-axis {equatorial} and polar semi-axis {polar} is not prolate")]
    NotProlate { equatorial: f64, polar: f64 },

    #[error("singular evaluation: {0}")]
    Singularity(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("degenerate basis function {index}: Gram diagonal {value:e} is negligible")]
    DegenerateBasis { index: usize, value: f64 },

    #[error("singular system (condition number {condition:.3e}); retry with lambda > 0")]
    SingularSystem { condition: f64 },

    #[error("incident field vanishes on the surface; residual normalization is undefined")]
    UndefinedNormalization,

    #[error("evaluation point inside the potential support: {0}")]
    UnsupportedRegion(String),

    #[error("oracle failure: {0}")]
    Oracle(String),

    #[error("{0}")]
    Usage(String),

    #[error("I/O error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
