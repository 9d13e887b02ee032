use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("superpixel count k = {k} must lie in [1, {pixels}]")]
    InvalidSuperpixelCount { k: usize, pixels: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("image data has {actual} pixels, expected {expected}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("channel value {0} outside [0, 1]")]
    ChannelOutOfRange(f64),

    #[error("matrix is not symmetric: {0:?}")]
    AsymmetricMatrix([[f64; 2]; 2]),

    #[error("matrix is not positive definite: {0:?}")]
    NotPositiveDefinite([[f64; 2]; 2]),

    #[error("label map has {0} unassigned pixels")]
    Unassigned(usize),

    #[error("supplies sum to {supplied} but the instance has {pixels} pixels")]
    SupplyMismatch { supplied: u64, pixels: usize },

    #[error("pixel {0} has no admitted site")]
    PixelWithoutArc(usize),

    #[error("transportation instance infeasible; starved sites {starved:?}")]
    Infeasible { starved: Vec<usize> },

    #[error("malformed {what}: {detail}")]
    Parse { what: &'static str, detail: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: ::image::ImageError,
    },

    #[error("no usable images in {0}")]
    EmptyDataset(PathBuf),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Parse {
            what,
            detail: detail.into(),
        }
    }

    /// Process exit code for the command-line front end: 1 for usage errors,
    /// 2 for I/O and format errors, 3 for solver failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Image { .. } | Error::Parse { .. } | Error::EmptyDataset(_) => 2,
            Error::Infeasible { .. } => 3,
            _ => 1,
        }
    }
}
