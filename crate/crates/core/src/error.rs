use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid character {found:?} at position {position} (expected one of a, b, c, d)")]
    Parse { position: usize, found: char },

    #[error("invalid portrait text: {0}")]
    PortraitSyntax(String),

    #[error("invalid vertex text: {0}")]
    VertexSyntax(String),

    #[error("vertex at level {level} lies below portrait depth {depth}")]
    DepthExceeded { level: u32, depth: u32 },

    #[error("portrait depths differ: {left} vs {right}")]
    DepthMismatch { left: u32, right: u32 },

    #[error("cannot split a depth-0 portrait")]
    EmptyPortrait,

    #[error("{what} {requested} exceeds the configured cap {cap}")]
    CapExceeded {
        what: &'static str,
        requested: u64,
        cap: u64,
    },

    #[error("word {word:?} does not stabilize level {level}")]
    NotInStabilizer { word: String, level: u32 },

    #[error("element {word:?} is not in the ball of radius {radius}; enumerate a larger ball")]
    InsufficientRadius { word: String, radius: u32 },

    #[error(
        "portrait keys of depth {depth} collide for distinct elements {first:?} and {second:?}; \
         the key depth is too shallow"
    )]
    KeyCollision {
        depth: u32,
        first: String,
        second: String,
    },

    #[error("time or memory budget exhausted at radius {reached} of {requested}")]
    BudgetExhausted { requested: u32, reached: u32 },

    #[error("invalid parameter: {0}")]
    Domain(String),

    #[error("malformed series data: {0}")]
    SeriesFormat(String),

    #[error("malformed cache file {path}: {reason}")]
    CacheFormat { path: PathBuf, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
