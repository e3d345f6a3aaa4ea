use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed pixmap {path}: {reason}")]
    MalformedPixmap { path: PathBuf, reason: String },
    #[error("malformed csv {path}: {reason}")]
    MalformedCsv { path: PathBuf, reason: String },
    #[error("malformed json {path}: {reason}")]
    MalformedJson { path: PathBuf, reason: String },
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid elevation grid: {0}")]
    InvalidGrid(String),
    #[error("no surface to render")]
    NoSurface,
    #[error("window out of bounds: {w}x{h} at ({u}, {v}) in {map_w}x{map_h} map")]
    WindowOutOfBounds {
        u: i64,
        v: i64,
        w: usize,
        h: usize,
        map_w: usize,
        map_h: usize,
    },
    #[error("empty template")]
    EmptyTemplate,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("expected a grayscale map")]
    NotGrayscale,
    #[error("degenerate patch (zero variance)")]
    DegeneratePatch,
    #[error("template {tw}x{th} larger than map {mw}x{mh}")]
    TemplateTooLarge {
        tw: usize,
        th: usize,
        mw: usize,
        mh: usize,
    },
    #[error("WNCC requires a weight kernel")]
    MissingKernel,
    #[error("no valid placement (every window is degenerate)")]
    NoValidPlacement,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(
        "swarm lost{}: every particle is outside the map",
        frame.map(|f| format!(" at frame {f}")).unwrap_or_default()
    )]
    SwarmLost { frame: Option<usize> },
    #[error("all particle weights are zero")]
    ZeroWeights,
    #[error("trajectory exits the map at frame {frame}")]
    TrajectoryExitsMap { frame: usize },
    #[error("frame index mismatch: {0}")]
    FrameMismatch(String),
    #[error("invalid scene spec: {0}")]
    InvalidScene(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
