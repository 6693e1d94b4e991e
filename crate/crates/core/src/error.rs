use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid bounding box: {0}")]
    InvalidBox(String),
    #[error("stream has zero frames")]
    NoFrames,
    #[error("non-monotonic timestamps at frame {index}")]
    NonMonotonic { index: u64 },
    #[error("duplicate object id {id:?} in frame {index}")]
    DuplicateObject { index: u64, id: String },
    #[error("multiple grounds in frame {index}")]
    MultipleGrounds { index: u64 },
    #[error("ground object changed at frame {index}")]
    GroundChanged { index: u64 },
    #[error("multiple hands in frame {index}")]
    MultipleHands { index: u64 },
    #[error("hand missing from frame {index} after its first appearance")]
    HandMissing { index: u64 },
    #[error("fps must be positive and finite, got {0}")]
    InvalidFps(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no facing surface for relation {0}")]
    NoFacingSurface(&'static str),
    #[error("no action window: the hand never appears")]
    NoActionWindow,
    #[error("empty event chain")]
    EmptyChain,
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("similarity matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("prediction undefined: {0}")]
    PredictionUndefined(String),
    #[error("invalid prediction moment: T = {t}, Tot = {tot}")]
    InvalidMoment { t: f64, tot: f64 },
    #[error("unknown action {0:?}")]
    UnknownAction(String),
    #[error("infeasible geometry: {0}")]
    InfeasibleGeometry(String),
    #[error("prediction moment exceeds duration for action {index}")]
    PredictionAfterEnd { index: usize },
    #[error("invalid timing table: {0}")]
    InvalidTiming(String),
}
