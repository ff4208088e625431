use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("matrix has trivial kernel")]
    TrivialKernel,

    #[error("kernel has dimension {0}, expected 1")]
    KernelNotSimple(usize),

    #[error("matrix is singular")]
    Singular,

    #[error("camera {index} has rank {rank}, expected 3")]
    RankDeficientCamera { index: usize, rank: usize },

    #[error("need at least {needed} cameras, got {got}")]
    TooFewCameras { needed: usize, got: usize },

    #[error("point is the zero vector")]
    ZeroPoint,

    #[error("world point coincides with a camera focal point (camera {0:?})")]
    FocalPoint(Option<usize>),

    #[error("image tuple is not in the multiview variety")]
    NotInVariety,

    #[error("image tuple is not triangulable (epipole pair)")]
    NotTriangulable,

    #[error("candidate world points disagree beyond tolerance (angle {0:e})")]
    AmbiguousFloat(f64),

    #[error("candidate world points disagree on the exact backend")]
    Inconsistent,

    #[error("expected bidegree {expected:?}, got {got:?}")]
    Bidegree {
        expected: (u32, u32),
        got: (u32, u32),
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("polynomials have mixed multidegrees")]
    MixedDegrees,

    #[error("denominator vanishes modulo {0}")]
    BadPrime(u64),

    #[error("symmetric matrix has full rank")]
    FullRankConic,

    #[error("conic splits into a complex-conjugate line pair")]
    NonRealSplit,

    #[error("conic splits into real lines with irrational coordinates")]
    IrrationalSplit,

    #[error("no feasible point: {0}")]
    Infeasible(String),

    #[error("random generation exhausted after {0} attempts")]
    Exhausted(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
