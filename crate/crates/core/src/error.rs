use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema has no measurements")]
    NoMeasurements,
    #[error("measurement `{0}` has no outcomes")]
    NoOutcomes(String),
    #[error("duplicate measurement name `{0}`")]
    DuplicateMeasurement(String),
    #[error("duplicate outcome `{outcome}` in measurement `{measurement}`")]
    DuplicateOutcome { measurement: String, outcome: String },
    #[error("measurement `{measurement}` has {labels} labels for {outcomes} outcomes")]
    LabelCountMismatch {
        measurement: String,
        labels: usize,
        outcomes: usize,
    },
    #[error("measurement `{measurement}` assigns label {label} to two outcomes")]
    DuplicateLabel { measurement: String, label: f64 },
    #[error("unknown measurement `{0}`")]
    UnknownMeasurement(String),
    #[error("unknown outcome `{outcome}` of measurement `{measurement}`")]
    UnknownOutcome { measurement: String, outcome: String },
    #[error("impossible set {0:?} must name at least two measurements")]
    ImpossibleTooSmall(Vec<String>),
    #[error("{what} = {value} exceeds the cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("measurement `{0}` was performed but no outcome was recorded")]
    MissingOutcome(String),
    #[error("measurement `{0}` recorded two different outcomes")]
    ConflictingOutcomes(String),
    #[error("outcome of `{0}` recorded without performing the measurement")]
    OutcomeWithoutMeasurement(String),
    #[error("run log is empty")]
    EmptyLog,
    #[error("measurement set {0:?} was never performed")]
    UnmeasuredContext(Vec<String>),
    #[error("reconstruction produced negative mass {mass:.3e} on atom {atom}")]
    NegativeMass { atom: String, mass: f64 },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid measurement frequencies: {0}")]
    InvalidFrequencies(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("tables are defined over different schemas")]
    IncomparableSchemas,
    #[error("point is not in the state polytope")]
    NotInPolytope,
    #[error("state has no decomposition over the deterministic vertices")]
    Infeasible,
    #[error("unknown coordinate {0}")]
    UnknownCoordinate(String),
    #[error("measurement `{0}` has no real outcome labels")]
    MissingLabels(String),
    #[error("relabeling map is not injective on the labels of `{0}`")]
    NonInjectiveRelabel(String),
    #[error("`{0}` is outside the domain of the flow")]
    OutsideFlowDomain(String),
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
