use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("parameter `{name}` = {value} outside its valid range {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("cannot parse channel spec `{0}`")]
    ChannelSpec(String),

    #[error("Kraus rank {0} is outside the supported range")]
    KrausRank(usize),

    #[error("cannot parse grid `{0}` (expected lo:hi:step with step > 0 and lo <= hi)")]
    GridSpec(String),

    #[error("SDP solver did not converge: {0}")]
    SolverFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
