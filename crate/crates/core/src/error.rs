use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPsd { eigenvalue: f64 },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is empty")]
    EmptyMatrix,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{what}: reconstruction residual {residual:.3e} exceeds {bound:.1e}")]
    ResidualExceeded {
        what: &'static str,
        residual: f64,
        bound: f64,
    },

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("subsystem label `{0}` appears more than once")]
    LabelClash(String),

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("subsystem `{0}` must have dimension at least 1")]
    ZeroDimension(String),

    #[error("partial trace needs at least one subsystem to keep")]
    EmptyKeepSet,

    #[error("invalid bipartition: {0}")]
    InvalidCut(String),

    #[error("total dimension {dim} exceeds the cap of {cap} (set EPRB_MAX_DIM to raise it)")]
    DimensionCap { dim: usize, cap: usize },

    #[error("state is not normalized (norm {norm:.12})")]
    NotNormalized { norm: f64 },

    #[error("density matrix trace is {trace:.12}, expected 1")]
    BadTrace { trace: f64 },

    #[error("Bob's marginals differ by {deviation:.3e}; the ideal construction needs equal marginals")]
    NotIdealHiding { deviation: f64 },

    #[error("round {round} is not the last round (protocol has {rounds} rounds)")]
    LastRoundActorMismatch { round: usize, rounds: usize },

    #[error("outcome projectors of the {party} cannot be pulled back through round {round}: {reason}")]
    PullBackScope {
        party: &'static str,
        round: usize,
        reason: String,
    },

    #[error("truncation unsound: maximum pairwise fidelity {max_fidelity:.6}")]
    TruncationUnsound { max_fidelity: f64 },

    #[error("truncated protocol changes the outcome table by {deviation:.3e}")]
    TruncationMismatch { deviation: f64 },

    #[error("operation on {labels:?} is not local to the {side} side")]
    NonLocalOperation { side: &'static str, labels: Vec<String> },

    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),

    #[error("target must be positive, got {0}")]
    NonPositiveTarget(f64),

    #[error("unknown builtin protocol `{0}`")]
    UnknownBuiltin(String),

    #[error("bad builtin parameters: {0}")]
    BadParams(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error at `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical kernels themselves, as opposed to bad input.
    pub fn is_numerical_failure(&self) -> bool {
        matches!(
            self,
            Error::ResidualExceeded { .. } | Error::NoConvergence(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
