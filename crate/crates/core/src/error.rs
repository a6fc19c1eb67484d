use thiserror::Error;

/// Errors raised by table construction, probability validation and solvers.
#[derive(Debug, Error)]
pub enum CdError {
    #[error("axis `{0}` not found")]
    UnknownAxis(String),
    #[error("duplicate axis `{0}`")]
    DuplicateAxis(String),
    #[error("axis groups overlap on `{0}`")]
    OverlappingAxes(String),
    #[error("alphabet mismatch on axis `{0}`")]
    AlphabetMismatch(String),
    #[error("negative probability {0}")]
    NegativeProbability(f64),
    #[error("total mass {0} is too far from 1 to renormalize")]
    NotNormalized(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("distortion target {0} is infeasible")]
    InfeasibleDistortion(f64),
    #[error("Markov condition violated, residual {0}")]
    MarkovViolated(f64),
    #[error("joint of {cells} cells exceeds the {limit}-cell guardrail; trivialize unused layers (size-1 alphabets) to shrink it")]
    TooLarge { cells: usize, limit: usize },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, CdError>;
