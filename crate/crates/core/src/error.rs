use thiserror::Error;

/// Errors raised by the simulator, drivers and text/JSON formats.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("layout error: {0}")]
    Layout(String),

    #[error("degenerate state: all amplitudes are zero")]
    DegenerateState,

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("matrix dimension {dim} does not match {targets} target qubit(s)")]
    DimensionMismatch { dim: usize, targets: usize },

    #[error("oracle table incomplete: missing setting {0}")]
    IncompleteOracle(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("outcome {outcome} of register {register} has zero probability")]
    ImpossibleOutcome { register: String, outcome: String },

    #[error("promise violated: function {0} is neither constant nor balanced")]
    PromiseViolation(String),

    #[error("circuit step {step} is not block-diagonal in the basis of register {register}")]
    NotBlockDiagonal { step: usize, register: String },

    #[error("structure error: {0}")]
    Structure(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
