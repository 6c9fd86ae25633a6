use serde_json::Value;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid object: {0}")]
    InvalidObject(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("span is not closed under the structure: {0}")]
    NotClosed(String),
    #[error("morphism does not factor: {0}")]
    NotFactorizable(String),
    #[error("morphisms are not parallel: {0}")]
    NotParallel(String),
    #[error("no lift found after {explored} candidates ({})", if *.exhausted { "search space exhausted" } else { "budget reached" })]
    LiftNotFound { explored: u64, exhausted: bool },
    #[error("dimension blowup: {what} needs dimension {predicted}, cap is {cap}")]
    DimensionBlowup {
        what: String,
        predicted: usize,
        cap: usize,
    },
    #[error("degree {degree} out of range (truncation degree {truncation})")]
    DegreeOutOfRange { degree: usize, truncation: usize },
    #[error("projectivity obstruction at level {level}: {detail}")]
    ConditionPObstruction {
        level: usize,
        detail: String,
        unknown: bool,
        witness: Box<Value>,
    },
    #[error("no usable projectivity witness for D^{}(C_{degree}): {detail}", .degree + 1)]
    DProjectivityObstruction {
        degree: usize,
        detail: String,
        witness: Box<Value>,
    },
    #[error("vanishing check failed at degree {degree}: {detail}")]
    VanishingCheckFailed { degree: usize, detail: String },
    #[error("functor {0} does not preserve the zero object")]
    FunctorNotZeroPreserving(String),
    #[error("unknown functor `{0}`")]
    UnknownFunctor(String),
    #[error("hypothesis not verified: {0}")]
    HypothesisUnverified(String),
    #[error("insufficient truncation: {0}")]
    InsufficientTruncation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Obstructions and exhausted budgets, as opposed to outright failures.
    pub fn is_obstruction(&self) -> bool {
        matches!(
            self,
            Error::LiftNotFound { .. }
                | Error::ConditionPObstruction { .. }
                | Error::DProjectivityObstruction { .. }
                | Error::DimensionBlowup { .. }
                | Error::HypothesisUnverified(_)
        )
    }
}
