use thiserror::Error;

/// Errors shared across the planning library.
#[derive(Debug, Error)]
pub enum PlanError {
    /// A caller violated an operation precondition (dimension mismatch,
    /// out-of-range parameter, inconsistent node sets, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A scenario file or hand-built scenario failed validation.
    #[error("invalid scenario ({field}): {message}")]
    InvalidScenario { field: String, message: String },

    /// Rejection sampling exhausted its attempt budget, so the free space is
    /// (nearly) empty relative to the bounding box.
    #[error("unsatisfiable scenario: {0}")]
    UnsatisfiableScenario(String),

    /// A scenario file could not be parsed.
    #[error("failed to parse {path}: {message}")]
    ScenarioParse { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl PlanError {
    pub fn invalid_input(msg: impl Into<String>) -> Self {
        PlanError::InvalidInput(msg.into())
    }

    pub fn invalid_scenario(field: impl Into<String>, message: impl Into<String>) -> Self {
        PlanError::InvalidScenario {
            field: field.into(),
            message: message.into(),
        }
    }
}
