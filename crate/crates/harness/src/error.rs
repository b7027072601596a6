use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config parse error: {0}")]
    Parse(String),

    #[error("config validation error: {0}")]
    Validation(String),

    #[error(transparent)]
    Core(#[from] irs_place::Error),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("certificate violated: {0}")]
    Certificate(String),
}

impl HarnessError {
    /// Process exit code: 2 config, 3 infeasible, 4 numerical, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Parse(_) | HarnessError::Validation(_) => 2,
            HarnessError::Core(e) if e.is_infeasible() => 3,
            HarnessError::Core(e) if e.is_numerical() => 4,
            HarnessError::Certificate(_) => 4,
            HarnessError::Core(irs_place::Error::BudgetOutOfRange { .. }) => 2,
            HarnessError::Core(_) => 1,
            HarnessError::Io(_) => 1,
        }
    }
}
