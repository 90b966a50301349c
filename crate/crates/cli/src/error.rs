use thiserror::Error;

use deckgroup_core::Error as CoreError;

/// Exit status for malformed input, unreadable files and unsupported sizes.
pub const EXIT_INPUT: i32 = 1;
/// Exit status for classification violations, oracle mismatches and failed
/// verification.
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{field}: {message}")]
    Input { field: String, message: String },

    #[error("oracle refused: d^k = {count} exceeds 64 (d = {degree}, k = {k})")]
    OracleTooLarge { degree: u32, k: usize, count: u64 },

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn input(field: impl Into<String>, message: impl ToString) -> Self {
        CliError::Input { field: field.into(), message: message.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } | CliError::OracleTooLarge { .. } | CliError::Io(_) => EXIT_INPUT,
            CliError::Core(e) => match e {
                CoreError::ZeroVector
                | CoreError::SingularMatrix { .. }
                | CoreError::SingularCoefficients { .. }
                | CoreError::BadDegree(_)
                | CoreError::InvalidTolerance(_)
                | CoreError::DegenerateTriple
                | CoreError::PowerMapInput
                | CoreError::GroupTooLarge { .. } => EXIT_INPUT,
                _ => EXIT_VIOLATION,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
