use serde::Serialize;
use weilforms_core::Error as MathError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{origin}:{line}:{column}: {message}")]
    Parse { origin: String, line: usize, column: usize, message: String },
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Math(#[from] MathError),
}

/// Exit status for a failed run.
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_PRECISION: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Io(_) | CliError::Input(_) => EXIT_INPUT,
            CliError::Math(e) => match e {
                MathError::InconsistentSignature { .. } | MathError::NumericInconsistency { .. } | MathError::Invariant(_) => {
                    EXIT_INVARIANT
                }
                MathError::StabilizationFailure { .. }
                | MathError::Exhaustion { .. }
                | MathError::Precision { .. }
                | MathError::Overflow(_) => EXIT_PRECISION,
                _ => EXIT_INPUT,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Io(_) => "io",
            CliError::Input(_) => "input",
            CliError::Math(e) => match e {
                MathError::InvalidLattice(_) => "invalid_lattice",
                MathError::DegenerateModule => "degenerate_module",
                MathError::NotInDual => "not_in_dual",
                MathError::IndexMismatch(_) => "index_mismatch",
                MathError::ForeignElement => "foreign_element",
                MathError::WrongParity { .. } => "wrong_parity",
                MathError::UnsupportedWeight(_) => "unsupported_weight",
                MathError::InconsistentSignature { .. } => "inconsistent_signature",
                MathError::NumericInconsistency { .. } => "numeric_inconsistency",
                MathError::StabilizationFailure { .. } => "stabilization_failure",
                MathError::Exhaustion { .. } => "exhaustion",
                MathError::UnsupportedModule(_) => "unsupported_module",
                MathError::UnsupportedNorm(_) => "unsupported_norm",
                MathError::ModuleMismatch(_) => "module_mismatch",
                MathError::Precision { .. } => "precision",
                MathError::NotLorentzian(_) => "not_lorentzian",
                MathError::Invariant(_) => "invariant",
                MathError::Overflow(_) => "overflow",
            },
        }
    }

    pub fn report(&self) -> ErrorReport {
        ErrorReport { error: ErrorBody { kind: self.kind(), message: self.to_string(), exit_code: self.exit_code() } }
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub error: ErrorBody,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub kind: &'static str,
    pub message: String,
    pub exit_code: i32,
}
