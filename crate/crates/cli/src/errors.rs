use judgekit_core::Error as CoreError;

/// Failure classes mapped onto distinct exit codes: config 2, input 3,
/// schema 4.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Input(String),
    Schema(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Input(_) => 3,
            CliError::Schema(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Input(m) | CliError::Schema(m) => m,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self {
            CliError::Config(_) => "config error",
            CliError::Input(_) => "input error",
            CliError::Schema(_) => "schema error",
        };
        write!(f, "{kind}: {}", self.message())
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match &err {
            CoreError::Io(_) => CliError::Input(err.to_string()),
            CoreError::Jsonl { .. }
            | CoreError::ProbabilitySum { .. }
            | CoreError::ProbabilityRange { .. }
            | CoreError::ProbabilityLength { .. }
            | CoreError::MalformedList { .. }
            | CoreError::LabelOutOfRange { .. }
            | CoreError::NonBinaryLabel { .. } => CliError::Schema(err.to_string()),
            CoreError::BadSimConfig { .. }
            | CoreError::BadExtractionSpec { .. }
            | CoreError::BadLikert { .. }
            | CoreError::MethodSettingMismatch { .. }
            | CoreError::WrongGranularity { .. } => CliError::Config(err.to_string()),
            _ => CliError::Schema(err.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
