use thiserror::Error;

/// Errors raised by distribution construction and the inference operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("judgment space must contain at least {min} options, got {got}")]
    SpaceTooSmall { min: usize, got: usize },
    #[error("judgment space values must be strictly monotone")]
    NonMonotoneSpace,
    #[error("expected {expected} probabilities, got {got}")]
    ProbabilityLength { expected: usize, got: usize },
    #[error("probability out of range at option {index}: {value}")]
    ProbabilityRange { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, too far from 1 to renormalize")]
    ProbabilitySum { sum: f64 },
    #[error("distributions are defined on different judgment spaces")]
    SpaceMismatch,
    #[error("mixture weights sum to {sum}, too far from 1 to renormalize")]
    WeightSum { sum: f64 },
    #[error("quantile level must lie in (0, 1), got {p}")]
    QuantileLevel { p: f64 },
    #[error("operation requires the integer score grid 1..={expected}")]
    NotScoreGrid { expected: usize },
    #[error("operation requires granularity {expected}, got {got}")]
    WrongGranularity { expected: usize, got: usize },
    #[error("delta space must be symmetric about zero")]
    AsymmetricDelta,
    #[error("score {score} is outside the grid 1..={k}")]
    ScoreOutOfRange { score: f64, k: usize },
    #[error("both ordered judgments carry the same presentation order")]
    DuplicateOrder,
    #[error("likert granularity must be 2, 3, or 5, got {got}")]
    BadLikert { got: usize },
    #[error("pair ({a}, {b}) is not covered by the intermediate preferences")]
    MissingPair { a: usize, b: usize },
    #[error("text identifier {id} was not decoded in the ranking")]
    IdentifierMissing { id: usize },
    #[error("cannot compare a text identifier with itself ({id})")]
    SelfComparison { id: usize },
    #[error("malformed list output: {reason}; raw text: {text:?}")]
    MalformedList { reason: String, text: String },
    #[error("input slices have mismatched lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("accuracy requires binary labels, got {label} for instance {id}")]
    NonBinaryLabel { id: String, label: f64 },
    #[error("label {label} for instance {id} is outside [0, 1]")]
    LabelOutOfRange { id: String, label: f64 },
    #[error("instance sequences do not line up at position {index}")]
    InstanceMismatch { index: usize },
    #[error("operation requires a nonempty input")]
    EmptyInput,
    #[error("wasserstein order must be 1 or 2, got {got}")]
    BadWassersteinOrder { got: u8 },
    #[error("density must be nonnegative with knots sorted over [{lo}, {hi}]")]
    BadDensity { lo: f64, hi: f64 },
    #[error("density integrates to {integral}, too far from 1 to renormalize")]
    DensityMass { integral: f64 },
    #[error("invalid extraction spec: {reason}")]
    BadExtractionSpec { reason: String },
    #[error("simulation config invalid: {reason}")]
    BadSimConfig { reason: String },
    #[error("method {method} is not valid for the {setting} setting")]
    MethodSettingMismatch { method: String, setting: String },
    #[error("io error: {0}")]
    Io(String),
    #[error("jsonl parse error at line {line}: {message}")]
    Jsonl { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
