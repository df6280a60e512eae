use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// A single failed configuration check, addressed by its field path
/// (e.g. `association.g_min`).
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub fields: Vec<String>,
    pub message: String,
}

impl Violation {
    pub fn new<S: Into<String>>(fields: &[&str], message: S) -> Self {
        Violation {
            fields: fields.iter().map(|f| f.to_string()).collect(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.fields.join(", "), self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {what}: expected {expected}, found {found}")]
    Shape {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("sequence must contain at least one row")]
    EmptySequence,

    #[error("training diverged: non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("target {id} diverged: {reason}")]
    TargetDiverged { id: u64, reason: String },

    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("bearing is undefined for a point at the sensor origin")]
    UndefinedBearing,

    #[error("invalid configuration: {}", join_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    /// True for numerical divergence (as opposed to bad input or config).
    pub fn is_divergence(&self) -> bool {
        match self {
            Error::NonFiniteLoss { .. } | Error::TargetDiverged { .. } => true,
            Error::AtStep { source, .. } => source.is_divergence(),
            _ => false,
        }
    }
}
