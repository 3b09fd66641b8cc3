use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("register label `{0}` appears more than once")]
    LabelCollision(String),

    #[error("unknown register label `{0}`")]
    UnknownLabel(String),

    #[error("layouts do not match: {0}")]
    LayoutMismatch(String),

    #[error("invalid register `{label}`: {reason}")]
    InvalidRegister { label: String, reason: String },

    #[error("not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("generators {0} and {1} do not commute")]
    NonCommuting(usize, usize),

    #[error("stabilizer group contains -I")]
    MinusIdentity,

    #[error("generator {0} is a product of the preceding generators")]
    DependentGenerators(usize),

    #[error("invalid Pauli: {0}")]
    InvalidPauli(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
