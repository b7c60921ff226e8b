use thiserror::Error;

/// Every failure the pipeline can report.
///
/// The [`Error::class`] string is the stable, machine-parsable prefix the CLI
/// prints in front of a message.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("type error: {0}")]
    Type(String),

    #[error("ambiguous instantiation: {0}")]
    Ambiguous(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("missing symbol: {0}")]
    MissingSymbol(String),

    #[error("unknown word(s): {}", .0.join(", "))]
    UnknownWords(Vec<String>),

    #[error("no parse for {0:?}")]
    NoParse(String),

    #[error("lexicon errors: {}", .0.join("; "))]
    Lexicon(Vec<String>),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("json error: {0}")]
    Json(String),
}

impl Error {
    pub fn class(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax-error",
            Error::Type(_) | Error::Ambiguous(_) => "type-error",
            Error::Shape(_) => "shape-mismatch",
            Error::MissingSymbol(_) | Error::UnknownWords(_) => "missing-symbol",
            Error::NoParse(_) => "no-parse",
            Error::Lexicon(_) => "lexicon-error",
            Error::Unsupported(_) => "unsupported",
            Error::Io(_) => "io-error",
            Error::Json(_) => "json-error",
        }
    }

    pub(crate) fn syntax(pos: usize, msg: impl Into<String>) -> Self {
        Error::Syntax { pos, msg: msg.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
