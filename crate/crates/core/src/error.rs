use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors surfaced by parsing, ingestion and measurement.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {position}: {message}")]
    Syntax { position: Position, message: String },

    #[error("unknown operator `{token}` at {position}")]
    UnknownOperator { token: String, position: Position },

    #[error("invalid trace: {0}")]
    InvalidTrace(String),

    #[error("instant {instant} out of range for a trace of length {len}")]
    InstantOutOfRange { instant: usize, len: usize },

    #[error("unknown template `{0}`")]
    UnknownTemplate(String),

    #[error("template {template} expects {expected} argument(s), got {got}")]
    TemplateArity {
        template: String,
        expected: usize,
        got: usize,
    },

    #[error("template {template} does not accept the same activity twice (`{activity}`)")]
    DuplicateArgument { template: String, activity: String },

    #[error("a specification needs at least one rule")]
    EmptySpecification,

    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),

    #[error("missing column `{0}` in CSV header")]
    MissingColumn(String),

    #[error("cannot parse timestamp `{value}` on line {line}")]
    Timestamp { value: String, line: u64 },

    #[error("event log contains no complete case")]
    EmptyLog,

    #[error("malformed XES: {0}")]
    Xes(String),

    #[error("event {event} of trace {trace} has no concept:name attribute")]
    MissingActivity { trace: usize, event: usize },

    #[error("specification file: {0}")]
    SpecFile(String),

    #[error("window of {size} traces does not fit a log of {traces} traces")]
    WindowTooLarge { size: usize, traces: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Location in a single-line formula string: byte offset plus a flag for end of input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    Offset(usize),
    EndOfInput,
}

impl std::fmt::Display for Position {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Position::Offset(o) => write!(f, "offset {o}"),
            Position::EndOfInput => f.write_str("end of input"),
        }
    }
}
