use chrono::NaiveDate;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate date {date}")]
    DuplicateDate { line: usize, date: NaiveDate },
    #[error("line {line}: close must be strictly positive, got {value}")]
    NonPositivePrice { line: usize, value: f64 },
    #[error("series must contain at least 2 observations, got {0}")]
    TooFewObservations(usize),
    #[error("window {from}..={to} holds {found} observations, need at least {needed}")]
    WindowTooSparse { from: NaiveDate, to: NaiveDate, found: usize, needed: usize },
    #[error("series spans {span_days} days, shorter than the minimum window of {min_len} days")]
    SeriesTooShort { span_days: i64, min_len: i64 },
    #[error("model is singular at tau = {tau} (tau equals the critical time)")]
    SingularTime { tau: f64 },
    #[error("linear design is ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },
    #[error("no local search converged on window {t1}..={t2}")]
    FitFailed { t1: NaiveDate, t2: NaiveDate },
    #[error("no qualified LPPL fit: no bubble signal")]
    NoBubbleSignal,
    #[error("bubble index undefined: no converged fits at the latest window end")]
    IndexUndefined,
    #[error("invalid commitment record: {0}")]
    InvalidRecord(String),
    #[error("ledger violation: {0}")]
    LedgerViolation(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid document: {0}")]
    InvalidDocument(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
