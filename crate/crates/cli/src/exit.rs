//! Process exit codes.

use bubblescope::Error;

pub const OK: i32 = 0;
pub const IO: i32 = 1;
pub const USAGE: i32 = 2;
pub const BAD_INPUT: i32 = 3;
pub const TOO_SHORT: i32 = 4;
pub const NO_SIGNAL: i32 = 5;
pub const MISMATCH: i32 = 6;
pub const LEDGER: i32 = 7;
pub const NUMERIC: i32 = 8;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

pub fn code_for(err: &Error) -> i32 {
    match err {
        Error::Parse { .. }
        | Error::DuplicateDate { .. }
        | Error::NonPositivePrice { .. }
        | Error::TooFewObservations(_)
        | Error::InvalidRecord(_)
        | Error::InvalidDocument(_) => BAD_INPUT,
        Error::WindowTooSparse { .. } | Error::SeriesTooShort { .. } => TOO_SHORT,
        Error::NoBubbleSignal | Error::IndexUndefined => NO_SIGNAL,
        Error::LedgerViolation(_) => LEDGER,
        Error::SingularTime { .. } | Error::IllConditioned { .. } | Error::FitFailed { .. } => NUMERIC,
        Error::InvalidConfig(_) => USAGE,
        Error::Io(_) => IO,
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::new(code_for(&err), err.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure::new(IO, err.to_string())
    }
}
