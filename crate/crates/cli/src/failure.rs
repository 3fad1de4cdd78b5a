//! Errors that end a command, with their exit status.

use tcoarse::{BallError, CacheError, EndsError, FsError, HammingError, SequenceError};

pub const PASS: u8 = 0;
pub const FAIL: u8 = 1;
pub const EXHAUSTED: u8 = 2;
pub const INVALID: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: INVALID,
            message: message.into(),
        }
    }

    pub fn exhausted(message: impl Into<String>) -> Self {
        Self {
            code: EXHAUSTED,
            message: message.into(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.code {
            EXHAUSTED => "exhausted",
            INVALID => "invalid_input",
            _ => "failed",
        }
    }
}

impl From<SequenceError> for Failure {
    fn from(e: SequenceError) -> Self {
        match e {
            SequenceError::Overflow { .. } => Self::exhausted(e.to_string()),
            _ => Self::invalid(e.to_string()),
        }
    }
}

impl From<BallError> for Failure {
    fn from(e: BallError) -> Self {
        match e {
            BallError::Sequence(s) => s.into(),
            BallError::EmptyWindow => Self::invalid(e.to_string()),
            BallError::CapExceeded { .. }
            | BallError::CoefficientOverflow { .. }
            | BallError::OutsideWindow(_)
            | BallError::TooShallow { .. } => Self::exhausted(e.to_string()),
        }
    }
}

impl From<CacheError> for Failure {
    fn from(e: CacheError) -> Self {
        match e {
            CacheError::Ball(b) => b.into(),
            CacheError::Group(_) => Self::invalid(e.to_string()),
            _ => Self::exhausted(format!("layer cache: {e}")),
        }
    }
}

impl From<FsError> for Failure {
    fn from(e: FsError) -> Self {
        match e {
            FsError::Sequence(s) => s.into(),
            FsError::TooShallow { .. } | FsError::BudgetExhausted { .. } => Self::exhausted(e.to_string()),
            _ => Self::invalid(e.to_string()),
        }
    }
}

impl From<HammingError> for Failure {
    fn from(e: HammingError) -> Self {
        match e {
            HammingError::TooShallow { .. } => Self::exhausted(e.to_string()),
            HammingError::Fs(f) => f.into(),
            _ => Self::invalid(e.to_string()),
        }
    }
}

impl From<EndsError> for Failure {
    fn from(e: EndsError) -> Self {
        match e {
            EndsError::Ball(b) => b.into(),
            EndsError::WindowTooShallow { .. } | EndsError::BudgetExhausted { .. } => Self::exhausted(e.to_string()),
            _ => Self::invalid(e.to_string()),
        }
    }
}
