use std::fmt;

use posdiff::Error;

/// Why a command stopped, and the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, configuration or parameters outside a family's domain (exit 2).
    Usage(String),
    /// A verification that ran and did not hold (exit 1).
    Check(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Check(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Check(m) => write!(f, "check failed: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let text = e.to_string();
        match e {
            Error::Domain(_)
            | Error::Parse(_)
            | Error::Window { .. }
            | Error::EmptyWindow(_)
            | Error::DuplicateNode(_)
            | Error::TooFewSamples { .. }
            | Error::Branch { .. }
            | Error::Lattice { .. }
            | Error::NotMonic(_) => Failure::Usage(text),
            Error::NonFinite
            | Error::Degenerate { .. }
            | Error::Inconsistent { .. }
            | Error::RankDeficient { .. }
            | Error::NoSolution { .. }
            | Error::Pole { .. }
            | Error::NotCommuting { .. }
            | Error::Interpolation { .. }
            | Error::NoConvergence { .. } => Failure::Check(text),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("i/o: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(format!("json: {e}"))
    }
}
