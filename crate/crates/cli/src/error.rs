use std::fmt;

/// Failure of a command, carrying the process exit code: 2 for input and
/// schema problems, 3 when the estimation itself is impossible.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Estimation(String),
}

impl CliError {
    pub fn input(msg: impl fmt::Display) -> Self {
        Self::Input(msg.to_string())
    }

    pub fn estimation(msg: impl fmt::Display) -> Self {
        Self::Estimation(msg.to_string())
    }

    pub fn io(e: impl fmt::Display) -> Self {
        Self::Input(e.to_string())
    }

    pub fn code(&self) -> i32 {
        match self {
            Self::Input(_) => 2,
            Self::Estimation(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Input(m) => write!(f, "input error: {m}"),
            Self::Estimation(m) => write!(f, "estimation error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
