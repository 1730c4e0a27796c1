use thiserror::Error;

use weingarten_core::GeomError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Geom(#[from] GeomError),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// 0 ok, 2 config, 3 precondition, 4 numerical, 5 verification.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Geom(g) => match g {
                GeomError::InvalidParameter(_) | GeomError::Format(_) => 2,
                GeomError::Precondition(_) => 3,
                GeomError::Numerical(_) => 4,
                GeomError::Verification(_) => 5,
            },
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
