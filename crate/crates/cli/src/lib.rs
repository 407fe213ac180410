//! Command-line front end: argument/config-file handling, the CSV formats
//! and the subcommand implementations. The binary in `main.rs` is a thin
//! wrapper so integration tests can drive everything in-process.

pub mod commands;
pub mod config;
pub mod csv;

/// Failures of the CLI layer, split by exit code: invalid configuration
/// exits 2, everything else (I/O, runtime) exits 1.
#[derive(thiserror::Error, Debug)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Run(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) | CliError::Run(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
