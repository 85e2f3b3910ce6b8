use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {0}: {1}")]
    Io(String, #[source] std::io::Error),

    #[error("cannot parse scenario file: {0}")]
    Parse(#[from] toml::de::Error),

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] boundwealth::Error),
}

impl CliError {
    /// 3 for numerical solver failures, 2 for everything caused by input.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if !e.is_validation() => 3,
            _ => 2,
        }
    }
}
