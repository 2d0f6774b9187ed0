//! Crate-wide error type.

/// Upper bound on the chain length handled by the dense oracle.
pub const ORACLE_MAX_SITES: usize = 12;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("state error: {0}")]
    State(String),
    #[error("degenerate posterior update: outcome has zero evidence on the grid")]
    DegenerateUpdate,
    #[error("chain of {0} sites exceeds the oracle limit of {ORACLE_MAX_SITES}")]
    OracleSize(usize),
    #[error("value {value} outside the tabulated range [{lo}, {hi}]")]
    TabulatedRange { value: f64, lo: f64, hi: f64 },
    #[error("ensemble failure: {0}")]
    Ensemble(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("config parse error: {0}")]
    TomlParse(#[from] toml::de::Error),
}

impl Error {
    /// Process exit code used by the command-line driver: 2 for bad
    /// configuration or input, 3 for runtime/numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Input(_) | Error::TomlParse(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
