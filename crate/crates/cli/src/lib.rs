//! Config-driven runner for `dcesim-core`: JSON run configs in, CSV tables
//! out.

pub mod config;
pub mod scenario;
pub mod table;

use std::path::Path;

pub use config::{parse_config, parse_config_with_overrides, ConfigError, RunConfig};
pub use scenario::{run_scenario, Command, ScenarioError};
pub use table::{read_table, write_table, ResultTable, TableError};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Table(#[from] TableError),
}

impl CliError {
    /// 2 for config errors, 3 for numerical failures, 4 for I/O errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Scenario(ScenarioError::Config { .. }) => 2,
            CliError::Scenario(ScenarioError::Numerical { .. }) => 3,
            CliError::Io { .. } => 4,
            CliError::Table(TableError::Shape(_)) => 3,
            CliError::Table(_) => 4,
        }
    }
}

/// Reads the config at `config_path`, runs `command` and writes the table to
/// `out_path`.
pub fn run_file(command: Command, config_path: &Path, out_path: &Path, overrides: &[String]) -> Result<ResultTable, CliError> {
    let text = std::fs::read(config_path).map_err(|source| CliError::Io {
        path: config_path.display().to_string(),
        source,
    })?;
    let cfg = parse_config_with_overrides(&text, overrides)?;
    log::info!("running {} with config {}", command.name(), cfg.hash());
    let table = run_scenario(&cfg, command)?;
    write_table(&table, out_path).map_err(|e| match e {
        TableError::Io(source) => CliError::Io {
            path: out_path.display().to_string(),
            source,
        },
        other => CliError::Table(other),
    })?;
    Ok(table)
}
