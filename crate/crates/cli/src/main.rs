use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dcesim::{run_file, Command};

/// Photon creation in a cavity with time-varying optical length.
#[derive(Parser, Debug)]
#[command(name = "dcesim", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Destination CSV file.
    #[arg(long)]
    out: PathBuf,
    /// Patch the config before validation, e.g. `drive.gamma=1e-4`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DCESIM_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run_file(cli.command, &cli.config, &cli.out, &cli.overrides) {
        Ok(table) => {
            log::info!("wrote {} rows to {}", table.rows.len(), cli.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("dcesim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
