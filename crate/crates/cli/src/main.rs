mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;

use config::{parse_config_file, Cli};

/// A failure with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }
}

impl From<trilap_core::Error> for CliError {
    fn from(e: trilap_core::Error) -> Self {
        use trilap_core::Error as E;
        let code = match e {
            E::FoldChecksum { .. } => 3,
            E::NonFiniteSample { .. } | E::OutsideCover { .. } => 1,
            _ => 2,
        };
        CliError { code, message: e.to_string() }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("TRILAP_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| CliError::usage(format!("TRILAP_THREADS must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return Err(CliError::usage("TRILAP_THREADS must be a positive integer, got 0"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::runtime(e.to_string()))
}

fn run() -> Result<u8, CliError> {
    let mut cli = Cli::parse();
    if let Some(path) = cli.flags.config.clone() {
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        cli.flags.merge(&parse_config_file(&text)?)?;
    }
    configure_threads()?;
    let out = commands::dispatch(cli.command, &cli.flags)?;
    let target = cli.flags.out.as_deref().unwrap_or("-");
    match output::write(target, &out.text) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
        r => r.map_err(|e| CliError::runtime(format!("cannot write {target}: {e}")))?,
    }
    if let Some(note) = out.note {
        eprintln!("{note}");
    }
    Ok(out.status)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
