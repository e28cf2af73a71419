//! Command-line front end for the `ropelab` analyses.
//!
//! Every subcommand is deterministic for fixed flags. Tables go to `--out`
//! (written through a temporary file and renamed into place) or stdout.

pub mod commands;
pub mod config;
pub mod error;
pub mod pairs;
pub mod suite;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;

pub use commands::{dispatch, execute, Cli, Outcome};
pub use error::{CliError, EXIT_IO, EXIT_OK, EXIT_PROPERTY, EXIT_VALIDATION};

/// Writes `contents` to `path` atomically.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_VALIDATION,
            };
        }
    };
    match execute(&cli).and_then(|(cfg, outcome)| emit(cfg.out.as_deref(), outcome)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit(out: Option<&Path>, outcome: Outcome) -> Result<i32, CliError> {
    let (text, code) = match outcome {
        Outcome::Data(text) => (text, EXIT_OK),
        Outcome::Report { text, passed } => {
            print!("{text}");
            let code = if passed { EXIT_OK } else { EXIT_PROPERTY };
            if let Some(path) = out {
                write_atomic(path, text.as_bytes())?;
            }
            return Ok(code);
        }
    };
    match out {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })?;
        }
    }
    Ok(code)
}
