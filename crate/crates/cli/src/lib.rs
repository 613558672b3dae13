//! Library side of the `weyllab` command: configuration, commands and the
//! acceptance suite.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod output;

use std::io::Write;

use clap::Parser;
use weyllab_core::Error;

pub use commands::Cli;
pub use config::Config;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;
pub const EXIT_VERIFY: i32 = 5;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Resource(_) | Error::SpectrumRange { .. } | Error::HeatTime { .. } => EXIT_RESOURCE,
        Error::Numeric { .. } => EXIT_NUMERIC,
        Error::Config(_) | Error::Validation(_) | Error::Domain(_) | Error::Unsupported(_) => EXIT_CONFIG,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "domain",
        Error::Resource(_) => "resource",
        Error::SpectrumRange { .. } => "spectrum_range",
        Error::HeatTime { .. } => "heat_time",
        Error::Numeric { .. } => "numeric",
        Error::Unsupported(_) => "unsupported",
        Error::Config(_) => "config",
        Error::Validation(_) => "validation",
    }
}

fn report(err: &mut dyn Write, kind: &str, message: &str) {
    let body = serde_json::json!({ "error": kind, "message": message });
    let _ = writeln!(err, "{body}");
}

/// Parses `args`, runs the command, writes primary output to `out` (or the
/// `--out` file) and errors to `err`. Returns the process exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            report(err, "usage", &e.to_string());
            return EXIT_CONFIG;
        }
    };
    let cfg = match &cli.config {
        Some(p) => match Config::load(&p.to_string_lossy()) {
            Ok(c) => c,
            Err(e) => {
                report(err, error_kind(&e), &e.to_string());
                return exit_code(&e);
            }
        },
        None => Config::default(),
    };
    if let Some(n) = cli.threads.or(cfg.threads) {
        if n == 0 {
            report(err, "config", "threads must be at least 1");
            return EXIT_CONFIG;
        }
        // the global pool can be set once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match commands::execute(&cli, &cfg) {
        Ok(outcome) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &outcome.text).map_err(|e| e.to_string()),
                None => out.write_all(outcome.text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                report(err, "io", &e);
                return EXIT_CONFIG;
            }
            if outcome.verified {
                EXIT_OK
            } else {
                EXIT_VERIFY
            }
        }
        Err(e) => {
            report(err, error_kind(&e), &e.to_string());
            exit_code(&e)
        }
    }
}
