//! Command-line front end: `fairmesh <command> [flags]`.
//!
//! Every command reads its inputs, computes all results in memory and only
//! then writes its outputs, so a failing run leaves no files behind.

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;

use clap::Parser;

pub use config::{Command, FixtureKind, RunConfig};

/// A failure reported as one line on stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError(String);

impl CliError {
    pub fn new(message: impl Into<String>) -> Self {
        let message: String = message.into();
        CliError(message.split_whitespace().collect::<Vec<_>>().join(" "))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CliError {}

impl From<fairmesh::Error> for CliError {
    fn from(e: fairmesh::Error) -> Self {
        CliError::new(e.to_string())
    }
}

/// Runs a resolved configuration, writing reports to `stdout` when no
/// `--report` path is set.
pub fn run(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut plan = commands::plan(cfg)?;
    let report_text = fairmesh::io::report_text(&plan.report);
    let print = match (&cfg.report, plan.report.is_empty()) {
        (Some(path), _) => {
            plan.outputs.add(path, report_text)?;
            plan.stdout.take()
        }
        (None, false) => Some(report_text),
        (None, true) => plan.stdout.take(),
    };
    plan.outputs.commit()?;
    if let Some(text) = print {
        stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::new(format!("stdout: {e}")))?;
    }
    Ok(())
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            eprintln!("fairmesh: {}", first.trim_start_matches("error: "));
            return 2;
        }
    };
    match cfg.resolve().and_then(|cfg| run(&cfg, &mut std::io::stdout().lock())) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("fairmesh: {e}");
            1
        }
    }
}
