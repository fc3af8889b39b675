//! Command-line front end: argument parsing, command dispatch and
//! canonical JSON / CSV reports.

pub mod commands;
pub mod config;
pub mod fieldspec;
pub mod json;

use std::ffi::OsString;
use std::fs;
use std::path::Path;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::{json, Value};

use commands::{execute, CommandError, Table};
use config::{Cli, RunConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Exit code and report of one invocation.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit_code: i32,
    /// Canonical JSON report; absent on usage errors.
    pub report: Option<String>,
    /// Whether the report went to a `--json` file.
    pub wrote_json: bool,
}

impl Outcome {
    fn usage(message: &str) -> Self {
        eprintln!("error: {message}");
        Outcome {
            exit_code: EXIT_USAGE,
            report: None,
            wrote_json: false,
        }
    }

    /// Parsed report, if any.
    pub fn report_json(&self) -> Option<Value> {
        self.report.as_deref().and_then(|s| serde_json::from_str(s).ok())
    }
}

fn write_csv(path: &Path, table: &Table) -> Result<(), String> {
    let mut w = csv::Writer::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    w.write_record(&table.header).map_err(|e| e.to_string())?;
    for row in &table.rows {
        w.write_record(row).map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())
}

/// Parses `argv` (program name first), runs the command and writes the
/// requested files.
///
/// Exit codes: 0 pass or stable, 1 failed check, instability, inconclusive
/// verdict or numerical failure, 2 usage error.
pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return Outcome {
                exit_code: code,
                report: None,
                wrote_json: false,
            };
        }
    };
    let cfg = match RunConfig::from_command(&cli.command) {
        Ok(c) => c,
        Err(msg) => return Outcome::usage(&msg),
    };

    let start = Instant::now();
    let (result, pass, table, error) = match execute(&cfg) {
        Ok(out) => (out.result, out.pass, out.table, None),
        Err(CommandError::Usage(msg)) => return Outcome::usage(&msg),
        Err(CommandError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            (Value::Null, false, None, Some(msg))
        }
    };

    let mut report = json!({
        "tool": { "name": "shrinker", "version": env!("CARGO_PKG_VERSION") },
        "command": cfg.command,
        "config": cfg.to_json(),
        "result": result,
        "pass": pass,
    });
    if let Some(msg) = error {
        report["error"] = json!(msg);
    }
    if cfg.timings {
        report["timings"] = json!({ "total_seconds": start.elapsed().as_secs_f64() });
    }
    let text = json::to_canonical(&report);

    let mut exit_code = if pass { EXIT_PASS } else { EXIT_FAIL };
    if let Some(path) = &cfg.json {
        if let Err(e) = fs::write(path, &text) {
            eprintln!("error: {}: {e}", path.display());
            exit_code = EXIT_FAIL;
        }
    }
    if let Some(path) = &cfg.csv {
        match &table {
            Some(t) => {
                if let Err(e) = write_csv(path, t) {
                    eprintln!("error: {e}");
                    exit_code = EXIT_FAIL;
                }
            }
            None => eprintln!("warning: {} has no CSV output", cfg.command),
        }
    }
    Outcome {
        exit_code,
        wrote_json: cfg.json.is_some(),
        report: Some(text),
    }
}
