//! The versioned report envelope shared by every command.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use animals_core::report::{any_failed, Check};

use crate::config::RunConfig;
use crate::CliError;

pub const REPORT_SCHEMA: &str = "animals.report.v1";

#[derive(Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    pub config: Value,
    /// Values taken from outside the computation, with their source.
    pub constants: Vec<Value>,
    pub checks: Vec<Check>,
    pub result: Value,
    /// `fail` iff some check failed.
    pub status: &'static str,
}

impl Report {
    pub fn new(command: &str, cfg: &RunConfig, constants: Vec<Value>, checks: Vec<Check>, result: impl Serialize) -> Report {
        let status = if any_failed(&checks) { "fail" } else { "pass" };
        Report {
            schema: REPORT_SCHEMA,
            tool_version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config: cfg.echo(),
            constants,
            checks,
            result: serde_json::to_value(result).unwrap_or_else(|e| Value::String(e.to_string())),
            status,
        }
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.status == "fail")
    }

    /// Pretty JSON to `out`, or stdout.
    pub fn emit(&self, out: Option<&Path>) -> Result<i32, CliError> {
        let text = serde_json::to_string_pretty(self).map_err(animals_core::Error::from)? + "\n";
        write_text(out, &text)?;
        Ok(self.exit_code())
    }
}

pub fn write_text(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            so.flush()?;
        }
    }
    Ok(())
}

/// CSV with the effective config as leading `#` comment lines.
pub fn csv_with_header(cfg: &RunConfig, header: &str, rows: &[String]) -> String {
    let mut s = format!("# schema: {REPORT_SCHEMA}\n# config: {}\n{header}\n", cfg.echo());
    for r in rows {
        s.push_str(r);
        s.push('\n');
    }
    s
}
