//! Versioned report envelope and atomic output.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult, EXIT_FAIL, EXIT_PASS};

pub const SCHEMA_VERSION: &str = "liemult-report/1";
pub const REPORT_DIR_ENV: &str = "LIEMULT_REPORT_DIR";
pub const DEFAULT_REPORT_DIR: &str = "liemult-reports";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// One check inside a report.
#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub name: String,
    /// `None` for purely informational records.
    pub pass: Option<bool>,
    pub data: Value,
}

impl Record {
    pub fn new(name: impl Into<String>, pass: Option<bool>, data: impl Serialize) -> Self {
        Self {
            name: name.into(),
            pass,
            data: to_value(&data),
        }
    }
}

/// A ladder or table for external plotting.
#[derive(Clone, Debug, Serialize)]
pub struct CsvBlock {
    pub name: String,
    pub text: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Envelope {
    pub schema_version: &'static str,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: Value,
    pub status: &'static str,
    pub exit_code: i32,
    pub records: Vec<Record>,
    pub csv: Vec<CsvBlock>,
    pub error: Option<ErrorInfo>,
    /// The only field that varies between identical runs.
    pub timing: Timing,
}

/// What a command produced before it is wrapped into an envelope.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub records: Vec<Record>,
    pub csv: Vec<CsvBlock>,
}

impl Outcome {
    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    /// Exit 0 iff every graded record passed.
    pub fn exit_code(&self) -> i32 {
        if self.records.iter().all(|r| r.pass != Some(false)) {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }
}

/// JSON value with non-finite floats written as `null`.
pub fn to_value(data: &impl Serialize) -> Value {
    serde_json::to_value(data).unwrap_or(Value::Null)
}

impl Envelope {
    pub fn new(
        command: &str,
        config: Value,
        result: &Result<Outcome, CliError>,
        elapsed_seconds: f64,
    ) -> Self {
        let (records, csv, exit_code, error) = match result {
            Ok(o) => (o.records.clone(), o.csv.clone(), o.exit_code(), None),
            Err(e) => (
                Vec::new(),
                Vec::new(),
                e.code,
                Some(ErrorInfo {
                    kind: e.kind.to_string(),
                    message: e.message.clone(),
                }),
            ),
        };
        let status = match (exit_code, &error) {
            (_, Some(_)) => "error",
            (EXIT_PASS, _) => "pass",
            _ => "fail",
        };
        Self {
            schema_version: SCHEMA_VERSION,
            tool: "liemult",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config,
            status,
            exit_code,
            records,
            csv,
            error,
            timing: Timing { elapsed_seconds },
        }
    }

    pub fn render(&self, format: Format) -> CliResult<String> {
        match format {
            Format::Json => serde_json::to_string_pretty(self)
                .map(|mut s| {
                    s.push('\n');
                    s
                })
                .map_err(|e| CliError::config(format!("cannot serialise report: {e}"))),
            Format::Csv => self.render_csv(),
        }
    }

    /// Flattened `path,value` rows; CSV blocks are expanded one row per line.
    fn render_csv(&self) -> CliResult<String> {
        let mut flat = Vec::new();
        flatten("", &to_value(self), &mut flat);
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| CliError::config(format!("cannot write csv: {e}"));
        w.write_record(["path", "value"]).map_err(err)?;
        for (path, value) in flat {
            w.write_record([path, value]).map_err(err)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::config(format!("cannot write csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        Value::String(s) if s.contains('\n') => {
            for (i, line) in s.lines().enumerate() {
                out.push((join(&i.to_string()), line.to_string()));
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// `--out`, else `$LIEMULT_REPORT_DIR/<command>.<ext>`, else the default
/// directory.
pub fn resolve_path(out: Option<&Path>, command: &str, format: Format) -> PathBuf {
    if let Some(p) = out {
        return p.to_path_buf();
    }
    let dir = std::env::var_os(REPORT_DIR_ENV)
        .filter(|d| !d.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_REPORT_DIR));
    dir.join(format!("{command}.{}", format.extension()))
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, text: &str) -> CliResult<()> {
    let err = |e: std::io::Error| CliError::config(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(err)?;
    tmp.write_all(text.as_bytes()).map_err(err)?;
    tmp.flush().map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

/// CSV text from a header and rows of numbers.
pub fn csv_table(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for r in rows {
        w.write_record(r.iter().map(|x| format!("{x:e}")))
            .expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv output is utf-8")
}
