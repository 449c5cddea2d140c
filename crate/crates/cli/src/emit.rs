//! Deterministic report emission: 17-significant-digit floats with raw-bit
//! hex companions, comma-separated tables and JSON envelopes.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::opts::Format;
use crate::CliError;

/// 17 significant digits round-trips every binary64 value.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Raw-bit companion so extended-precision results survive text round-trips
/// bit-exactly.
pub fn fmt_hex(v: f64) -> String {
    format!("0x{:016x}", v.to_bits())
}

#[derive(Debug)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            debug_assert_eq!(row.len(), self.header.len());
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Everything needed to reproduce a run travels with its report.
#[derive(Debug, Serialize)]
pub struct Envelope<T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: Vec<String>,
    pub precision_bits_used: usize,
    pub thresholds: String,
    pub report: T,
}

pub fn envelope<T: Serialize>(
    argv: &[String],
    bits_used: usize,
    thresholds: impl Into<String>,
    report: T,
) -> Envelope<T> {
    Envelope {
        tool: "supershift-lab",
        version: env!("CARGO_PKG_VERSION"),
        config: argv.to_vec(),
        precision_bits_used: bits_used,
        thresholds: thresholds.into(),
        report,
    }
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::usage(format!("cannot write to stdout: {e}")))
        }
    }
}

/// Routes JSON and CSV renditions according to `--format`/`--out`. With
/// `both`, the two files share the output stem.
pub fn emit<T: Serialize>(
    format: Format,
    out: Option<&PathBuf>,
    json_report: &Envelope<T>,
    table: Option<&Table>,
) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(json_report)
        .map_err(|e| CliError::usage(format!("serialization failed: {e}")))?
        + "\n";
    match format {
        Format::Json => write_text(out.map(|p| p.as_path()), &json),
        Format::Csv => {
            let table = table
                .ok_or_else(|| CliError::usage("this subcommand has no tabular projection"))?;
            write_text(out.map(|p| p.as_path()), &table.render())
        }
        Format::Both => {
            let base = out.ok_or_else(|| CliError::usage("--format both requires --out"))?;
            let table = table
                .ok_or_else(|| CliError::usage("this subcommand has no tabular projection"))?;
            write_text(Some(&base.with_extension("json")), &json)?;
            write_text(Some(&base.with_extension("csv")), &table.render())
        }
    }
}
