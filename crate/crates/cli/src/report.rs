//! Report assembly and serialization. Everything is built in input order, so
//! identical inputs give byte-identical output regardless of scheduling.

use std::io::Write;

use serde::Serialize;

use crate::config::Format;
use crate::error::CliError;

/// A rectangular table for CSV output.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Column names `prefix1 … prefixN`.
pub fn indexed(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).map(move |i| format!("{prefix}{i}"))
}

pub fn cells(values: &[f64]) -> impl Iterator<Item = String> + '_ {
    values.iter().map(|v| v.to_string())
}

pub struct Outcome {
    pub passed: bool,
    pub json: serde_json::Value,
    pub table: Table,
}

impl Outcome {
    pub fn new<R: Serialize>(passed: bool, report: &R, table: Table) -> Result<Self, CliError> {
        Ok(Outcome {
            passed,
            json: serde_json::to_value(report)?,
            table,
        })
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(&self.json)?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.table.header)?;
                for row in &self.table.rows {
                    w.write_record(row)?;
                }
                w.into_inner().map_err(|e| CliError::Runtime(format!("csv: {e}")))
            }
        }
    }
}

/// Writes to the file if given, stdout otherwise.
pub fn emit(bytes: &[u8], out: Option<&std::path::Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}
