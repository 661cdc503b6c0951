//! Table and manifest writers.

use crate::config::OutputFormat;
use crate::error::CliError;
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

/// Writes `rows` as CSV (header from the field names) or as a JSON array.
pub fn write_table<R: Serialize>(path: &Path, format: OutputFormat, rows: &[R]) -> Result<(), CliError> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_path(path)?;
            for r in rows {
                w.serialize(r)?;
            }
            w.flush().map_err(|e| CliError::io(path, e))?;
        }
        OutputFormat::Json => {
            let text = serde_json::to_string_pretty(rows)?;
            fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))?;
        }
    }
    Ok(())
}

pub fn config_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Everything a run reports besides its table.
#[derive(Debug, Default)]
pub struct Report {
    pub derived: Map<String, Value>,
}

impl Report {
    pub fn record(&mut self, key: impl Into<String>, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.derived.insert(key.into(), v);
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub command: &'a str,
    pub config_sha256: String,
    pub config: Value,
    pub versions: Map<String, Value>,
    pub wall_clock_seconds: f64,
    pub table: String,
    pub derived: &'a Map<String, Value>,
}

pub fn versions() -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("sgsim".into(), Value::String(env!("CARGO_PKG_VERSION").into()));
    m
}

pub fn write_manifest(path: &Path, manifest: &Manifest<'_>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(manifest)?;
    fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

/// `<dir>/<name>.<ext>`
pub fn output_path(dir: &Path, name: &str, ext: &str) -> PathBuf {
    dir.join(format!("{name}.{ext}"))
}
