//! CSV tables and their JSON sidecars.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::{CliError, Result};

/// 17 significant digits: lossless for f64.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// One CSV file produced by a pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    /// File stem, e.g. `dos` → `dos.csv` + `dos.json`.
    pub stem: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Pipeline-specific digest stored in the sidecar.
    pub summary: Value,
}

impl Table {
    pub fn new(stem: impl Into<String>, header: Vec<String>) -> Self {
        Self {
            stem: stem.into(),
            header,
            rows: Vec::new(),
            summary: Value::Null,
        }
    }

    pub fn push_floats(&mut self, row: impl IntoIterator<Item = f64>) {
        self.rows.push(row.into_iter().map(fmt_float).collect());
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            debug_assert_eq!(r.len(), self.header.len());
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// Metadata written next to every CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub tool: String,
    pub version: String,
    pub file: String,
    pub wall_time_s: f64,
    pub config: RunConfig,
    pub summary: Value,
}

impl Sidecar {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| io_err(path, source))?;
        Ok(serde_json::from_str(&text)?)
    }
}

pub(crate) fn io_err(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes `<stem>.csv` and `<stem>.json` under `dir`; returns the CSV path.
pub fn write_table(dir: &Path, table: &Table, config: &RunConfig, wall_time_s: f64) -> Result<PathBuf> {
    let csv = dir.join(format!("{}.csv", table.stem));
    fs::write(&csv, table.to_csv()).map_err(|e| io_err(&csv, e))?;
    let sidecar = Sidecar {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        file: format!("{}.csv", table.stem),
        wall_time_s,
        config: config.clone(),
        summary: table.summary.clone(),
    };
    let json = dir.join(format!("{}.json", table.stem));
    fs::write(&json, serde_json::to_string_pretty(&sidecar)? + "\n").map_err(|e| io_err(&json, e))?;
    Ok(csv)
}
