//! Flat report records shared by every command, with CSV and JSON writers.

use std::io::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::identities::ResidualReport;

/// Fixed CSV header.
pub const CSV_COLUMNS: [&str; 8] =
    ["command", "model", "param_digest", "rel_residual", "abs_residual", "grid", "seed", "wall_ms"];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// First 16 hex digits of the SHA-256 of a JSON value's compact form.
pub fn digest(value: &serde_json::Value) -> String {
    let hash = Sha256::digest(value.to_string().as_bytes());
    hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// One row of output. `detail` only goes to JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub command: String,
    pub model: String,
    pub param_digest: String,
    pub rel_residual: f64,
    pub abs_residual: f64,
    pub grid: String,
    pub seed: Option<u64>,
    pub wall_ms: u64,
    pub detail: serde_json::Value,
}

impl Record {
    pub fn from_residual(command: &str, r: &ResidualReport) -> Self {
        Record {
            command: command.to_string(),
            model: r.model.to_string(),
            param_digest: r.param_digest(),
            rel_residual: r.rel_residual,
            abs_residual: r.abs_residual,
            grid: r.grid.to_string(),
            seed: r.seed,
            wall_ms: 0,
            detail: serde_json::to_value(r).expect("reports serialize"),
        }
    }

    /// A row whose digest covers `detail`.
    pub fn new(
        command: &str,
        model: String,
        rel_residual: f64,
        abs_residual: f64,
        grid: String,
        seed: Option<u64>,
        detail: serde_json::Value,
    ) -> Self {
        let param_digest = digest(&serde_json::json!({ "command": command, "model": model, "detail": detail }));
        Record {
            command: command.to_string(),
            model,
            param_digest,
            rel_residual,
            abs_residual,
            grid,
            seed,
            wall_ms: 0,
            detail,
        }
    }

    /// NaN never passes.
    pub fn passes(&self, threshold: f64) -> bool {
        self.rel_residual < threshold
    }

    fn key(&self) -> (&str, &str, &str, &str, Option<u64>) {
        (&self.command, &self.model, &self.param_digest, &self.grid, self.seed)
    }
}

/// Stable sort by `(command, model, param_digest, grid, seed)`.
pub fn sort_records(records: &mut [Record]) {
    records.sort_by(|a, b| a.key().cmp(&b.key()));
}

pub fn failures(records: &[Record], threshold: f64) -> Vec<&Record> {
    records.iter().filter(|r| !r.passes(threshold)).collect()
}

pub fn write_csv<W: Write>(out: W, records: &[Record]) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        w.write_record([
            r.command.clone(),
            r.model.clone(),
            r.param_digest.clone(),
            format!("{:e}", r.rel_residual),
            format!("{:e}", r.abs_residual),
            r.grid.clone(),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
            r.wall_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(mut out: W, records: &[Record]) -> Result<(), ReportError> {
    serde_json::to_writer_pretty(&mut out, records)?;
    out.write_all(b"\n")?;
    Ok(())
}
