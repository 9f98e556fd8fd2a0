//! Run records and their CSV/JSON serializations.

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

pub const CSV_SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub library_version: String,
    /// Task-dependent scalar outputs, keyed by name.
    pub outputs: serde_json::Value,
    /// Column names for `series`, present iff the task produces a series.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series_columns: Option<Vec<String>>,
    /// One row per time sample, matching `series_columns`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<Vec<Vec<f64>>>,
    /// Residual table from the verification suite, for the verify task.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tolerance_report: Vec<SuiteRow>,
    /// Always zero in emitted records so outputs are byte-deterministic;
    /// measured wall time goes to stderr under -v instead.
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn to_json(record: &RunRecord) -> String {
    let mut s = serde_json::to_string_pretty(record).expect("record serializes");
    s.push('\n');
    s
}

pub fn to_csv(record: &RunRecord) -> String {
    let mut out = format!("#schema={CSV_SCHEMA}\n");
    match (&record.series_columns, &record.series) {
        (Some(cols), Some(rows)) => {
            out.push_str(&cols.join(","));
            out.push('\n');
            for row in rows {
                let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        _ => {
            // scalar tasks: one key,value row per output
            out.push_str("key,value\n");
            if let serde_json::Value::Object(map) = &record.outputs {
                for (k, v) in map {
                    out.push_str(&format!("{k},{v}\n"));
                }
            }
            for row in &record.tolerance_report {
                out.push_str(&format!("suite:{},{}\n", row.name, row.residual));
            }
        }
    }
    out
}
