//! Batch summary table, one row per `(behaviour, nA)` batch.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::behaviours::BehaviourKind;
use crate::error::ReportError;
use crate::harness::BatchSummary;

use super::{fmt_opt, fmt_sig6, write_atomically};

/// Schema tag for the summary columns, recorded in the metadata sidecar.
pub const SUMMARY_SCHEMA: &str = "avtest-summary-v1";

pub const SUMMARY_COLUMNS: [&str; 14] = [
    "behaviour",
    "nA",
    "runs",
    "successful",
    "unavoidable",
    "expired",
    "accuracy",
    "mean_score",
    "score_ci95",
    "combined_score",
    "mean_t_c_seconds",
    "mean_t_g_ticks",
    "t_g_ci95",
    "base_seed",
];

/// One parsed line of a summary file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub behaviour: BehaviourKind,
    #[serde(rename = "nA")]
    pub n_agents: usize,
    pub runs: usize,
    pub successful: usize,
    pub unavoidable: usize,
    pub expired: usize,
    pub accuracy: f64,
    pub mean_score: Option<f64>,
    pub score_ci95: Option<f64>,
    pub combined_score: f64,
    pub mean_t_c_seconds: Option<f64>,
    pub mean_t_g_ticks: Option<f64>,
    pub t_g_ci95: Option<f64>,
    pub base_seed: u64,
}

impl From<&BatchSummary> for SummaryRow {
    fn from(s: &BatchSummary) -> Self {
        Self {
            behaviour: s.behaviour,
            n_agents: s.n_agents,
            runs: s.runs,
            successful: s.successful,
            unavoidable: s.unavoidable,
            expired: s.expired,
            accuracy: s.accuracy,
            mean_score: s.mean_score,
            score_ci95: s.score_ci95,
            combined_score: s.combined_score,
            mean_t_c_seconds: s.mean_t_c,
            mean_t_g_ticks: s.mean_t_g,
            t_g_ci95: s.t_g_ci95,
            base_seed: s.base_seed,
        }
    }
}

impl SummaryRow {
    fn to_record(&self) -> [String; 14] {
        [
            self.behaviour.name().to_string(),
            self.n_agents.to_string(),
            self.runs.to_string(),
            self.successful.to_string(),
            self.unavoidable.to_string(),
            self.expired.to_string(),
            fmt_sig6(self.accuracy),
            fmt_opt(self.mean_score),
            fmt_opt(self.score_ci95),
            fmt_sig6(self.combined_score),
            fmt_opt(self.mean_t_c_seconds),
            fmt_opt(self.mean_t_g_ticks),
            fmt_opt(self.t_g_ci95),
            self.base_seed.to_string(),
        ]
    }
}

pub fn write_summary_to(summaries: &[BatchSummary], out: impl Write) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_COLUMNS)?;
    for s in summaries {
        w.write_record(SummaryRow::from(s).to_record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary(summaries: &[BatchSummary], path: &Path) -> Result<(), ReportError> {
    write_atomically(path, |file| write_summary_to(summaries, file).map_err(std::io::Error::other))
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>, ReportError> {
    let csv_err = |source| ReportError::Csv { path: path.to_path_buf(), source };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    let headers = reader.headers().map_err(csv_err)?.clone();
    if headers.iter().ne(SUMMARY_COLUMNS) {
        return Err(ReportError::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: format!("unexpected summary columns: {}", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    reader.deserialize().collect::<Result<Vec<SummaryRow>, _>>().map_err(csv_err)
}
