//! Plot-ready tables: one CSV per metric with `nA` rows and one column (or
//! value/CI column pair) per behaviour.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::behaviours::BehaviourKind;
use crate::error::ReportError;

use super::fmt_opt;
use super::summary::SummaryRow;
use super::write_atomically;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotMetric {
    Accuracy,
    Score,
    Combined,
    Cpu,
    TestGeneration,
}

impl PlotMetric {
    pub const ALL: [PlotMetric; 5] =
        [PlotMetric::Accuracy, PlotMetric::Score, PlotMetric::Combined, PlotMetric::Cpu, PlotMetric::TestGeneration];

    pub fn file_name(self) -> &'static str {
        match self {
            PlotMetric::Accuracy => "accuracy.csv",
            PlotMetric::Score => "score.csv",
            PlotMetric::Combined => "combined.csv",
            PlotMetric::Cpu => "cpu.csv",
            PlotMetric::TestGeneration => "tg.csv",
        }
    }

    /// Value and optional CI half-width for one summary row.
    fn columns(self, row: &SummaryRow) -> (Option<f64>, Option<Option<f64>>) {
        match self {
            PlotMetric::Accuracy => (Some(row.accuracy), None),
            PlotMetric::Score => (row.mean_score, Some(row.score_ci95)),
            PlotMetric::Combined => (Some(row.combined_score), None),
            PlotMetric::Cpu => (row.mean_t_c_seconds, None),
            PlotMetric::TestGeneration => (row.mean_t_g_ticks, Some(row.t_g_ci95)),
        }
    }

    fn has_ci(self) -> bool {
        matches!(self, PlotMetric::Score | PlotMetric::TestGeneration)
    }
}

pub fn write_plot_table(metric: PlotMetric, rows: &[SummaryRow], out: impl Write) -> Result<(), csv::Error> {
    let behaviours: Vec<BehaviourKind> =
        BehaviourKind::ALL.into_iter().filter(|k| rows.iter().any(|r| r.behaviour == *k)).collect();
    let agent_counts: BTreeSet<usize> = rows.iter().map(|r| r.n_agents).collect();

    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["nA".to_string()];
    for k in &behaviours {
        header.push(k.name().to_string());
        if metric.has_ci() {
            header.push(format!("{}_ci95", k.name()));
        }
    }
    w.write_record(&header)?;

    for n in agent_counts {
        let mut record = vec![n.to_string()];
        for k in &behaviours {
            let row = rows.iter().find(|r| r.behaviour == *k && r.n_agents == n);
            let (value, ci) = row.map(|r| metric.columns(r)).unwrap_or((None, Some(None)));
            record.push(fmt_opt(value));
            if metric.has_ci() {
                record.push(fmt_opt(ci.flatten()));
            }
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the five metric tables into `out_dir` and returns their paths.
pub fn emit_plot_data(rows: &[SummaryRow], out_dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    std::fs::create_dir_all(out_dir).map_err(|e| super::io_err(out_dir, e))?;
    PlotMetric::ALL
        .iter()
        .map(|&metric| {
            let path = out_dir.join(metric.file_name());
            write_atomically(&path, |file| write_plot_table(metric, rows, file).map_err(std::io::Error::other))?;
            Ok(path)
        })
        .collect()
}
