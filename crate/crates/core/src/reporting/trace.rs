//! Per-tick position log, one JSON object per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::behaviours::Action;
use crate::error::ReportError;
use crate::harness::TestResult;

use super::{io_err, write_atomically};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Av,
    Pedestrian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceAction {
    Advance,
    Stay,
    Forward,
    Backward,
    Left,
    Right,
}

impl From<Action> for TraceAction {
    fn from(a: Action) -> Self {
        match a {
            Action::Stay => TraceAction::Stay,
            Action::Forward => TraceAction::Forward,
            Action::Backward => TraceAction::Backward,
            Action::Left => TraceAction::Left,
            Action::Right => TraceAction::Right,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceEvent {
    Trigger,
    Unavoidable,
}

/// One entity's state at the end of a tick. The AV has `entity_id == -1` and
/// reports its leading-edge row and westernmost path column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub run_index: u64,
    pub tick: u32,
    pub entity_id: i64,
    pub entity_kind: EntityKind,
    pub column: i32,
    pub row: i32,
    pub action: TraceAction,
    pub score_delta: i64,
    pub event: Option<TraceEvent>,
}

pub fn write_trace_to(results: &[TestResult], out: &mut (impl Write + ?Sized)) -> std::io::Result<()> {
    for r in results {
        for rec in &r.trace {
            serde_json::to_writer(&mut *out, rec)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Writes every record of `results` in order. On failure the partial file is
/// removed.
pub fn write_trace(results: &[TestResult], path: &Path) -> Result<(), ReportError> {
    write_atomically(path, |file| {
        let mut w = BufWriter::new(file);
        write_trace_to(results, &mut w)?;
        w.flush()
    })
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRecord>, ReportError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| ReportError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        records.push(rec);
    }
    Ok(records)
}
