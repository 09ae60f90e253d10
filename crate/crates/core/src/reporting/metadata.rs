//! Sidecar describing how an output set was produced.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::behaviours::BehaviourKind;
use crate::error::ReportError;
use crate::harness::ExperimentConfig;
use crate::rng::GENERATOR_ID;

use super::summary::SUMMARY_SCHEMA;
use super::write_atomically;

pub const METADATA_FILE: &str = "metadata.json";
pub const TRACE_SCHEMA: &str = "avtest-trace-v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub artifact_version: String,
    pub generator: String,
    pub base_seed: u64,
    pub config: ExperimentConfig,
    pub behaviours: Vec<BehaviourKind>,
    pub agent_counts: Vec<usize>,
    pub summary_schema: String,
    pub trace_schema: String,
}

impl Metadata {
    pub fn new(config: &ExperimentConfig, behaviours: &[BehaviourKind], agent_counts: &[usize]) -> Self {
        Self {
            artifact_version: crate::ARTIFACT_VERSION.to_string(),
            generator: GENERATOR_ID.to_string(),
            base_seed: config.base_seed,
            config: *config,
            behaviours: behaviours.to_vec(),
            agent_counts: agent_counts.to_vec(),
            summary_schema: SUMMARY_SCHEMA.to_string(),
            trace_schema: TRACE_SCHEMA.to_string(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), ReportError> {
        write_atomically(path, |mut file| {
            serde_json::to_writer_pretty(&mut file, self).map_err(std::io::Error::other)?;
            file.write_all(b"\n")
        })
    }

    pub fn read(path: &Path) -> Result<Self, ReportError> {
        let text = std::fs::read_to_string(path).map_err(|e| super::io_err(path, e))?;
        serde_json::from_str(&text).map_err(|source| ReportError::Json { path: path.to_path_buf(), source })
    }
}
