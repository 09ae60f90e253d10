//! Layered settings: built-in defaults, then a `key = value` file, then
//! command-line flags.

use std::path::{Path, PathBuf};

use crate::behaviours::BehaviourKind;
use crate::error::{ConfigError, ReportError};
use crate::harness::{ExperimentConfig, MAX_AGENTS};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "AVTEST_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    /// Template for every batch; `behaviour.kind` and `n_agents` are
    /// overridden per batch in a sweep.
    pub experiment: ExperimentConfig,
    pub run_index: u64,
    pub na_min: usize,
    pub na_max: usize,
    pub behaviours: Vec<BehaviourKind>,
    pub out_dir: PathBuf,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            experiment: ExperimentConfig::new(BehaviourKind::Random, 1),
            run_index: 0,
            na_min: 1,
            na_max: MAX_AGENTS,
            behaviours: BehaviourKind::ALL.to_vec(),
            out_dir: default_out_dir(),
        }
    }
}

pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| ConfigError::InvalidParameter(format!("{key}: {e}")))
}

impl Settings {
    /// Applies one setting. Keys use the long flag names with `_` or `-`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        let e = &mut self.experiment;
        match key.as_str() {
            "behaviour" | "behavior" => e.behaviour.kind = parse(&key, value)?,
            "behaviours" | "behaviors" => {
                self.behaviours = value.split(',').map(|v| parse(&key, v.trim())).collect::<Result<_, _>>()?;
            }
            "agents" | "n_agents" => e.n_agents = parse(&key, value)?,
            "runs" => e.runs = parse(&key, value)?,
            "seed" | "base_seed" => e.base_seed = parse(&key, value)?,
            "run_index" => self.run_index = parse(&key, value)?,
            "trigger_mode" => e.behaviour.trigger_mode = parse(&key, value)?,
            "cross_probability" => e.behaviour.cross_probability = parse(&key, value)?,
            "fixed_radius" => e.behaviour.fixed_radius = parse(&key, value)?,
            "zone_near_offset" => e.behaviour.zone_near_offset = parse(&key, value)?,
            "zone_far_offset" => e.behaviour.zone_far_offset = parse(&key, value)?,
            "score_mean_mode" => e.score_mean_mode = parse(&key, value)?,
            "intrusion_policy" => e.intrusion_policy = parse(&key, value)?,
            "width" => e.grid.width = parse(&key, value)?,
            "length" => e.grid.length = parse(&key, value)?,
            "cell_size" => e.grid.cell_size = parse(&key, value)?,
            "av_speed" => e.grid.av_speed = parse(&key, value)?,
            "ped_speed" => e.grid.ped_speed = parse(&key, value)?,
            "tick_duration" => e.grid.tick_duration = parse(&key, value)?,
            "stopping_distance" => e.grid.stopping_distance = parse(&key, value)?,
            "precondition_depth" => e.grid.precondition_depth = parse(&key, value)?,
            "na_min" => self.na_min = parse(&key, value)?,
            "na_max" => self.na_max = parse(&key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            other => return Err(ConfigError::InvalidParameter(format!("unknown setting '{other}'"))),
        }
        Ok(())
    }

    /// Applies a `key = value` document. Blank lines and `#` comments are
    /// ignored.
    pub fn apply_str(&mut self, text: &str, origin: &Path) -> Result<(), ReportError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| ReportError::Parse { path: origin.to_path_buf(), line: i + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| parse_err(format!("expected key = value, got '{line}'")))?;
            self.set(key, value).map_err(|e| parse_err(e.to_string()))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ReportError> {
        let text = std::fs::read_to_string(path).map_err(|e| super::io_err(path, e))?;
        self.apply_str(&text, path)
    }

    pub fn agent_range(&self) -> Result<std::ops::RangeInclusive<usize>, ConfigError> {
        if self.na_min == 0 || self.na_max > MAX_AGENTS || self.na_min > self.na_max {
            return Err(ConfigError::InvalidParameter(format!(
                "agent range {}..={} must lie within 1..={MAX_AGENTS}",
                self.na_min, self.na_max
            )));
        }
        Ok(self.na_min..=self.na_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behaviours::TriggerMode;
    use crate::harness::ScoreMeanMode;

    #[test]
    fn file_then_flags() {
        let mut s = Settings::default();
        let text = "# experiment\nbehaviour = election\nagents=5\nruns = 50 # short\ntrigger-mode = kinematic\n";
        s.apply_str(text, Path::new("test.cfg")).unwrap();
        assert_eq!(s.experiment.behaviour.kind, BehaviourKind::Election);
        assert_eq!(s.experiment.n_agents, 5);
        assert_eq!(s.experiment.runs, 50);
        assert_eq!(s.experiment.behaviour.trigger_mode, TriggerMode::Kinematic);
        s.set("agents", "3").unwrap();
        assert_eq!(s.experiment.n_agents, 3);
        s.set("score_mean_mode", "triggering_agent").unwrap();
        assert_eq!(s.experiment.score_mean_mode, ScoreMeanMode::TriggeringAgent);
        s.set("behaviours", "random, proximity").unwrap();
        assert_eq!(s.behaviours, vec![BehaviourKind::Random, BehaviourKind::Proximity]);
    }

    #[test]
    fn bad_lines_are_located() {
        let mut s = Settings::default();
        let err = s.apply_str("runs = 5\nnonsense\n", Path::new("x.cfg")).unwrap_err();
        assert!(matches!(err, ReportError::Parse { line: 2, .. }), "{err}");
        let err = s.apply_str("colour = blue\n", Path::new("x.cfg")).unwrap_err();
        assert!(err.to_string().contains("unknown setting"));
        assert!(s.set("agents", "many").is_err());
    }

    #[test]
    fn agent_range_checks() {
        let mut s = Settings::default();
        assert_eq!(s.agent_range().unwrap(), 1..=20);
        s.na_min = 0;
        assert!(s.agent_range().is_err());
        s.na_min = 5;
        s.na_max = 4;
        assert!(s.agent_range().is_err());
    }
}
