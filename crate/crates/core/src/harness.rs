//! Spawn generation, the per-test tick loop and batch aggregation.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::behaviours::{
    decide_constrained_random, decide_election, decide_proximity, decide_random, elect, Action, BehaviourKind,
    BehaviourParams, ElectionState, Percept, WalkContext,
};
use crate::error::ConfigError;
use crate::gridworld::{
    advance_av, apply_action, compute_valid_spawn_mask, AvState, GridConfig, Heading, PedestrianState, Position,
    SpawnMask,
};
use crate::reporting::trace::{EntityKind, TraceAction, TraceEvent, TraceRecord};
use crate::rng::{test_seed, SimRng, DECISION_STREAM, SPAWN_STREAM};
use crate::stats::{confidence_interval_95, mean, sample_variance};
use crate::verdict::{
    check_precondition, check_unavoidable, classify_outcome, resolve_zone_event, score_tick, Outcome, ScoreLedger,
    ZoneEvent, ZoneHit,
};

pub const MAX_AGENTS: usize = 20;
pub const DEFAULT_RUNS: usize = 1000;

/// Which agent scores feed the batch score statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreMeanMode {
    /// Every agent's final score in each successful test.
    AllAgents,
    /// Only the agent that triggered the precondition.
    TriggeringAgent,
}

impl std::str::FromStr for ScoreMeanMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "all_agents" | "all" => Ok(ScoreMeanMode::AllAgents),
            "triggering_agent" | "triggering" => Ok(ScoreMeanMode::TriggeringAgent),
            other => Err(format!("unknown score mean mode '{other}'")),
        }
    }
}

/// What happens to a test after a stopping-zone or footprint intrusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntrusionPolicy {
    /// The intrusion ends the test as unavoidable.
    Terminate,
    /// The test runs on until a trigger or the end of the road; it is
    /// unavoidable only if it expires after an intrusion.
    Continue,
}

impl std::str::FromStr for IntrusionPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "terminate" => Ok(IntrusionPolicy::Terminate),
            "continue" => Ok(IntrusionPolicy::Continue),
            other => Err(format!("unknown intrusion policy '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub behaviour: BehaviourParams,
    pub n_agents: usize,
    pub runs: usize,
    pub base_seed: u64,
    pub grid: GridConfig,
    pub score_mean_mode: ScoreMeanMode,
    pub intrusion_policy: IntrusionPolicy,
}

impl ExperimentConfig {
    pub fn new(kind: BehaviourKind, n_agents: usize) -> Self {
        Self {
            behaviour: BehaviourParams::new(kind),
            n_agents,
            runs: DEFAULT_RUNS,
            base_seed: 0,
            grid: GridConfig::default(),
            score_mean_mode: ScoreMeanMode::AllAgents,
            intrusion_policy: IntrusionPolicy::Terminate,
        }
    }

    pub fn with_runs(mut self, runs: usize) -> Self {
        self.runs = runs;
        self
    }

    pub fn with_seed(mut self, base_seed: u64) -> Self {
        self.base_seed = base_seed;
        self
    }

    pub fn with_kind(mut self, kind: BehaviourKind) -> Self {
        self.behaviour.kind = kind;
        self
    }

    pub fn with_agents(mut self, n_agents: usize) -> Self {
        self.n_agents = n_agents;
        self
    }

    /// Checks everything that does not depend on the spawn mask.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.grid.validate()?;
        self.behaviour.validate().map_err(ConfigError::InvalidParameter)?;
        if self.n_agents == 0 || self.n_agents > MAX_AGENTS {
            return Err(ConfigError::AgentCount { got: self.n_agents, max: MAX_AGENTS });
        }
        if self.runs == 0 {
            return Err(ConfigError::NoRuns);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spawn {
    pub position: Position,
    pub heading: Heading,
}

/// Draws `n_agents` distinct valid cells and a walking direction for each.
/// The stream depends only on `(base_seed, n_agents, run_index)`, so every
/// behaviour sees the same spawns for the same run.
pub fn generate_spawn_list(
    base_seed: u64,
    n_agents: usize,
    run_index: u64,
    mask: &SpawnMask,
) -> Result<Vec<Spawn>, ConfigError> {
    let mut cells = mask.valid_cells();
    if cells.len() < n_agents {
        return Err(ConfigError::InsufficientSpawns { requested: n_agents, available: cells.len() });
    }
    let mut rng = SimRng::new(test_seed(base_seed, n_agents, run_index, SPAWN_STREAM));
    // partial Fisher-Yates: the first n_agents slots end up a uniform sample
    for i in 0..n_agents {
        let j = i + rng.below((cells.len() - i) as u64) as usize;
        cells.swap(i, j);
    }
    let spawns = cells[..n_agents]
        .iter()
        .map(|&position| {
            let heading = if rng.below(2) == 0 { Heading::North } else { Heading::South };
            Spawn { position, heading }
        })
        .collect();
    Ok(spawns)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub run_index: u64,
    pub outcome: Outcome,
    pub ticks_elapsed: u32,
    /// Seconds spent inside policy decision code.
    pub decision_cpu: f64,
    pub spawns: Vec<Spawn>,
    pub trigger: Option<ZoneHit>,
    pub intrusion: Option<ZoneHit>,
    pub ledger: ScoreLedger,
    pub trace: Vec<TraceRecord>,
}

impl TestResult {
    /// Equality on everything except the wall-clock timing.
    pub fn replays(&self, other: &TestResult) -> bool {
        TestResult { decision_cpu: 0.0, ..self.clone() } == TestResult { decision_cpu: 0.0, ..other.clone() }
    }

    /// Score samples this test contributes to the batch score statistics.
    pub fn score_samples(&self, mode: ScoreMeanMode) -> Vec<f64> {
        if self.outcome != Outcome::Successful {
            return Vec::new();
        }
        match (mode, self.trigger) {
            (ScoreMeanMode::AllAgents, _) => self.ledger.totals.iter().map(|&s| s as f64).collect(),
            (ScoreMeanMode::TriggeringAgent, Some(hit)) => vec![self.ledger.totals[hit.agent_id as usize] as f64],
            (ScoreMeanMode::TriggeringAgent, None) => Vec::new(),
        }
    }
}

/// One test in progress.
pub struct Simulation<'a> {
    config: &'a ExperimentConfig,
    run_index: u64,
    spawns: Vec<Spawn>,
    av: AvState,
    peds: Vec<PedestrianState>,
    election: ElectionState,
    ledger: ScoreLedger,
    rng: SimRng,
    tick: u32,
    decision_time: Duration,
    trigger: Option<ZoneHit>,
    intrusion: Option<ZoneHit>,
    trace: Vec<TraceRecord>,
}

impl<'a> Simulation<'a> {
    pub fn new(config: &'a ExperimentConfig, run_index: u64, spawns: Vec<Spawn>) -> Self {
        let peds = spawns
            .iter()
            .enumerate()
            .map(|(id, s)| PedestrianState::new(id as u32, s.position, s.heading))
            .collect();
        Self {
            config,
            run_index,
            av: AvState::start(&config.grid),
            peds,
            election: ElectionState::default(),
            ledger: ScoreLedger::new(spawns.len()),
            rng: SimRng::new(test_seed(config.base_seed, config.n_agents, run_index, DECISION_STREAM)),
            tick: 0,
            decision_time: Duration::ZERO,
            trigger: None,
            intrusion: None,
            trace: Vec::new(),
            spawns,
        }
    }

    pub fn av(&self) -> &AvState {
        &self.av
    }

    pub fn pedestrians(&self) -> &[PedestrianState] {
        &self.peds
    }

    pub fn election(&self) -> &ElectionState {
        &self.election
    }

    fn decide_all(&mut self, percepts: &[Percept]) -> Vec<Action> {
        let params = &self.config.behaviour;
        let ctx = WalkContext { config: &self.config.grid };
        let started = Instant::now();
        if params.kind == BehaviourKind::Election {
            let candidates: Vec<(u32, Percept)> =
                self.peds.iter().zip(percepts).map(|(p, &percept)| (p.id, percept)).collect();
            self.election = elect(&candidates, params, &self.election);
        }
        let rng = &mut self.rng;
        let election = &self.election;
        let actions = self
            .peds
            .iter_mut()
            .zip(percepts)
            .map(|(ped, percept)| match params.kind {
                BehaviourKind::Random => decide_random(percept, rng),
                BehaviourKind::ConstrainedRandom => decide_constrained_random(percept, params, ped, ctx, rng),
                BehaviourKind::Proximity => decide_proximity(percept, params, ped, ctx),
                BehaviourKind::Election => decide_election(percept, election, ped, ctx),
            })
            .collect();
        self.decision_time += started.elapsed();
        actions
    }

    /// Advances one tick. Returns the outcome once the test is over.
    pub fn step(&mut self) -> Option<Outcome> {
        let grid = &self.config.grid;
        self.tick += 1;
        let tick = self.tick;

        let percepts: Vec<Percept> = self.peds.iter().map(|p| Percept::observe(p, &self.av, grid, tick)).collect();
        let actions = self.decide_all(&percepts);
        for (ped, &action) in self.peds.iter_mut().zip(&actions) {
            *ped = apply_action(ped, action, grid);
        }

        let (next_av, swept) = advance_av(&self.av, grid);
        let positions: Vec<(u32, Position)> = self.peds.iter().map(|p| (p.id, p.position)).collect();
        let trigger = check_precondition(&positions, &self.av, &swept, tick, grid);
        let intrusion = check_unavoidable(&positions, &self.av, &swept, tick, grid);
        let event = resolve_zone_event(trigger, intrusion);
        self.av = next_av;

        let scoring_trigger = match &event {
            Some(ZoneEvent::Trigger(hit)) => Some(*hit),
            _ => None,
        };
        let cells: Vec<Position> = self.peds.iter().map(|p| p.position).collect();
        let deltas = score_tick(&mut self.ledger, &cells, tick, scoring_trigger.as_ref(), grid);

        match event {
            Some(ZoneEvent::Trigger(hit)) => self.trigger = Some(hit),
            Some(ZoneEvent::Intrusion(hit)) if self.intrusion.is_none() => self.intrusion = Some(hit),
            _ => {}
        }
        let outcome = match (classify_outcome(event, &self.av, grid), self.config.intrusion_policy) {
            (Some(Outcome::Unavoidable), IntrusionPolicy::Continue) => {
                self.av.is_expired(grid).then_some(Outcome::Unavoidable)
            }
            (Some(Outcome::Expired), IntrusionPolicy::Continue) if self.intrusion.is_some() => {
                Some(Outcome::Unavoidable)
            }
            (outcome, _) => outcome,
        };
        self.record_tick(&actions, &deltas, event);
        outcome
    }

    fn record_tick(&mut self, actions: &[Action], deltas: &[i64], event: Option<ZoneEvent>) {
        self.trace.push(TraceRecord {
            run_index: self.run_index,
            tick: self.tick,
            entity_id: -1,
            entity_kind: EntityKind::Av,
            column: self.av.path_columns[0],
            row: self.av.front_row,
            action: TraceAction::Advance,
            score_delta: 0,
            event: None,
        });
        for ((ped, &action), &delta) in self.peds.iter().zip(actions).zip(deltas) {
            let event = match event {
                Some(ZoneEvent::Trigger(h)) if h.agent_id == ped.id => Some(TraceEvent::Trigger),
                Some(ZoneEvent::Intrusion(h)) if h.agent_id == ped.id => Some(TraceEvent::Unavoidable),
                _ => None,
            };
            self.trace.push(TraceRecord {
                run_index: self.run_index,
                tick: self.tick,
                entity_id: i64::from(ped.id),
                entity_kind: EntityKind::Pedestrian,
                column: ped.position.column,
                row: ped.position.row,
                action: TraceAction::from(action),
                score_delta: delta,
                event,
            });
        }
    }

    pub fn run(mut self) -> TestResult {
        let outcome = loop {
            if let Some(outcome) = self.step() {
                break outcome;
            }
        };
        TestResult {
            run_index: self.run_index,
            outcome,
            ticks_elapsed: self.tick,
            decision_cpu: self.decision_time.as_secs_f64(),
            spawns: self.spawns,
            trigger: self.trigger,
            intrusion: self.intrusion,
            ledger: self.ledger,
            trace: self.trace,
        }
    }
}

/// A validated configuration with its spawn mask.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    mask: SpawnMask,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let mask = compute_valid_spawn_mask(&config.grid);
        if mask.count() < config.n_agents {
            return Err(ConfigError::InsufficientSpawns { requested: config.n_agents, available: mask.count() });
        }
        Ok(Self { config, mask })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn mask(&self) -> &SpawnMask {
        &self.mask
    }

    pub fn spawns(&self, run_index: u64) -> Vec<Spawn> {
        generate_spawn_list(self.config.base_seed, self.config.n_agents, run_index, &self.mask)
            .expect("agent count checked against the mask at construction")
    }

    pub fn run_test(&self, run_index: u64) -> TestResult {
        Simulation::new(&self.config, run_index, self.spawns(run_index)).run()
    }

    /// Runs a test from explicit spawns, which need not be valid pavement
    /// cells. The decision stream is still keyed by `run_index`.
    pub fn run_test_with_spawns(&self, run_index: u64, spawns: Vec<Spawn>) -> TestResult {
        Simulation::new(&self.config, run_index, spawns).run()
    }

    /// All tests of the batch in run-index order, executed in parallel.
    pub fn run_all(&self) -> Vec<TestResult> {
        (0..self.config.runs as u64).into_par_iter().map(|i| self.run_test(i)).collect()
    }

    pub fn run_all_sequential(&self) -> Vec<TestResult> {
        (0..self.config.runs as u64).map(|i| self.run_test(i)).collect()
    }

    pub fn run_batch(&self) -> BatchSummary {
        BatchSummary::from_results(&self.config, &self.run_all())
    }
}

pub fn run_test(config: &ExperimentConfig, run_index: u64) -> Result<TestResult, ConfigError> {
    Ok(Experiment::new(*config)?.run_test(run_index))
}

pub fn run_batch(config: &ExperimentConfig) -> Result<BatchSummary, ConfigError> {
    Ok(Experiment::new(*config)?.run_batch())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub behaviour: BehaviourKind,
    pub n_agents: usize,
    pub runs: usize,
    pub successful: usize,
    pub unavoidable: usize,
    pub expired: usize,
    /// Fraction of runs that were successful.
    pub accuracy: f64,
    pub mean_score: Option<f64>,
    pub score_ci95: Option<f64>,
    /// Sample variance of the score samples; not part of the summary file.
    pub score_variance: Option<f64>,
    /// `mean_score * accuracy_percent / 1000`, zero without successes.
    pub combined_score: f64,
    pub mean_t_c: Option<f64>,
    pub mean_t_g: Option<f64>,
    pub t_g_ci95: Option<f64>,
    pub base_seed: u64,
}

pub fn combined_score(mean_score: Option<f64>, accuracy: f64) -> f64 {
    mean_score.map_or(0.0, |s| s * (accuracy * 100.0) / 1000.0)
}

impl BatchSummary {
    /// Aggregates results; score, t_c and t_g only count successful tests.
    pub fn from_results(config: &ExperimentConfig, results: &[TestResult]) -> Self {
        let count = |o: Outcome| results.iter().filter(|r| r.outcome == o).count();
        let successes: Vec<&TestResult> = results.iter().filter(|r| r.outcome == Outcome::Successful).collect();
        let scores: Vec<f64> = successes.iter().flat_map(|r| r.score_samples(config.score_mean_mode)).collect();
        let t_g: Vec<f64> = successes.iter().map(|r| f64::from(r.ticks_elapsed)).collect();
        let t_c: Vec<f64> = successes.iter().map(|r| r.decision_cpu).collect();

        let runs = results.len();
        let successful = successes.len();
        let accuracy = if runs == 0 { 0.0 } else { successful as f64 / runs as f64 };
        let score_ci = confidence_interval_95(&scores);
        let t_g_ci = confidence_interval_95(&t_g);
        let mean_score = score_ci.map(|(m, _)| m);
        Self {
            behaviour: config.behaviour.kind,
            n_agents: config.n_agents,
            runs,
            successful,
            unavoidable: count(Outcome::Unavoidable),
            expired: count(Outcome::Expired),
            accuracy,
            mean_score,
            score_ci95: score_ci.map(|(_, h)| h),
            score_variance: sample_variance(&scores),
            combined_score: combined_score(mean_score, accuracy),
            mean_t_c: mean(&t_c),
            mean_t_g: t_g_ci.map(|(m, _)| m),
            t_g_ci95: t_g_ci.map(|(_, h)| h),
            base_seed: config.base_seed,
        }
    }

    pub fn accuracy_percent(&self) -> f64 {
        self.accuracy * 100.0
    }
}

/// Runs every `(behaviour, n_agents)` pair, behaviour-major, using `template`
/// for everything else. Spawns are shared across behaviours by construction.
pub fn sweep(
    template: &ExperimentConfig,
    behaviours: &[BehaviourKind],
    agent_counts: impl IntoIterator<Item = usize> + Clone,
) -> Result<Vec<BatchSummary>, ConfigError> {
    let mut out = Vec::new();
    for &kind in behaviours {
        for n in agent_counts.clone() {
            out.push(run_batch(&template.with_kind(kind).with_agents(n))?);
        }
    }
    Ok(out)
}
