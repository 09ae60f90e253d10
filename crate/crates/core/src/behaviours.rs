//! Pedestrian decision policies.
//!
//! Two random policies ([`decide_random`], [`decide_constrained_random`]) and
//! two perception-directed ones ([`decide_proximity`], [`decide_election`]).
//! Every policy maps a start-of-tick [`Percept`] plus the agent's own walking
//! state to one [`Action`]; the harness applies all actions of a tick together.

use serde::{Deserialize, Serialize};

use crate::gridworld::{classify_cell, AvState, GridConfig, Heading, PedestrianState, Position};
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Stay,
    Forward,
    Backward,
    Left,
    Right,
}

impl Action {
    pub const ALL: [Action; 5] = [Action::Stay, Action::Forward, Action::Backward, Action::Left, Action::Right];

    pub fn name(self) -> &'static str {
        match self {
            Action::Stay => "stay",
            Action::Forward => "forward",
            Action::Backward => "backward",
            Action::Left => "left",
            Action::Right => "right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BehaviourKind {
    Random,
    ConstrainedRandom,
    Proximity,
    Election,
}

impl BehaviourKind {
    pub const ALL: [BehaviourKind; 4] =
        [BehaviourKind::Random, BehaviourKind::ConstrainedRandom, BehaviourKind::Proximity, BehaviourKind::Election];

    pub fn name(self) -> &'static str {
        match self {
            BehaviourKind::Random => "random",
            BehaviourKind::ConstrainedRandom => "constrained_random",
            BehaviourKind::Proximity => "proximity",
            BehaviourKind::Election => "election",
        }
    }

    pub fn is_directed(self) -> bool {
        matches!(self, BehaviourKind::Proximity | BehaviourKind::Election)
    }
}

impl std::fmt::Display for BehaviourKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BehaviourKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "random" => Ok(BehaviourKind::Random),
            "constrained_random" | "constrained" => Ok(BehaviourKind::ConstrainedRandom),
            "proximity" => Ok(BehaviourKind::Proximity),
            "election" => Ok(BehaviourKind::Election),
            other => Err(format!("unknown behaviour '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriggerMode {
    /// Cross once the AV is within `fixed_radius` cells and still approaching.
    FixedRadius,
    /// Cross once the AV is close enough that a straight crossing meets the
    /// precondition zone.
    Kinematic,
}

impl std::str::FromStr for TriggerMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "fixed_radius" | "radius" => Ok(TriggerMode::FixedRadius),
            "kinematic" => Ok(TriggerMode::Kinematic),
            other => Err(format!("unknown trigger mode '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BehaviourParams {
    pub kind: BehaviourKind,
    /// Per-tick probability that a constrained-random walker starts crossing.
    pub cross_probability: f64,
    /// Defaults to [`TriggerMode::FixedRadius`].
    pub trigger_mode: TriggerMode,
    /// Euclidean trigger radius in cells for [`TriggerMode::FixedRadius`].
    pub fixed_radius: f64,
    /// Rows from the AV front to the near edge of the precondition zone.
    pub zone_near_offset: i32,
    /// Rows from the AV front to the far edge of the precondition zone.
    pub zone_far_offset: i32,
}

impl BehaviourParams {
    pub fn new(kind: BehaviourKind) -> Self {
        Self {
            kind,
            cross_probability: 0.1,
            trigger_mode: TriggerMode::FixedRadius,
            fixed_radius: 25.0,
            zone_near_offset: 9,
            zone_far_offset: 14,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.cross_probability) {
            return Err(format!("cross_probability must be in [0, 1], got {}", self.cross_probability));
        }
        if self.fixed_radius.is_nan() || self.fixed_radius <= 0.0 {
            return Err(format!("fixed_radius must be positive, got {}", self.fixed_radius));
        }
        if self.zone_near_offset > self.zone_far_offset {
            return Err("zone_near_offset exceeds zone_far_offset".into());
        }
        Ok(())
    }
}

/// What an agent observes at the start of a tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Percept {
    pub self_position: Position,
    pub heading: Heading,
    pub av_front_row: i32,
    pub av_path_columns: [i32; 2],
    /// Perceived AV speed in cells per tick.
    pub av_speed: i32,
    pub tick: u32,
    /// Euclidean distance in cells from the agent to the nearest AV front cell.
    pub distance_to_av: f64,
    /// Agent row minus AV front row; positive when the AV is approaching.
    pub longitudinal_gap: i32,
    pub lateral_cells_to_path: i32,
    pub in_road: bool,
}

impl Percept {
    pub fn observe(ped: &PedestrianState, av: &AvState, config: &GridConfig, tick: u32) -> Self {
        let lateral = av.lateral_cells_to_path(ped.position.column);
        let gap = ped.position.row - av.front_row;
        let distance = f64::from(lateral).hypot(f64::from(gap));
        let in_road = classify_cell(config, ped.position).map(|k| k.is_road()).unwrap_or(false);
        Self {
            self_position: ped.position,
            heading: ped.heading,
            av_front_row: av.front_row,
            av_path_columns: av.path_columns,
            av_speed: config.av_speed,
            tick,
            distance_to_av: distance,
            longitudinal_gap: gap,
            lateral_cells_to_path: lateral,
            in_road,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ElectionState {
    pub elected_id: Option<u32>,
    pub election_closed: bool,
}

/// Per-agent context the policies need besides the percept.
#[derive(Debug, Clone, Copy)]
pub struct WalkContext<'a> {
    pub config: &'a GridConfig,
}

/// Whether the AV is close enough for a directed agent to start crossing.
pub fn trigger_holds(percept: &Percept, params: &BehaviourParams) -> bool {
    let gap = percept.longitudinal_gap;
    if gap <= 0 {
        return false;
    }
    match params.trigger_mode {
        TriggerMode::FixedRadius => percept.distance_to_av <= params.fixed_radius,
        TriggerMode::Kinematic => gap <= percept.av_speed * percept.lateral_cells_to_path + params.zone_far_offset,
    }
}

pub fn decide_random(_percept: &Percept, rng: &mut SimRng) -> Action {
    Action::ALL[rng.below(Action::ALL.len() as u64) as usize]
}

/// One pavement step forward, turning round at either end of the road.
fn walk(state: &mut PedestrianState, config: &GridConfig) -> Action {
    let next_row = state.position.row + state.heading.row_step() * config.ped_speed;
    if !(0..config.length).contains(&next_row) {
        state.heading = state.heading.reversed();
    }
    Action::Forward
}

fn lateral_towards(heading: Heading, from: i32, to: i32) -> Action {
    if (to - from).signum() == heading.right_step() {
        Action::Right
    } else {
        Action::Left
    }
}

/// Opposite-pavement kerb column for an agent currently at `column`.
fn opposite_kerb(column: i32, config: &GridConfig) -> i32 {
    if column * 2 < config.width {
        config.east_kerb_column()
    } else {
        config.west_kerb_column()
    }
}

fn begin_crossing(state: &mut PedestrianState, config: &GridConfig) {
    state.crossing_target = Some(opposite_kerb(state.position.column, config));
}

/// Continues a crossing in progress. Returns `None` once the target column
/// has been reached, after clearing the crossing.
fn crossing_step(state: &mut PedestrianState) -> Option<Action> {
    let target = state.crossing_target?;
    if state.position.column == target {
        state.crossing_target = None;
        state.crossings += 1;
        return None;
    }
    Some(lateral_towards(state.heading, state.position.column, target))
}

pub fn decide_constrained_random(
    _percept: &Percept,
    params: &BehaviourParams,
    state: &mut PedestrianState,
    ctx: WalkContext<'_>,
    rng: &mut SimRng,
) -> Action {
    if let Some(step) = crossing_step(state) {
        return step;
    }
    if rng.chance(params.cross_probability) {
        begin_crossing(state, ctx.config);
        if let Some(step) = crossing_step(state) {
            return step;
        }
    }
    walk(state, ctx.config)
}

pub fn decide_proximity(
    percept: &Percept,
    params: &BehaviourParams,
    state: &mut PedestrianState,
    ctx: WalkContext<'_>,
) -> Action {
    if let Some(step) = crossing_step(state) {
        return step;
    }
    if trigger_holds(percept, params) {
        begin_crossing(state, ctx.config);
        if let Some(step) = crossing_step(state) {
            return step;
        }
    }
    walk(state, ctx.config)
}

/// Runs one election round. Among agents whose trigger holds, the one nearest
/// the AV wins (lowest id on ties); once someone is elected the election stays
/// closed for the rest of the test.
pub fn elect(candidates: &[(u32, Percept)], params: &BehaviourParams, election: &ElectionState) -> ElectionState {
    if election.election_closed {
        return *election;
    }
    let winner = candidates
        .iter()
        .filter(|(_, p)| trigger_holds(p, params))
        .min_by(|(ia, a), (ib, b)| a.distance_to_av.total_cmp(&b.distance_to_av).then(ia.cmp(ib)));
    match winner {
        Some(&(id, _)) => ElectionState { elected_id: Some(id), election_closed: true },
        None => *election,
    }
}

pub fn decide_election(
    _percept: &Percept,
    election: &ElectionState,
    state: &mut PedestrianState,
    ctx: WalkContext<'_>,
) -> Action {
    if let Some(step) = crossing_step(state) {
        return step;
    }
    if election.elected_id == Some(state.id) && state.crossings == 0 {
        begin_crossing(state, ctx.config);
        if let Some(step) = crossing_step(state) {
            return step;
        }
    }
    walk(state, ctx.config)
}
