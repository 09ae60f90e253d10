//! Assertion-precondition monitor, test outcome and agent scoring.

use serde::{Deserialize, Serialize};

use crate::gridworld::{classify_cell, zones_at, AvState, GridConfig, Position};

pub const LIVING_COST: i64 = -1;
pub const ROAD_PENALTY: i64 = -5;
pub const ZONE_REWARD: i64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// A pedestrian entered the precondition zone.
    Successful,
    /// A pedestrian entered the stopping zone or the AV body first.
    Unavoidable,
    /// The AV reached the end of the road.
    Expired,
}

/// A pedestrian found inside a zone during the AV sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZoneHit {
    pub agent_id: u32,
    pub tick: u32,
    /// Index into the tick's swept front list.
    pub sweep_step: usize,
}

fn first_hit(
    peds: &[(u32, Position)],
    swept_fronts: &[i32],
    tick: u32,
    mut inside: impl FnMut(i32, Position) -> bool,
) -> Option<ZoneHit> {
    for (sweep_step, &front) in swept_fronts.iter().enumerate() {
        let mut best: Option<u32> = None;
        for &(id, pos) in peds {
            if inside(front, pos) && best.is_none_or(|b| id < b) {
                best = Some(id);
            }
        }
        if let Some(agent_id) = best {
            return Some(ZoneHit { agent_id, tick, sweep_step });
        }
    }
    None
}

/// First pedestrian inside the precondition zone, scanning sweep steps in
/// ascending order and agents by ascending id within a step.
pub fn check_precondition(
    peds: &[(u32, Position)],
    av: &AvState,
    swept_fronts: &[i32],
    tick: u32,
    config: &GridConfig,
) -> Option<ZoneHit> {
    first_hit(peds, swept_fronts, tick, |front, pos| zones_at(av, front, config).precondition.contains(pos))
}

/// First pedestrian inside the stopping zone or under the AV body.
pub fn check_unavoidable(
    peds: &[(u32, Position)],
    av: &AvState,
    swept_fronts: &[i32],
    tick: u32,
    config: &GridConfig,
) -> Option<ZoneHit> {
    first_hit(peds, swept_fronts, tick, |front, pos| {
        zones_at(av, front, config).stopping.contains(pos) || av.footprint_at(front).contains(pos)
    })
}

/// Zone event that decides the tick, if any. A precondition hit wins unless
/// an intrusion happened at a strictly earlier sweep step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZoneEvent {
    Trigger(ZoneHit),
    Intrusion(ZoneHit),
}

pub fn resolve_zone_event(trigger: Option<ZoneHit>, intrusion: Option<ZoneHit>) -> Option<ZoneEvent> {
    match (trigger, intrusion) {
        (Some(t), Some(u)) if u.sweep_step < t.sweep_step => Some(ZoneEvent::Intrusion(u)),
        (Some(t), _) => Some(ZoneEvent::Trigger(t)),
        (None, Some(u)) => Some(ZoneEvent::Intrusion(u)),
        (None, None) => None,
    }
}

/// Outcome at the end of a tick, or `None` while the test continues.
pub fn classify_outcome(event: Option<ZoneEvent>, av: &AvState, config: &GridConfig) -> Option<Outcome> {
    match event {
        Some(ZoneEvent::Trigger(_)) => Some(Outcome::Successful),
        Some(ZoneEvent::Intrusion(_)) => Some(Outcome::Unavoidable),
        None if av.is_expired(config) => Some(Outcome::Expired),
        None => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKind {
    Living,
    RoadPenalty,
    ZoneReward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreEvent {
    pub tick: u32,
    pub kind: ScoreKind,
    pub delta: i64,
}

/// Running score per agent, indexed by agent id.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ScoreLedger {
    pub totals: Vec<i64>,
    pub events: Vec<Vec<ScoreEvent>>,
}

impl ScoreLedger {
    pub fn new(n_agents: usize) -> Self {
        Self { totals: vec![0; n_agents], events: vec![Vec::new(); n_agents] }
    }

    pub fn rewarded(&self, agent: usize) -> bool {
        self.events[agent].iter().any(|e| e.kind == ScoreKind::ZoneReward)
    }

    fn push(&mut self, agent: usize, tick: u32, kind: ScoreKind, delta: i64) {
        self.totals[agent] += delta;
        self.events[agent].push(ScoreEvent { tick, kind, delta });
    }
}

/// Applies one tick of scoring and returns each agent's delta for the tick.
/// `peds` holds post-move positions indexed by agent id.
pub fn score_tick(
    ledger: &mut ScoreLedger,
    peds: &[Position],
    tick: u32,
    trigger: Option<&ZoneHit>,
    config: &GridConfig,
) -> Vec<i64> {
    let mut deltas = vec![0; peds.len()];
    for (agent, &pos) in peds.iter().enumerate() {
        ledger.push(agent, tick, ScoreKind::Living, LIVING_COST);
        deltas[agent] += LIVING_COST;
        if classify_cell(config, pos).map(|k| k.is_road()).unwrap_or(false) {
            ledger.push(agent, tick, ScoreKind::RoadPenalty, ROAD_PENALTY);
            deltas[agent] += ROAD_PENALTY;
        }
    }
    if let Some(hit) = trigger {
        let agent = hit.agent_id as usize;
        if !ledger.rewarded(agent) {
            ledger.push(agent, tick, ScoreKind::ZoneReward, ZONE_REWARD);
            deltas[agent] += ZONE_REWARD;
        }
    }
    deltas
}
