//! Independent reference computations checked against the simulator.

use avtest_core::behaviours::BehaviourKind;
use avtest_core::gridworld::{compute_valid_spawn_mask, Heading};
use avtest_core::harness::{Experiment, ExperimentConfig, Spawn};
use avtest_core::reporting::trace::{EntityKind, TraceEvent};
use avtest_core::verdict::Outcome;
use avtest_core::{GridConfig, Position};

mod common;

use common::{reachable, LENGTH, PAVEMENT_COLUMNS};

#[test]
fn spawn_mask_matches_brute_force_search() {
    let mask = compute_valid_spawn_mask(&GridConfig::default());
    let mut checked = 0;
    for column in PAVEMENT_COLUMNS {
        for row in 0..LENGTH {
            let expected = reachable((column, row));
            assert_eq!(mask.is_valid(Position::new(column, row)), expected, "cell ({column}, {row})");
            checked += 1;
        }
    }
    assert_eq!(checked, 264);
    for column in 2..10 {
        for row in 0..LENGTH {
            assert!(!mask.is_valid(Position::new(column, row)));
        }
    }
}

#[test]
fn spawn_mask_closed_form() {
    // a cell L columns from the path is valid iff its row is at least
    // 6L + 4 ahead of the starting front
    let mask = compute_valid_spawn_mask(&GridConfig::default());
    for (column, lateral) in [(0, 3), (1, 2), (10, 6), (11, 7)] {
        let first = 2 + 6 * lateral + 4;
        for row in 0..LENGTH {
            assert_eq!(mask.is_valid(Position::new(column, row)), row >= first, "({column}, {row})");
        }
    }
    assert_eq!(mask.count(), 42 + 48 + 24 + 18);
}

#[test]
fn hand_stepped_proximity_run() {
    let exp = Experiment::new(ExperimentConfig::new(BehaviourKind::Proximity, 1)).unwrap();
    let spawn = Spawn { position: Position::new(1, 30), heading: Heading::North };
    let r = exp.run_test_with_spawns(0, vec![spawn]);

    // tick 1: gap 28, distance 28.07 > 25, walk on to (1, 31)
    // tick 2: gap 23, distance 23.09, start crossing east to (2, 31), road
    // tick 3: step to (3, 31); the zone of front 17 covers rows 26..=31
    let peds: Vec<_> = r.trace.iter().filter(|t| t.entity_kind == EntityKind::Pedestrian).collect();
    let cells: Vec<(i32, i32)> = peds.iter().map(|t| (t.column, t.row)).collect();
    assert_eq!(cells, vec![(1, 31), (2, 31), (3, 31)]);
    let deltas: Vec<i64> = peds.iter().map(|t| t.score_delta).collect();
    assert_eq!(deltas, vec![-1, -6, 94]);
    assert_eq!(peds[2].event, Some(TraceEvent::Trigger));

    let av_rows: Vec<i32> =
        r.trace.iter().filter(|t| t.entity_kind == EntityKind::Av).map(|t| t.row).collect();
    assert_eq!(av_rows, vec![8, 14, 20]);

    assert_eq!(r.outcome, Outcome::Successful);
    assert_eq!(r.ticks_elapsed, 3);
    assert_eq!(r.ledger.totals, vec![87]);
    let hit = r.trigger.unwrap();
    assert_eq!((hit.tick, hit.sweep_step), (3, 2));
}

#[test]
fn adjacent_spawn_scores_the_maximum() {
    // one step from the lane edge into the zone: -1 living, -5 road, +100
    for kind in [BehaviourKind::Proximity, BehaviourKind::Election] {
        let exp = Experiment::new(ExperimentConfig::new(kind, 1)).unwrap();
        let spawn = Spawn { position: Position::new(2, 20), heading: Heading::North };
        let r = exp.run_test_with_spawns(0, vec![spawn]);
        assert_eq!(r.outcome, Outcome::Successful);
        assert_eq!(r.ticks_elapsed, 1);
        assert_eq!(r.ledger.totals, vec![94]);
    }
}
