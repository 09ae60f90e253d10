//! Reference computations written from the grid constants alone.

use std::collections::BTreeSet;

pub const WIDTH: i32 = 12;
pub const LENGTH: i32 = 66;
pub const PATH: [i32; 2] = [3, 4];
pub const PAVEMENT_COLUMNS: [i32; 4] = [0, 1, 10, 11];

/// Precondition cells swept during tick `k` (1-based), written from the
/// grid constants alone: the front starts on row 2, moves 6 rows a tick and
/// the zone spans rows front+9..=front+14, cut at the last row.
pub fn zone_cells_in_tick(k: i32) -> BTreeSet<(i32, i32)> {
    let before = 2 + 6 * (k - 1);
    let mut cells = BTreeSet::new();
    for front in before + 1..=before + 6 {
        for row in front + 9..=(front + 14).min(LENGTH - 1) {
            for c in PATH {
                cells.insert((c, row));
            }
        }
    }
    cells
}

/// Breadth-first search over (cell, tick): can a walker starting at
/// `start` stand in a precondition cell at the end of some tick?
pub fn reachable(start: (i32, i32)) -> bool {
    let mut frontier = BTreeSet::from([start]);
    let mut k = 1;
    // the test ends once the front reaches the last row
    while 2 + 6 * (k - 1) < LENGTH - 1 {
        let mut next = BTreeSet::new();
        for &(c, r) in &frontier {
            for (dc, dr) in [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)] {
                let (nc, nr) = (c + dc, r + dr);
                if (0..WIDTH).contains(&nc) && (0..LENGTH).contains(&nr) {
                    next.insert((nc, nr));
                }
            }
        }
        let zone = zone_cells_in_tick(k);
        if next.iter().any(|cell| zone.contains(cell)) {
            return true;
        }
        frontier = next;
        k += 1;
    }
    false
}
