//! Discrete road environment: cell bands, AV kinematics, assertion zones and
//! the set of pavement cells from which a pedestrian can still reach the
//! precondition zone.
//!
//! Coordinates are `(column, row)`. Columns run west to east across the road,
//! rows run along the road in the AV's direction of travel. The AV starts at
//! the low-row end and drives towards increasing rows.

use serde::{Deserialize, Serialize};

use crate::behaviours::Action;
use crate::error::GridError;

/// Pavement width in cells on either side of the road (3 m at 1.5 m cells).
pub const PAVEMENT_CELLS: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    /// Cells across the road, pavements included.
    pub width: i32,
    /// Cells along the road.
    pub length: i32,
    /// Metres per cell edge.
    pub cell_size: f64,
    /// AV advance in cells per tick.
    pub av_speed: i32,
    /// Pedestrian step in cells per tick.
    pub ped_speed: i32,
    /// Seconds per tick.
    pub tick_duration: f64,
    /// Cells ahead of the AV front in which a collision is unavoidable.
    pub stopping_distance: i32,
    /// Depth in cells of the precondition zone beyond the stopping distance.
    pub precondition_depth: i32,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            width: 12,
            length: 66,
            cell_size: 1.5,
            av_speed: 6,
            ped_speed: 1,
            tick_duration: 1.0,
            stopping_distance: 8,
            precondition_depth: 6,
        }
    }
}

impl GridConfig {
    pub fn cell_count(&self) -> i32 {
        self.width * self.length
    }

    /// Width of each traffic lane in cells.
    pub fn lane_cells(&self) -> i32 {
        (self.width - 2 * PAVEMENT_CELLS) / 2
    }

    /// AV speed in metres per second.
    pub fn av_speed_mps(&self) -> f64 {
        f64::from(self.av_speed) * self.cell_size / self.tick_duration
    }

    /// Front row at or beyond which a test has run out of road.
    pub fn expiry_row(&self) -> i32 {
        self.length - 1
    }

    pub fn in_bounds(&self, pos: Position) -> bool {
        (0..self.width).contains(&pos.column) && (0..self.length).contains(&pos.row)
    }

    /// Column of the west pavement adjacent to the kerb.
    pub fn west_kerb_column(&self) -> i32 {
        PAVEMENT_CELLS - 1
    }

    /// Column of the east pavement adjacent to the kerb.
    pub fn east_kerb_column(&self) -> i32 {
        self.width - PAVEMENT_CELLS
    }

    pub fn validate(&self) -> Result<(), GridError> {
        let positive = [
            ("width", self.width),
            ("length", self.length),
            ("av_speed", self.av_speed),
            ("ped_speed", self.ped_speed),
            ("stopping_distance", self.stopping_distance),
            ("precondition_depth", self.precondition_depth),
        ];
        for (name, value) in positive {
            if value <= 0 {
                return Err(GridError::InvalidConfig(format!("{name} must be positive, got {value}")));
            }
        }
        if self.lane_cells() < 2 || (self.width - 2 * PAVEMENT_CELLS) % 2 != 0 {
            return Err(GridError::InvalidConfig(format!(
                "width {} does not leave two equal lanes of at least 2 cells",
                self.width
            )));
        }
        if [self.cell_size, self.tick_duration].iter().any(|v| v.is_nan() || *v <= 0.0) {
            return Err(GridError::InvalidConfig("cell_size and tick_duration must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Position {
    pub column: i32,
    pub row: i32,
}

impl Position {
    pub const fn new(column: i32, row: i32) -> Self {
        Self { column, row }
    }

    pub fn manhattan(self, other: Position) -> i32 {
        (self.column - other.column).abs() + (self.row - other.row).abs()
    }
}

impl std::fmt::Display for Position {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.column, self.row)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellKind {
    PavementWest,
    LaneAv,
    LaneOpposite,
    PavementEast,
}

impl CellKind {
    pub fn is_road(self) -> bool {
        matches!(self, CellKind::LaneAv | CellKind::LaneOpposite)
    }

    pub fn is_pavement(self) -> bool {
        !self.is_road()
    }
}

pub fn classify_cell(config: &GridConfig, pos: Position) -> Result<CellKind, GridError> {
    if !config.in_bounds(pos) {
        return Err(GridError::OutOfBounds { pos, width: config.width, length: config.length });
    }
    let lane = config.lane_cells();
    let kind = match pos.column {
        c if c < PAVEMENT_CELLS => CellKind::PavementWest,
        c if c < PAVEMENT_CELLS + lane => CellKind::LaneAv,
        c if c < PAVEMENT_CELLS + 2 * lane => CellKind::LaneOpposite,
        _ => CellKind::PavementEast,
    };
    Ok(kind)
}

/// Walking direction along the pavement. `North` is the AV's direction of
/// travel (increasing row).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Heading {
    North,
    South,
}

impl Heading {
    /// Row delta of one forward step.
    pub fn row_step(self) -> i32 {
        match self {
            Heading::North => 1,
            Heading::South => -1,
        }
    }

    /// Column delta of one step to the agent's right.
    pub fn right_step(self) -> i32 {
        match self {
            Heading::North => 1,
            Heading::South => -1,
        }
    }

    pub fn reversed(self) -> Heading {
        match self {
            Heading::North => Heading::South,
            Heading::South => Heading::North,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvState {
    /// Row of the leading edge.
    pub front_row: i32,
    pub path_columns: [i32; 2],
    pub footprint_length: i32,
    pub footprint_width: i32,
}

impl AvState {
    /// AV at the start of the road, rear edge on row 0, centred in the lane
    /// nearest the west pavement.
    pub fn start(config: &GridConfig) -> Self {
        let footprint_length = 3;
        let lane = config.lane_cells();
        let first = PAVEMENT_CELLS + (lane - 2) / 2;
        Self {
            front_row: footprint_length - 1,
            path_columns: [first, first + 1],
            footprint_length,
            footprint_width: 2,
        }
    }

    /// Rows covered by the body with its leading edge at `front`.
    pub fn footprint_at(&self, front: i32) -> ZoneRect {
        ZoneRect {
            row_min: front - (self.footprint_length - 1),
            row_max: front,
            columns: self.path_columns,
        }
    }

    pub fn in_path_column(&self, column: i32) -> bool {
        self.path_columns.contains(&column)
    }

    /// Column distance from `column` to the nearest path column.
    pub fn lateral_cells_to_path(&self, column: i32) -> i32 {
        self.path_columns.iter().map(|&p| (p - column).abs()).min().unwrap_or(0)
    }

    pub fn is_expired(&self, config: &GridConfig) -> bool {
        self.front_row >= config.expiry_row()
    }
}

/// Rectangle of cells spanning `row_min..=row_max` over two columns. Empty
/// when `row_min > row_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZoneRect {
    pub row_min: i32,
    pub row_max: i32,
    pub columns: [i32; 2],
}

impl ZoneRect {
    pub fn is_empty(&self) -> bool {
        self.row_min > self.row_max
    }

    pub fn depth(&self) -> i32 {
        (self.row_max - self.row_min + 1).max(0)
    }

    pub fn contains(&self, pos: Position) -> bool {
        self.columns.contains(&pos.column) && (self.row_min..=self.row_max).contains(&pos.row)
    }

    fn clipped(mut self, config: &GridConfig) -> Self {
        self.row_min = self.row_min.max(0);
        self.row_max = self.row_max.min(config.length - 1);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Zones {
    pub stopping: ZoneRect,
    pub precondition: ZoneRect,
}

/// Zones ahead of a leading edge at `front`, before clipping to the map.
pub fn zones_unclipped(av: &AvState, front: i32, config: &GridConfig) -> Zones {
    let stop_end = front + config.stopping_distance;
    Zones {
        stopping: ZoneRect { row_min: front + 1, row_max: stop_end, columns: av.path_columns },
        precondition: ZoneRect {
            row_min: stop_end + 1,
            row_max: stop_end + config.precondition_depth,
            columns: av.path_columns,
        },
    }
}

/// Zones for a leading edge at `front`, clipped to the end of the road.
pub fn zones_at(av: &AvState, front: i32, config: &GridConfig) -> Zones {
    let z = zones_unclipped(av, front, config);
    Zones { stopping: z.stopping.clipped(config), precondition: z.precondition.clipped(config) }
}

pub fn compute_zones(av: &AvState, config: &GridConfig) -> Zones {
    zones_at(av, av.front_row, config)
}

/// Time to collision in seconds for a pedestrian on `ped_row`.
pub fn ttc(av: &AvState, ped_row: i32, config: &GridConfig) -> Result<f64, GridError> {
    let gap = ped_row - av.front_row;
    if gap < 0 {
        return Err(GridError::BehindAv { row: ped_row, front_row: av.front_row });
    }
    Ok(f64::from(gap) * config.cell_size / config.av_speed_mps())
}

/// Advances the AV by one tick. The returned list holds every intermediate
/// leading-edge row, ascending, ending at the new front.
pub fn advance_av(av: &AvState, config: &GridConfig) -> (AvState, Vec<i32>) {
    let swept: Vec<i32> = (1..=config.av_speed).map(|d| av.front_row + d).collect();
    let next = AvState { front_row: av.front_row + config.av_speed, ..*av };
    (next, swept)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PedestrianState {
    pub id: u32,
    pub position: Position,
    pub heading: Heading,
    /// Opposite-pavement column while a crossing is in progress.
    pub crossing_target: Option<i32>,
    /// Completed road crossings.
    pub crossings: u32,
}

impl PedestrianState {
    pub fn new(id: u32, position: Position, heading: Heading) -> Self {
        Self { id, position, heading, crossing_target: None, crossings: 0 }
    }

    pub fn is_crossing(&self) -> bool {
        self.crossing_target.is_some()
    }
}

/// Grid displacement of `action` for an agent facing `heading`.
pub fn action_delta(action: Action, heading: Heading) -> (i32, i32) {
    match action {
        Action::Stay => (0, 0),
        Action::Forward => (0, heading.row_step()),
        Action::Backward => (0, -heading.row_step()),
        Action::Left => (-heading.right_step(), 0),
        Action::Right => (heading.right_step(), 0),
    }
}

/// Moves a pedestrian one step. Steps that would leave the grid are dropped.
pub fn apply_action(ped: &PedestrianState, action: Action, config: &GridConfig) -> PedestrianState {
    let (dc, dr) = action_delta(action, ped.heading);
    let target = Position::new(
        ped.position.column + dc * config.ped_speed,
        ped.position.row + dr * config.ped_speed,
    );
    let mut next = ped.clone();
    if config.in_bounds(target) {
        next.position = target;
    }
    next
}

/// Pavement cells from which the precondition zone is reachable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpawnMask {
    width: i32,
    length: i32,
    cells: Vec<bool>,
}

impl SpawnMask {
    pub fn from_fn(config: &GridConfig, mut valid: impl FnMut(Position) -> bool) -> Self {
        let mut cells = Vec::with_capacity(config.cell_count() as usize);
        for row in 0..config.length {
            for column in 0..config.width {
                cells.push(valid(Position::new(column, row)));
            }
        }
        Self { width: config.width, length: config.length, cells }
    }

    pub fn is_valid(&self, pos: Position) -> bool {
        if pos.column < 0 || pos.column >= self.width || pos.row < 0 || pos.row >= self.length {
            return false;
        }
        self.cells[(pos.row * self.width + pos.column) as usize]
    }

    /// Valid cells in row-major order.
    pub fn valid_cells(&self) -> Vec<Position> {
        (0..self.length)
            .flat_map(|row| (0..self.width).map(move |column| Position::new(column, row)))
            .filter(|&p| self.is_valid(p))
            .collect()
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&v| v).count()
    }

    pub fn width(&self) -> i32 {
        self.width
    }

    pub fn length(&self) -> i32 {
        self.length
    }

    /// One text line per row, highest row first so the AV drives upwards.
    /// `#` valid spawn, `.` invalid pavement, `|` road.
    pub fn render(&self, config: &GridConfig) -> String {
        let mut out = String::new();
        for row in (0..self.length).rev() {
            out.push_str(&format!("{row:>3} "));
            for column in 0..self.width {
                let pos = Position::new(column, row);
                let ch = match classify_cell(config, pos) {
                    Ok(kind) if kind.is_road() => '|',
                    _ if self.is_valid(pos) => '#',
                    _ => '.',
                };
                out.push(ch);
            }
            out.push('\n');
        }
        out
    }
}

/// Ticks a test can run for before the AV front reaches the end of the road.
pub fn max_ticks(config: &GridConfig) -> i32 {
    let start = AvState::start(config).front_row;
    let remaining = (config.expiry_row() - start).max(0);
    (remaining + config.av_speed - 1) / config.av_speed
}

/// Computes which pavement cells can reach a precondition-zone cell.
///
/// After `k` ticks a pedestrian can be at any cell within Manhattan distance
/// `k * ped_speed` of its start (standing still is allowed), so a start cell
/// is valid iff some zone cell swept during tick `k` lies within that radius.
pub fn compute_valid_spawn_mask(config: &GridConfig) -> SpawnMask {
    let mut av = AvState::start(config);
    let mut targets_by_tick: Vec<(i32, Vec<Position>)> = Vec::new();
    for tick in 1..=max_ticks(config) {
        let (next, swept) = advance_av(&av, config);
        let mut targets = Vec::new();
        for front in swept {
            let zone = zones_at(&av, front, config).precondition;
            for row in zone.row_min..=zone.row_max {
                for &column in &zone.columns {
                    targets.push(Position::new(column, row));
                }
            }
        }
        targets.sort_unstable();
        targets.dedup();
        targets_by_tick.push((tick * config.ped_speed, targets));
        av = next;
    }

    SpawnMask::from_fn(config, |pos| {
        let on_pavement = classify_cell(config, pos).map(CellKind::is_pavement).unwrap_or(false);
        on_pavement
            && targets_by_tick
                .iter()
                .any(|(reach, targets)| targets.iter().any(|t| t.manhattan(pos) <= *reach))
    })
}
