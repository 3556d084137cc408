//! Scenarios (grid, walls, exits) and the static distance-to-exit field.
//!
//! One grid cell is 40 cm × 40 cm of real-world floor. The static field `S`
//! assigns every cell its distance to the nearest exit; destination choice in
//! the simulator weights cells by `exp(k_S·(S_max − S))`.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::SQRT_2;
use core::fmt;

/// A grid cell position. `x` grows to the right, `y` grows downwards (the
/// row direction of the map file format).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    /// Column index.
    pub x: i32,
    /// Row index.
    pub y: i32,
}

impl Cell {
    /// Creates a cell position.
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    /// Exact squared Euclidean distance to `other`, in cells².
    pub fn dist2(self, other: Cell) -> i64 {
        let dx = (self.x - other.x) as i64;
        let dy = (self.y - other.y) as i64;
        dx * dx + dy * dy
    }

    /// Euclidean distance to `other`, in cells.
    pub fn dist(self, other: Cell) -> f64 {
        libm::sqrt(self.dist2(other) as f64)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Validation errors for scenario construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    /// Width and height must be positive.
    EmptyGrid,
    /// At least one exit is required.
    NoExits,
    /// A wall cell lies outside the grid.
    WallOutOfBounds(Cell),
    /// An exit lies outside the grid.
    ExitOutOfBounds(Cell),
    /// An exit coincides with a wall.
    ExitOnWall(Cell),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::EmptyGrid => write!(f, "scenario dimensions must be positive"),
            ScenarioError::NoExits => write!(f, "scenario needs at least one exit"),
            ScenarioError::WallOutOfBounds(c) => write!(f, "wall {c} is out of bounds"),
            ScenarioError::ExitOutOfBounds(c) => write!(f, "exit {c} is out of bounds"),
            ScenarioError::ExitOnWall(c) => write!(f, "exit {c} is placed on a wall"),
        }
    }
}

impl core::error::Error for ScenarioError {}

/// A rectangular grid with walls and exits. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    width: u32,
    height: u32,
    wall: Vec<bool>,
    exit: Vec<bool>,
    exits: Vec<Cell>,
}

impl Scenario {
    /// Validates and builds a scenario.
    pub fn new(
        width: u32,
        height: u32,
        walls: &[Cell],
        exits: &[Cell],
    ) -> Result<Self, ScenarioError> {
        if width == 0 || height == 0 {
            return Err(ScenarioError::EmptyGrid);
        }
        if exits.is_empty() {
            return Err(ScenarioError::NoExits);
        }
        let n = width as usize * height as usize;
        let mut s = Scenario {
            width,
            height,
            wall: vec![false; n],
            exit: vec![false; n],
            exits: Vec::new(),
        };
        for &c in walls {
            if !s.in_bounds(c) {
                return Err(ScenarioError::WallOutOfBounds(c));
            }
            let i = s.index(c);
            s.wall[i] = true;
        }
        let mut sorted: Vec<Cell> = exits.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for &c in &sorted {
            if !s.in_bounds(c) {
                return Err(ScenarioError::ExitOutOfBounds(c));
            }
            let i = s.index(c);
            if s.wall[i] {
                return Err(ScenarioError::ExitOnWall(c));
            }
            s.exit[i] = true;
        }
        s.exits = sorted;
        Ok(s)
    }

    /// Grid width in cells.
    pub fn width(&self) -> u32 {
        self.width
    }

    /// Grid height in cells.
    pub fn height(&self) -> u32 {
        self.height
    }

    /// Whether `c` lies on the grid.
    pub fn in_bounds(&self, c: Cell) -> bool {
        c.x >= 0 && c.y >= 0 && (c.x as u32) < self.width && (c.y as u32) < self.height
    }

    pub(crate) fn index(&self, c: Cell) -> usize {
        c.y as usize * self.width as usize + c.x as usize
    }

    /// Whether `c` is a wall cell. Out-of-bounds counts as wall.
    pub fn is_wall(&self, c: Cell) -> bool {
        !self.in_bounds(c) || self.wall[self.index(c)]
    }

    /// Whether `c` is an exit cell.
    pub fn is_exit(&self, c: Cell) -> bool {
        self.in_bounds(c) && self.exit[self.index(c)]
    }

    /// All exit cells, sorted.
    pub fn exits(&self) -> &[Cell] {
        &self.exits
    }

    /// Number of non-wall cells (exits included).
    pub fn free_cell_count(&self) -> usize {
        self.wall.iter().filter(|&&w| !w).count()
    }

    /// Iterates all non-wall cells in row-major order.
    pub fn free_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        let w = self.width as i32;
        self.wall
            .iter()
            .enumerate()
            .filter_map(move |(i, &is_wall)| {
                if is_wall {
                    None
                } else {
                    Some(Cell::new(i as i32 % w, i as i32 / w))
                }
            })
    }
}

/// How the static field measures distance to the exits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldVariant {
    /// Straight-line distance to the nearest exit. Only valid when no wall
    /// can shadow a cell (wall-free or convex scenarios); otherwise the
    /// computation falls back to [`FieldVariant::GridGeodesic`].
    RealEuclidean,
    /// [`FieldVariant::RealEuclidean`] rounded half away from zero. This is
    /// the variant behind the published experiments; its value plateaus are
    /// deliberate and are not subject to the fallback check.
    IntegerEuclidean,
    /// Shortest-path distance through non-wall cells with Moore steps of
    /// weight 1 (axis) and √2 (diagonal). Valid in any scenario; unreachable
    /// cells get `S = ∞`.
    GridGeodesic,
}

/// The static floor field: one `S` value per cell. Wall cells carry `∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticField {
    width: u32,
    height: u32,
    variant: FieldVariant,
    fell_back: bool,
    values: Vec<f64>,
}

impl StaticField {
    /// Grid width in cells.
    pub fn width(&self) -> u32 {
        self.width
    }

    /// Grid height in cells.
    pub fn height(&self) -> u32 {
        self.height
    }

    /// The effective variant (after any geodesic fallback).
    pub fn variant(&self) -> FieldVariant {
        self.variant
    }

    /// True when a `RealEuclidean` request was degraded to `GridGeodesic`
    /// because walls made the straight-line field invalid.
    pub fn fell_back(&self) -> bool {
        self.fell_back
    }

    /// Field value at `c`; `∞` for walls and unreachable cells.
    pub fn value(&self, c: Cell) -> f64 {
        self.values[c.y as usize * self.width as usize + c.x as usize]
    }

    /// Whether any non-wall cell is unreachable (`S = ∞`).
    pub fn has_unreachable(&self, scenario: &Scenario) -> bool {
        scenario.free_cells().any(|c| !self.value(c).is_finite())
    }

    /// Wraps externally computed values (mainly for tests and custom
    /// potentials). `values` is row-major, `width × height` entries.
    pub fn from_values(width: u32, height: u32, variant: FieldVariant, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), width as usize * height as usize);
        StaticField {
            width,
            height,
            variant,
            fell_back: false,
            values,
        }
    }
}

const MOORE: [(i32, i32); 8] = [
    (0, -1),
    (1, 0),
    (0, 1),
    (-1, 0),
    (1, -1),
    (1, 1),
    (-1, 1),
    (-1, -1),
];

/// Computes the static field for a scenario.
///
/// `RealEuclidean` verifies that the straight-line field has no local minimum
/// besides the exits (every cell must have a strictly downhill Moore
/// neighbor); if walls break that property the geodesic field is returned
/// instead, with [`StaticField::fell_back`] set.
pub fn compute_static_field(scenario: &Scenario, variant: FieldVariant) -> StaticField {
    match variant {
        FieldVariant::RealEuclidean => {
            let field = euclidean_field(scenario, false);
            if euclidean_is_valid(scenario, &field) {
                field
            } else {
                let mut geo = geodesic_field(scenario);
                geo.fell_back = true;
                geo
            }
        }
        FieldVariant::IntegerEuclidean => euclidean_field(scenario, true),
        FieldVariant::GridGeodesic => geodesic_field(scenario),
    }
}

fn euclidean_field(scenario: &Scenario, rounded: bool) -> StaticField {
    let (w, h) = (scenario.width as i32, scenario.height as i32);
    let mut values = vec![f64::INFINITY; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let c = Cell::new(x, y);
            if scenario.is_wall(c) {
                continue;
            }
            let mut best = f64::INFINITY;
            for &e in scenario.exits() {
                let d = c.dist(e);
                if d < best {
                    best = d;
                }
            }
            values[scenario.index(c)] = if rounded { libm::round(best) } else { best };
        }
    }
    StaticField {
        width: scenario.width,
        height: scenario.height,
        variant: if rounded {
            FieldVariant::IntegerEuclidean
        } else {
            FieldVariant::RealEuclidean
        },
        fell_back: false,
        values,
    }
}

/// No local minima besides exits: every non-exit free cell needs a strictly
/// downhill non-wall Moore neighbor.
fn euclidean_is_valid(scenario: &Scenario, field: &StaticField) -> bool {
    scenario.free_cells().all(|c| {
        if scenario.is_exit(c) {
            return true;
        }
        let s = field.value(c);
        MOORE.iter().any(|&(dx, dy)| {
            let n = Cell::new(c.x + dx, c.y + dy);
            !scenario.is_wall(n) && field.value(n) < s
        })
    })
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    cell: Cell,
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, Dijkstra wants the minimum.
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.cell.cmp(&self.cell))
    }
}

fn geodesic_field(scenario: &Scenario) -> StaticField {
    let n = scenario.width as usize * scenario.height as usize;
    let mut values = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    for &e in scenario.exits() {
        values[scenario.index(e)] = 0.0;
        heap.push(HeapEntry { dist: 0.0, cell: e });
    }
    while let Some(HeapEntry { dist, cell }) = heap.pop() {
        if dist > values[scenario.index(cell)] {
            continue;
        }
        for &(dx, dy) in &MOORE {
            let next = Cell::new(cell.x + dx, cell.y + dy);
            if scenario.is_wall(next) {
                continue;
            }
            let step = if dx == 0 || dy == 0 { 1.0 } else { SQRT_2 };
            let nd = dist + step;
            let slot = &mut values[scenario.index(next)];
            if nd < *slot {
                *slot = nd;
                heap.push(HeapEntry {
                    dist: nd,
                    cell: next,
                });
            }
        }
    }
    StaticField {
        width: scenario.width,
        height: scenario.height,
        variant: FieldVariant::GridGeodesic,
        fell_back: false,
        values,
    }
}
