//! Complete neighborhoods on the square lattice.
//!
//! A *complete* neighborhood is a four-fold symmetric cell set in which every
//! member is closer to the center cell than every non-member. Such sets are
//! exactly the integer discs `{ (x, y) : x² + y² ≤ d² }` and are named by the
//! maximum squared distance `d²` they admit, so neighborhood `d²=1` is the
//! von Neumann neighborhood and `d²=2` the Moore neighborhood.
//!
//! Everything in this module is exact integer arithmetic.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// An offset between two lattice cells, in cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellOffset {
    /// Horizontal distance in cells.
    pub x: i32,
    /// Vertical distance in cells.
    pub y: i32,
}

impl CellOffset {
    /// Creates an offset.
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    /// Squared Euclidean norm `x² + y²`, exact.
    pub const fn norm2(self) -> i64 {
        self.x as i64 * self.x as i64 + self.y as i64 * self.y as i64
    }
}

impl fmt::Display for CellOffset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A complete neighborhood: all cells with squared distance at most `d2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighborhood {
    d2: u64,
    cells: Vec<CellOffset>,
}

impl Neighborhood {
    /// The defining maximum squared cell distance.
    pub fn d2(&self) -> u64 {
        self.d2
    }

    /// All member cells in lexicographic `(x, y)` order. Always contains the
    /// origin and has odd cardinality.
    pub fn cells(&self) -> &[CellOffset] {
        &self.cells
    }

    /// Number of member cells.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    /// A neighborhood is never empty: it contains at least the origin.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Exact membership test.
    pub fn contains(&self, offset: CellOffset) -> bool {
        offset.norm2() <= self.d2 as i64
    }

    /// Horizontal extent `⌊√d2⌋`: the farthest axis cell reached.
    pub fn extent(&self) -> u32 {
        isqrt(self.d2) as u32
    }
}

/// Direction of one staircase step along the first-octant border.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// Step `(0, +1)`; border gradient `r = ∞`.
    Vertical,
    /// Step `(−1, +1)`; border gradient `r = −1`.
    Antidiagonal,
    /// Any other direction. Never produced by the staircase walk; convex-hull
    /// borders may yield such edges (e.g. slope −2 for `d² = 109`).
    Other,
}

/// The ordered outermost first-octant cells of a neighborhood.
///
/// The walk starts at `(⌊√d2⌋, 0)` and climbs by vertical or antidiagonal
/// unit steps. It ends either on the 45° diagonal or — when the diagonal
/// falls between two border cells — one cell past it, at the mirror image of
/// the last in-octant cell, so that the final segment always brackets `π/4`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BorderStaircase {
    d2: u64,
    border: Vec<CellOffset>,
    kinds: Vec<StepKind>,
}

impl BorderStaircase {
    /// The neighborhood this border belongs to.
    pub fn d2(&self) -> u64 {
        self.d2
    }

    /// Border cells in order of increasing angle.
    pub fn border(&self) -> &[CellOffset] {
        &self.border
    }

    /// Step kinds; `kinds()[i]` joins `border()[i]` to `border()[i + 1]`.
    pub fn kinds(&self) -> &[StepKind] {
        &self.kinds
    }
}

/// Errors from border construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeometryError {
    /// `d2 = 0` has no border (the neighborhood is the center cell alone).
    DegenerateNeighborhood,
    /// A staircase step left the neighborhood. This would falsify the
    /// `r ∈ {∞, −1}` border property and cannot occur for integer discs;
    /// the check is kept as a structural guarantee.
    StepOutsideNeighborhood {
        /// The offending cell.
        cell: CellOffset,
        /// The neighborhood key.
        d2: u64,
    },
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::DegenerateNeighborhood => {
                write!(
                    f,
                    "neighborhood 0 is the center cell alone and has no border"
                )
            }
            GeometryError::StepOutsideNeighborhood { cell, d2 } => {
                write!(f, "staircase step to {cell} leaves neighborhood {d2}")
            }
        }
    }
}

impl core::error::Error for GeometryError {}

/// Exact integer square root.
pub(crate) fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = libm::sqrt(n as f64) as u64;
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    while x * x > n {
        x -= 1;
    }
    x
}

/// Largest `y ≥ 0` with `x² + y² ≤ d2`, i.e. the border height of column `x`.
fn column_height(d2: u64, x: u64) -> u64 {
    debug_assert!(x * x <= d2);
    isqrt(d2 - x * x)
}

/// Lists the keys `d²` of all complete neighborhoods whose horizontal extent
/// is at most `v_max`, i.e. all squared distances realized by lattice cells
/// below `(v_max + 1)²`, in increasing order.
///
/// `v_max = 0` yields `[0]` (the degenerate center-only neighborhood).
/// Values up to `v_max = 32` are exercised by tests; larger inputs work but
/// are untested territory.
pub fn enumerate_complete_neighborhoods(v_max: u32) -> Vec<u64> {
    let limit = (v_max as u64 + 1) * (v_max as u64 + 1);
    let mut keys = BTreeSet::new();
    for x in 0..=v_max as u64 + 1 {
        if x * x >= limit {
            break;
        }
        for y in x..=v_max as u64 + 1 {
            let d2 = x * x + y * y;
            if d2 < limit {
                keys.insert(d2);
            } else {
                break;
            }
        }
    }
    keys.into_iter().collect()
}

/// The complete neighborhood with key `d2`: the exact integer-threshold disc.
pub fn cells_of(d2: u64) -> Neighborhood {
    let m = isqrt(d2) as i32;
    let mut cells = Vec::new();
    for x in -m..=m {
        for y in -m..=m {
            let c = CellOffset::new(x, y);
            if c.norm2() <= d2 as i64 {
                cells.push(c);
            }
        }
    }
    Neighborhood { d2, cells }
}

/// Walks the first-octant border staircase of neighborhood `d2`.
///
/// Fails with [`GeometryError::StepOutsideNeighborhood`] if an antidiagonal
/// step would land outside the disc (provably impossible, asserted anyway)
/// and with [`GeometryError::DegenerateNeighborhood`] for `d2 = 0`.
pub fn border_staircase(d2: u64) -> Result<BorderStaircase, GeometryError> {
    if d2 == 0 {
        return Err(GeometryError::DegenerateNeighborhood);
    }
    let in_disc = |x: i64, y: i64| x * x + y * y <= d2 as i64;
    let m = isqrt(d2) as i64;
    let mut border = vec![CellOffset::new(m as i32, 0)];
    let mut kinds = Vec::new();
    let (mut x, mut y) = (m, 0i64);
    while y < x {
        if in_disc(x, y + 1) {
            y += 1;
            kinds.push(StepKind::Vertical);
        } else {
            x -= 1;
            y += 1;
            kinds.push(StepKind::Antidiagonal);
            if !in_disc(x, y) {
                return Err(GeometryError::StepOutsideNeighborhood {
                    cell: CellOffset::new(x as i32, y as i32),
                    d2,
                });
            }
        }
        border.push(CellOffset::new(x as i32, y as i32));
        if y > x {
            // Crossed the diagonal: this cell mirrors the previous one.
            break;
        }
    }
    Ok(BorderStaircase { d2, border, kinds })
}

/// Extreme points of the convex hull of neighborhood `d2`, restricted to the
/// first octant and ordered by angle.
///
/// Start and end conventions match [`border_staircase`]: the chain starts at
/// `(⌊√d2⌋, 0)` and ends on the diagonal or at the first hull vertex past it.
/// Unlike the staircase, consecutive vertices may be joined by edges of any
/// negative rational slope (or a vertical first edge).
///
/// # Panics
///
/// Panics if `d2 = 0`.
pub fn hull_vertices(d2: u64) -> Vec<CellOffset> {
    assert!(d2 >= 1, "hull of the degenerate neighborhood is undefined");
    let m = isqrt(d2);
    // Candidate extreme points: the column maxima of the first quadrant plus
    // the axis cell. Sorted by increasing angle (decreasing x).
    let mut pts = vec![CellOffset::new(m as i32, 0)];
    for x in (0..=m).rev() {
        let h = column_height(d2, x) as i32;
        if h > 0 {
            pts.push(CellOffset::new(x as i32, h));
        }
    }
    // Graham-style chain keeping only strict left turns (exact i64 cross
    // products), which drops collinear intermediates.
    let mut chain: Vec<CellOffset> = Vec::new();
    for p in pts {
        while chain.len() >= 2 {
            let a = chain[chain.len() - 2];
            let b = chain[chain.len() - 1];
            let cross = (b.x as i64 - a.x as i64) * (p.y as i64 - a.y as i64)
                - (b.y as i64 - a.y as i64) * (p.x as i64 - a.x as i64);
            if cross <= 0 {
                chain.pop();
            } else {
                break;
            }
        }
        chain.push(p);
    }
    // Truncate to the octant. When the hull crosses the diagonal between two
    // vertices, that edge joins mirror images and has slope −1; end the chain
    // at its first lattice point at or past 45° (the mirror-closure cell)
    // rather than at the far vertex.
    let mut out: Vec<CellOffset> = Vec::new();
    for p in chain {
        if p.y < p.x {
            out.push(p);
            continue;
        }
        if p.y == p.x {
            out.push(p);
        } else {
            let a = *out.last().expect("chain starts on the axis");
            let mut q = a;
            loop {
                q = CellOffset::new(q.x - 1, q.y + 1);
                if q.y >= q.x {
                    break;
                }
            }
            debug_assert!(q.norm2() <= d2 as i64);
            out.push(q);
        }
        break;
    }
    out
}

/// Reachable offsets of `n` von Neumann steps followed by `m` Moore steps,
/// computed as an iterated Minkowski sum on a bit grid. Exact.
fn minkowski_reach(n: u32, m: u32) -> ReachSet {
    let radius = (n + m) as i32;
    let vn = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)];
    let moore = [
        (0, 0),
        (1, 0),
        (-1, 0),
        (0, 1),
        (0, -1),
        (1, 1),
        (1, -1),
        (-1, 1),
        (-1, -1),
    ];
    let mut set = ReachSet::new(radius);
    set.insert(0, 0);
    for _ in 0..n {
        set = set.sum_with(&vn);
    }
    for _ in 0..m {
        set = set.sum_with(&moore);
    }
    set
}

/// Dense bit grid over `[-radius, radius]²` used for exact reachable sets.
struct ReachSet {
    radius: i32,
    side: usize,
    bits: Vec<u64>,
}

impl ReachSet {
    fn new(radius: i32) -> Self {
        let side = (2 * radius + 1) as usize;
        let words = (side * side).div_ceil(64);
        ReachSet {
            radius,
            side,
            bits: vec![0; words],
        }
    }

    fn index(&self, x: i32, y: i32) -> usize {
        let col = (x + self.radius) as usize;
        let row = (y + self.radius) as usize;
        row * self.side + col
    }

    fn insert(&mut self, x: i32, y: i32) {
        let i = self.index(x, y);
        self.bits[i / 64] |= 1 << (i % 64);
    }

    fn contains(&self, x: i32, y: i32) -> bool {
        if x.abs() > self.radius || y.abs() > self.radius {
            return false;
        }
        let i = self.index(x, y);
        self.bits[i / 64] & (1 << (i % 64)) != 0
    }

    fn sum_with(&self, steps: &[(i32, i32)]) -> ReachSet {
        let mut out = ReachSet::new(self.radius);
        for y in -self.radius..=self.radius {
            for x in -self.radius..=self.radius {
                if !self.contains(x, y) {
                    continue;
                }
                for &(dx, dy) in steps {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx.abs() <= self.radius && ny.abs() <= self.radius {
                        out.insert(nx, ny);
                    }
                }
            }
        }
        out
    }
}

/// Looks for a split `v = n + m` such that `n` von Neumann steps followed by
/// `m` Moore steps reach exactly the cells of neighborhood `d2`.
///
/// Returns the first `(n_vn, n_moore)` split found (smallest `n_vn`), or
/// `None` when no split reproduces the disc. The reachable set is computed by
/// brute-force Minkowski sums over the bounding box — exact, no approximation.
pub fn moore_vn_composition(d2: u64, v: u32) -> Option<(u32, u32)> {
    let disc = cells_of(d2);
    let radius = v as i32;
    if disc.extent() as i32 > radius {
        return None;
    }
    'split: for n in 0..=v {
        let m = v - n;
        let reach = minkowski_reach(n, m);
        // Set equality over the bounding box.
        let mut count = 0usize;
        for y in -radius..=radius {
            for x in -radius..=radius {
                let r = reach.contains(x, y);
                let d = disc.contains(CellOffset::new(x, y));
                if r != d {
                    continue 'split;
                }
                if r {
                    count += 1;
                }
            }
        }
        debug_assert_eq!(count, disc.len());
        return Some((n, m));
    }
    None
}
