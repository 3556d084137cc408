//! Reproduction harness for the three measurement campaigns: single-agent
//! travel times over eight directions, a radially collapsing crowd, and the
//! axis-versus-diagonal two-route comparison.

use std::f64::consts::SQRT_2;
use std::fmt::Write as _;

use anyhow::{bail, Result};
use serde::Serialize;

use stepfield_core::floorfield::{compute_static_field, Cell, FieldVariant, Scenario};
use stepfield_core::simulator::{Simulation, SimulationOptions};

use crate::stats;
use crate::TimeoutError;

/// The eight course displacements: every one has squared length 325².
pub const DIRECTIONS: [(i32, i32); 8] = [
    (253, 204),
    (260, 195),
    (280, 165),
    (300, 125),
    (312, 91),
    (315, 80),
    (323, 36),
    (325, 0),
];

/// Builtin scenario construction shared by experiments and configs.
pub mod builtins {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Open rectangular course: start at `(margin, margin)`, single exit
    /// displaced by `(dx, dy)`. Returns `(scenario, start, exit)`.
    pub fn course(dx: u32, dy: u32, margin: u32) -> (Scenario, Cell, Cell) {
        let start = Cell::new(margin as i32, margin as i32);
        let exit = Cell::new((margin + dx) as i32, (margin + dy) as i32);
        let scenario = Scenario::new(dx + 2 * margin + 1, dy + 2 * margin + 1, &[], &[exit])
            .expect("course scenario is valid");
        (scenario, start, exit)
    }

    /// Disc of radius `r` on a `2r × 2r` grid. Cell centers sit at
    /// half-integers, the disc center at the shared corner of the four
    /// central cells, which are the exits. Everything outside the disc is
    /// wall.
    pub fn circle(r: u32) -> Scenario {
        let side = 2 * r;
        let r = r as i64;
        let mut walls = Vec::new();
        for y in 0..side as i64 {
            for x in 0..side as i64 {
                // (x + ½ − r)² + (y + ½ − r)² > r², scaled by 4.
                let qx = 2 * x + 1 - 2 * r;
                let qy = 2 * y + 1 - 2 * r;
                if qx * qx + qy * qy > 4 * r * r {
                    walls.push(Cell::new(x as i32, y as i32));
                }
            }
        }
        let exits = [
            Cell::new(r as i32 - 1, r as i32 - 1),
            Cell::new(r as i32, r as i32 - 1),
            Cell::new(r as i32 - 1, r as i32),
            Cell::new(r as i32, r as i32),
        ];
        Scenario::new(side, side, &walls, &exits).expect("circle scenario is valid")
    }

    /// Straight corridor of the given length, three cells wide, exit line at
    /// `x = 0`. Returns `(scenario, start, exits)`.
    pub fn axis_corridor(length: u32) -> (Scenario, Cell, Vec<Cell>) {
        let exits = vec![Cell::new(0, 0), Cell::new(0, 1), Cell::new(0, 2)];
        let sc = Scenario::new(length + 1, 3, &[], &exits).expect("corridor is valid");
        (sc, Cell::new(length as i32, 1), exits)
    }

    /// Diagonal corridor with axis extent `length` (real length `length·√2`),
    /// three cells wide (`|x − y| ≤ 1`), exit cluster at the origin corner.
    pub fn diagonal_corridor(length: u32) -> (Scenario, Cell, Vec<Cell>) {
        let side = length + 1;
        let mut walls = Vec::new();
        for y in 0..side as i32 {
            for x in 0..side as i32 {
                if (x - y).abs() > 1 {
                    walls.push(Cell::new(x, y));
                }
            }
        }
        let exits = vec![Cell::new(0, 0), Cell::new(1, 0), Cell::new(0, 1)];
        let sc = Scenario::new(side, side, &walls, &exits).expect("corridor is valid");
        (sc, Cell::new(length as i32, length as i32), exits)
    }

    /// Draws `count` distinct free non-exit cells uniformly at random.
    /// Placement uses RNG stream `u64::MAX`, leaving the low stream numbers
    /// to the simulations themselves.
    pub fn random_free_cells(scenario: &Scenario, count: u32, seed: u64) -> Vec<Cell> {
        let mut pool: Vec<Cell> = scenario
            .free_cells()
            .filter(|&c| !scenario.is_exit(c))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::MAX);
        let n = (count as usize).min(pool.len());
        for i in 0..n {
            let j = rng.gen_range(i..pool.len());
            pool.swap(i, j);
        }
        pool.truncate(n);
        pool
    }
}

/// Runs one single-agent course and returns the evacuation round (1-based,
/// counting the round in which the agent entered the exit).
fn run_course(
    dx: i32,
    dy: i32,
    v_max: u8,
    k_s: f64,
    field: FieldVariant,
    seed: u64,
    stream: u64,
) -> Result<u64> {
    let (scenario, start, _) = builtins::course(dx as u32, dy as u32, 10);
    let field = compute_static_field(&scenario, field);
    let mut sim = Simulation::new(
        scenario,
        field,
        &[(start, v_max)],
        SimulationOptions {
            k_s,
            seed,
            stream,
            ..SimulationOptions::default()
        },
    )?;
    let max_rounds = 40 * 325 + 1000;
    let out = sim.run_until_empty(max_rounds);
    match out.evacuation_rounds[0] {
        Some(r) => Ok(r),
        None => bail!(TimeoutError { max_rounds }),
    }
}

/// Parameters of the directional campaign.
#[derive(Debug, Clone, Copy)]
pub struct DirectionalSpec {
    pub v_max: u8,
    pub k_s: f64,
    pub repetitions: u32,
    pub seed: u64,
    pub field: FieldVariant,
}

impl Default for DirectionalSpec {
    fn default() -> Self {
        DirectionalSpec {
            v_max: 1,
            k_s: 10.0,
            repetitions: 100,
            seed: 1,
            field: FieldVariant::IntegerEuclidean,
        }
    }
}

/// Per-direction statistics. `mean` counts one round more than `mean_entry`:
/// the published times include the round after the agent steps onto the exit,
/// and that convention matches the printed table (see the `convention`
/// columns in the CSV output).
#[derive(Debug, Clone, Serialize)]
pub struct DirectionalRow {
    pub dx: i32,
    pub dy: i32,
    pub angle_deg: f64,
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    pub mean_entry: f64,
}

/// Aggregated directional results.
#[derive(Debug, Clone, Serialize)]
pub struct DirectionalResult {
    pub v_max: u8,
    pub rows: Vec<DirectionalRow>,
    /// Mean of the eight direction means.
    pub overall_mean: f64,
    /// Standard error of the overall mean (population convention over the
    /// direction means, divided by √8 — the spread the published summary
    /// quotes).
    pub overall_spread: f64,
    /// `overall_spread / overall_mean`.
    pub relative_spread: f64,
}

/// Runs the eight-direction campaign for one speed.
pub fn experiment_directional(spec: &DirectionalSpec) -> Result<DirectionalResult> {
    let mut rows = Vec::new();
    for (dir_idx, &(dx, dy)) in DIRECTIONS.iter().enumerate() {
        let mut times = Vec::with_capacity(spec.repetitions as usize);
        for rep in 0..spec.repetitions {
            let stream = (dir_idx as u64) * spec.repetitions as u64 + rep as u64;
            let t = run_course(dx, dy, spec.v_max, spec.k_s, spec.field, spec.seed, stream)?;
            times.push(t as f64 + 1.0);
        }
        let mean = stats::mean(&times);
        rows.push(DirectionalRow {
            dx,
            dy,
            angle_deg: (dy as f64).atan2(dx as f64).to_degrees(),
            mean,
            std_dev: stats::std_dev(&times),
            min: times.iter().copied().fold(f64::INFINITY, f64::min),
            max: times.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean_entry: mean - 1.0,
        });
    }
    let means: Vec<f64> = rows.iter().map(|r| r.mean).collect();
    let overall_mean = stats::mean(&means);
    let overall_spread = stats::std_dev_pop(&means) / (means.len() as f64).sqrt();
    Ok(DirectionalResult {
        v_max: spec.v_max,
        rows,
        overall_mean,
        overall_spread,
        relative_spread: overall_spread / overall_mean,
    })
}

/// CSV rendering of a directional result.
pub fn directional_csv(r: &DirectionalResult) -> String {
    let mut out = String::from("dx,dy,angle_deg,mean,std_dev,min,max,mean_entry_convention\n");
    for row in &r.rows {
        let _ = writeln!(
            out,
            "{},{},{:.1},{:.2},{:.2},{:.0},{:.0},{:.2}",
            row.dx, row.dy, row.angle_deg, row.mean, row.std_dev, row.min, row.max, row.mean_entry
        );
    }
    let _ = writeln!(
        out,
        "overall,,,{:.2},{:.2},,,{:.4}",
        r.overall_mean, r.overall_spread, r.relative_spread
    );
    out
}

/// Parameters of the radial-crowd campaign.
#[derive(Debug, Clone)]
pub struct RadialSpec {
    pub radius: u32,
    pub n_agents: u32,
    pub v_max: u8,
    pub k_s: f64,
    pub seed: u64,
    pub field: FieldVariant,
    /// Rounds at which to capture snapshots, ascending.
    pub snapshot_rounds: Vec<u64>,
}

impl Default for RadialSpec {
    fn default() -> Self {
        RadialSpec {
            radius: 249,
            n_agents: 1948,
            v_max: 1,
            k_s: 10.0,
            seed: 1,
            field: FieldVariant::IntegerEuclidean,
            snapshot_rounds: vec![180],
        }
    }
}

/// One captured snapshot: the occupied cells and the crowd-front metric.
#[derive(Debug, Clone, Serialize)]
pub struct RadialSnapshot {
    pub round: u64,
    /// Coefficient of variation of the outermost occupied radius over 64
    /// angular bins (0 when no agent remains).
    pub boundary_cv: f64,
    pub agents_inside: u32,
    #[serde(skip)]
    pub occupied: Vec<Cell>,
}

/// Crowd-front anisotropy: per angular bin, the largest center distance of
/// an occupied cell; returns the coefficient of variation over the bins.
pub fn boundary_cv(occupied: &[Cell], radius: u32) -> f64 {
    const BINS: usize = 64;
    if occupied.is_empty() {
        return 0.0;
    }
    let center = radius as f64; // corner-centered: cell centers at +0.5
    let mut max_r = [0.0f64; BINS];
    for c in occupied {
        let dx = c.x as f64 + 0.5 - center;
        let dy = c.y as f64 + 0.5 - center;
        let theta = dy.atan2(dx); // −π ..= π
        let mut bin = (((theta + std::f64::consts::PI) / (2.0 * std::f64::consts::PI))
            * BINS as f64) as usize;
        bin = bin.min(BINS - 1);
        let r = (dx * dx + dy * dy).sqrt();
        if r > max_r[bin] {
            max_r[bin] = r;
        }
    }
    let mean = stats::mean(&max_r);
    if mean == 0.0 {
        return 0.0;
    }
    stats::std_dev(&max_r) / mean
}

/// Runs the radial collapse and captures the requested snapshots.
pub fn experiment_radial(spec: &RadialSpec) -> Result<(Scenario, Vec<RadialSnapshot>)> {
    let scenario = builtins::circle(spec.radius);
    let field = compute_static_field(&scenario, spec.field);
    let starts = builtins::random_free_cells(&scenario, spec.n_agents, spec.seed);
    let agents: Vec<(Cell, u8)> = starts.into_iter().map(|c| (c, spec.v_max)).collect();
    let mut sim = Simulation::new(
        scenario.clone(),
        field,
        &agents,
        SimulationOptions {
            k_s: spec.k_s,
            seed: spec.seed,
            stream: 0,
            ..SimulationOptions::default()
        },
    )?;
    let mut rounds = spec.snapshot_rounds.clone();
    rounds.sort_unstable();
    let mut snapshots = Vec::new();
    let capture = |sim: &Simulation, round: u64| {
        let occupied: Vec<Cell> = sim
            .agents()
            .iter()
            .filter(|a| !a.evacuated())
            .map(|a| a.position)
            .collect();
        RadialSnapshot {
            round,
            boundary_cv: boundary_cv(&occupied, spec.radius),
            agents_inside: occupied.len() as u32,
            occupied,
        }
    };
    if rounds.first() == Some(&0) {
        snapshots.push(capture(&sim, 0));
        rounds.remove(0);
    }
    for &target in &rounds {
        while sim.round() < target && !sim.all_evacuated() {
            sim.step();
        }
        snapshots.push(capture(&sim, target));
    }
    Ok((scenario, snapshots))
}

/// Parameters of the two-route comparison.
#[derive(Debug, Clone, Copy)]
pub struct TwoRoutesSpec {
    pub v_max: u8,
    pub k_s: f64,
    pub repetitions: u32,
    pub seed: u64,
    pub field: FieldVariant,
}

impl Default for TwoRoutesSpec {
    fn default() -> Self {
        TwoRoutesSpec {
            v_max: 1,
            k_s: 10.0,
            repetitions: 10,
            seed: 1,
            field: FieldVariant::IntegerEuclidean,
        }
    }
}

/// Leg lengths of the two routes. Route A walks two axis legs; route B walks
/// four diagonal legs with the same total axis extent, so its real length is
/// √2 times route A's. Each leg runs as its own corridor scenario with the
/// far-end cells as relay exits; leg times (exit-entry convention) are
/// summed.
pub const ROUTE_A_LEGS: [u32; 2] = [145, 145];
/// Diagonal axis extents of route B.
pub const ROUTE_B_LEGS: [u32; 4] = [73, 72, 73, 72];

/// Mean walking times and ratio columns for one speed.
#[derive(Debug, Clone, Serialize)]
pub struct TwoRoutesResult {
    pub v_max: u8,
    pub t_a: f64,
    pub t_b: f64,
    pub ratio: f64,
    pub ratio_vs_sqrt2: f64,
    /// True when a requested real-valued field required the geodesic
    /// fallback in any leg (never the case for these corridors).
    pub field_fell_back: bool,
}

fn run_leg(
    scenario: &Scenario,
    start: Cell,
    v_max: u8,
    k_s: f64,
    variant: FieldVariant,
    seed: u64,
    stream: u64,
) -> Result<(u64, bool)> {
    let field = compute_static_field(scenario, variant);
    let fell_back = field.fell_back();
    let mut sim = Simulation::new(
        scenario.clone(),
        field,
        &[(start, v_max)],
        SimulationOptions {
            k_s,
            seed,
            stream,
            ..SimulationOptions::default()
        },
    )?;
    let max_rounds = 20_000;
    let out = sim.run_until_empty(max_rounds);
    match out.evacuation_rounds[0] {
        Some(r) => Ok((r, fell_back)),
        None => bail!(TimeoutError { max_rounds }),
    }
}

/// Runs the two-route comparison for one speed.
pub fn experiment_two_routes(spec: &TwoRoutesSpec) -> Result<TwoRoutesResult> {
    let legs_a: Vec<(Scenario, Cell)> = ROUTE_A_LEGS
        .iter()
        .map(|&l| {
            let (sc, start, _) = builtins::axis_corridor(l);
            (sc, start)
        })
        .collect();
    let legs_b: Vec<(Scenario, Cell)> = ROUTE_B_LEGS
        .iter()
        .map(|&l| {
            let (sc, start, _) = builtins::diagonal_corridor(l);
            (sc, start)
        })
        .collect();
    let mut t_a = Vec::new();
    let mut t_b = Vec::new();
    let mut fell_back = false;
    for rep in 0..spec.repetitions {
        let mut total = 0u64;
        for (i, (sc, start)) in legs_a.iter().enumerate() {
            let stream = rep as u64 * 16 + i as u64;
            let (t, fb) = run_leg(
                sc, *start, spec.v_max, spec.k_s, spec.field, spec.seed, stream,
            )?;
            total += t;
            fell_back |= fb;
        }
        t_a.push(total as f64);
        let mut total = 0u64;
        for (i, (sc, start)) in legs_b.iter().enumerate() {
            let stream = rep as u64 * 16 + 8 + i as u64;
            let (t, fb) = run_leg(
                sc, *start, spec.v_max, spec.k_s, spec.field, spec.seed, stream,
            )?;
            total += t;
            fell_back |= fb;
        }
        t_b.push(total as f64);
    }
    let (a, b) = (stats::mean(&t_a), stats::mean(&t_b));
    Ok(TwoRoutesResult {
        v_max: spec.v_max,
        t_a: a,
        t_b: b,
        ratio: b / a,
        ratio_vs_sqrt2: b / (SQRT_2 * a),
        field_fell_back: fell_back,
    })
}

/// CSV rendering of two-route results for several speeds.
pub fn two_routes_csv(rows: &[TwoRoutesResult]) -> String {
    let mut out = String::from("v,t_a,t_b,ratio,ratio_vs_sqrt2\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.1},{:.1},{:.2},{:.3}",
            r.v_max, r.t_a, r.t_b, r.ratio, r.ratio_vs_sqrt2
        );
    }
    out
}
