//! Round-based automaton: parallel destination choice, sequential movement.
//!
//! Each round has two phases. First every agent, in parallel from the same
//! pre-round snapshot, samples a *destination* cell from the neighborhood
//! assigned to its maximum speed, weighted by `exp(k_S·(S_max − S))` over the
//! candidate cells. Then the agents move sequentially in a freshly drawn
//! random order: each repeats greedy Moore steps towards its destination —
//! always to the admissible adjacent cell strictly closest to the
//! destination — until it arrives or no admissible improving cell remains.
//! Cells used during the round stay blocked until the round ends, and at most
//! one agent occupies a cell at any time. Entering an exit removes the agent.
//! The speed neighborhood caps the whole round: no step may take an agent
//! farther from its round-start cell than the neighborhood reaches, so the
//! net per-round displacement lies within it even on detours.
//!
//! Movement is deterministic; all randomness (destination sampling and the
//! phase-2 order) comes from one seedable ChaCha8 stream, so a seed plus a
//! configuration reproduces a run bit for bit. Independent repetitions should
//! use the same seed with distinct ChaCha stream numbers
//! ([`Simulation::new`]'s `stream` option).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::floorfield::{Cell, Scenario, StaticField};
use crate::geometry::{cells_of, CellOffset};
use crate::kinematics::{select_neighborhood, SelectionMode};

/// Movement tie-break order: N, E, S, W, NE, SE, SW, NW. North is `−y`
/// (towards the first map row).
const COMPASS: [(i32, i32); 8] = [
    (0, -1),
    (1, 0),
    (0, 1),
    (-1, 0),
    (1, -1),
    (1, 1),
    (-1, 1),
    (-1, -1),
];

/// One agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentState {
    /// Stable identifier (index into the agent list).
    pub id: u32,
    /// Current cell while in the scenario; the exit cell after evacuation.
    pub position: Cell,
    /// Maximum speed in cells per round, `1 ..= 10`.
    pub v_max: u8,
    /// Destination chosen in the current round, if any.
    pub destination: Option<Cell>,
    /// Round in which the agent entered an exit, once evacuated.
    pub evacuated_at: Option<u64>,
}

impl AgentState {
    /// Whether the agent already left through an exit.
    pub fn evacuated(&self) -> bool {
        self.evacuated_at.is_some()
    }
}

/// Simulation construction errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimulationError {
    /// Field dimensions do not match the scenario.
    FieldMismatch,
    /// An agent starts outside the grid or on a wall.
    BadStartCell(Cell),
    /// Two agents start on the same cell.
    StartCellOccupied(Cell),
    /// Speeds must lie in `1 ..= 10` (the canonically selected range).
    BadSpeed(u8),
}

impl fmt::Display for SimulationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimulationError::FieldMismatch => write!(f, "field does not match scenario size"),
            SimulationError::BadStartCell(c) => write!(f, "agent start {c} is not a free cell"),
            SimulationError::StartCellOccupied(c) => write!(f, "two agents start on {c}"),
            SimulationError::BadSpeed(v) => write!(f, "agent speed {v} outside 1..=10"),
        }
    }
}

impl core::error::Error for SimulationError {}

/// Tunables beyond scenario and field.
#[derive(Debug, Clone, Copy)]
pub struct SimulationOptions {
    /// Coupling strength of the static field in the destination weights.
    pub k_s: f64,
    /// Whether an agent's starting cell of the round blocks other agents
    /// (the cited blocking rule; default true).
    pub block_start_cell: bool,
    /// RNG seed.
    pub seed: u64,
    /// ChaCha stream id, for independent repetitions under one seed.
    pub stream: u64,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        SimulationOptions {
            k_s: 1.0,
            block_start_cell: true,
            seed: 0,
            stream: 0,
        }
    }
}

/// Result of [`Simulation::run_until_empty`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    /// Rounds executed.
    pub rounds: u64,
    /// True when `max_rounds` elapsed with agents still in the scenario.
    pub timed_out: bool,
    /// Per-agent evacuation round, indexed by agent id; `None` for agents
    /// still inside (only possible after a timeout).
    pub evacuation_rounds: Vec<Option<u64>>,
}

/// The canonical step offsets for speed `v`, sorted lexicographically.
pub fn speed_offsets(v: u8) -> Vec<CellOffset> {
    let d2 =
        select_neighborhood(v as u32, SelectionMode::Canonical).expect("speed must be in 1..=10");
    cells_of(d2).cells().to_vec()
}

/// Samples a destination for an agent at `from` with the given step offsets.
///
/// Candidates are the neighborhood cells on the grid that are not walls and
/// have a finite field value; occupied cells stay eligible (conflicts are
/// resolved by the movement phase). Weights are `exp(k_S·(S_max − S))` with
/// `S_max` taken over the candidate set; the weights are evaluated in the
/// shift-invariant form `exp(−k_S·(S − S_min))`, which leaves the normalized
/// distribution unchanged and never overflows. A walled-in agent (no
/// candidate at all) keeps its current cell.
pub fn sample_destination(
    scenario: &Scenario,
    field: &StaticField,
    offsets: &[CellOffset],
    from: Cell,
    k_s: f64,
    rng: &mut impl RngCore,
) -> Cell {
    let mut candidates: Vec<(Cell, f64)> = Vec::with_capacity(offsets.len());
    let mut s_min = f64::INFINITY;
    for &o in offsets {
        let c = Cell::new(from.x + o.x, from.y + o.y);
        if scenario.is_wall(c) {
            continue;
        }
        let s = field.value(c);
        if !s.is_finite() {
            continue;
        }
        if s < s_min {
            s_min = s;
        }
        candidates.push((c, s));
    }
    if candidates.is_empty() {
        return from;
    }
    let mut total = 0.0;
    for (_, s) in candidates.iter_mut() {
        let w = libm::exp(-k_s * (*s - s_min));
        *s = w;
        total += w;
    }
    let u: f64 = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for &(c, w) in &candidates {
        acc += w;
        if u < acc {
            return c;
        }
    }
    candidates.last().expect("non-empty").0
}

/// A running simulation instance.
pub struct Simulation {
    scenario: Scenario,
    field: StaticField,
    agents: Vec<AgentState>,
    offsets: Vec<Vec<CellOffset>>, // indexed by v_max, 0 unused
    speed_d2: [i64; 11],           // canonical d² per speed, 0 unused
    occupancy: Vec<Option<u32>>,
    blocked: Vec<u64>, // round stamp; cell blocked while stamp == round
    round: u64,
    k_s: f64,
    block_start_cell: bool,
    rng: ChaCha8Rng,
}

impl Simulation {
    /// Builds a simulation with agents given as `(start cell, v_max)`.
    pub fn new(
        scenario: Scenario,
        field: StaticField,
        agents: &[(Cell, u8)],
        options: SimulationOptions,
    ) -> Result<Self, SimulationError> {
        if field.width() != scenario.width() || field.height() != scenario.height() {
            return Err(SimulationError::FieldMismatch);
        }
        let n = scenario.width() as usize * scenario.height() as usize;
        let mut occupancy: Vec<Option<u32>> = vec![None; n];
        let mut states = Vec::with_capacity(agents.len());
        let mut offsets: Vec<Vec<CellOffset>> = vec![Vec::new(); 11];
        let mut speed_d2 = [0i64; 11];
        for v in 1..=10u32 {
            speed_d2[v as usize] =
                select_neighborhood(v, SelectionMode::Canonical).expect("1..=10") as i64;
        }
        for (i, &(pos, v)) in agents.iter().enumerate() {
            if !(1..=10).contains(&v) {
                return Err(SimulationError::BadSpeed(v));
            }
            if scenario.is_wall(pos) {
                return Err(SimulationError::BadStartCell(pos));
            }
            let idx = scenario.index(pos);
            if occupancy[idx].is_some() {
                return Err(SimulationError::StartCellOccupied(pos));
            }
            occupancy[idx] = Some(i as u32);
            if offsets[v as usize].is_empty() {
                offsets[v as usize] = speed_offsets(v);
            }
            states.push(AgentState {
                id: i as u32,
                position: pos,
                v_max: v,
                destination: None,
                evacuated_at: None,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        rng.set_stream(options.stream);
        Ok(Simulation {
            scenario,
            field,
            agents: states,
            offsets,
            speed_d2,
            occupancy,
            blocked: vec![0; n],
            round: 0,
            k_s: options.k_s,
            block_start_cell: options.block_start_cell,
            rng,
        })
    }

    /// The scenario being simulated.
    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// The static field driving destination choice.
    pub fn field(&self) -> &StaticField {
        &self.field
    }

    /// Agent states, indexed by id.
    pub fn agents(&self) -> &[AgentState] {
        &self.agents
    }

    /// Rounds executed so far.
    pub fn round(&self) -> u64 {
        self.round
    }

    /// Whether every agent has evacuated.
    pub fn all_evacuated(&self) -> bool {
        self.agents.iter().all(AgentState::evacuated)
    }

    /// Executes one round: destination phase, then sequential movement in a
    /// fresh random order. Blocking marks are implicit per-round stamps, so
    /// they reset at the round boundary. With no agents left the round
    /// counter still advances.
    pub fn step(&mut self) {
        self.round += 1;
        // Phase 1: all agents choose destinations against the same pre-round
        // snapshot. The choice depends only on the static field and the
        // agent's own position, so iterating in id order realizes the
        // parallel semantics while keeping RNG consumption deterministic.
        for i in 0..self.agents.len() {
            if self.agents[i].evacuated() {
                continue;
            }
            let a = &self.agents[i];
            let dest = sample_destination(
                &self.scenario,
                &self.field,
                &self.offsets[a.v_max as usize],
                a.position,
                self.k_s,
                &mut self.rng,
            );
            self.agents[i].destination = Some(dest);
        }
        // Phase 2: random movement order.
        let mut order: Vec<u32> = self
            .agents
            .iter()
            .filter(|a| !a.evacuated())
            .map(|a| a.id)
            .collect();
        for i in (1..order.len()).rev() {
            let j = self.rng.gen_range(0..=i);
            order.swap(i, j);
        }
        for id in order {
            self.move_agent(id as usize);
        }
    }

    /// Greedy movement of one agent towards its destination.
    fn move_agent(&mut self, idx: usize) {
        // An agent already standing on an exit (possible only by initial
        // placement) leaves on its first movement turn.
        let here = self.agents[idx].position;
        if self.scenario.is_exit(here) {
            let i = self.scenario.index(here);
            self.occupancy[i] = None;
            self.blocked[i] = self.round;
            self.agents[idx].evacuated_at = Some(self.round);
            self.agents[idx].destination = None;
            return;
        }
        let dest = match self.agents[idx].destination {
            Some(d) => d,
            None => return,
        };
        let start = self.agents[idx].position;
        let reach = self.speed_d2[self.agents[idx].v_max as usize];
        let mut pos = start;
        if self.block_start_cell {
            let i = self.scenario.index(pos);
            self.blocked[i] = self.round;
        }
        while pos != dest {
            let mut best: Option<(i64, Cell)> = None;
            let here = pos.dist2(dest);
            for &(dx, dy) in &COMPASS {
                let c = Cell::new(pos.x + dx, pos.y + dy);
                if self.scenario.is_wall(c) {
                    continue;
                }
                let ci = self.scenario.index(c);
                if self.occupancy[ci].is_some() || self.blocked[ci] == self.round {
                    continue;
                }
                // The speed neighborhood caps the whole round's movement:
                // detours around blocked cells may not exceed it.
                if c.dist2(start) > reach {
                    continue;
                }
                let d = c.dist2(dest);
                // Strict improvement; first hit in compass order wins ties.
                if d < here && best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, c));
                }
            }
            let next = match best {
                Some((_, c)) => c,
                None => break, // stuck this round
            };
            let from_i = self.scenario.index(pos);
            let to_i = self.scenario.index(next);
            debug_assert_eq!(self.occupancy[from_i], Some(idx as u32));
            self.occupancy[from_i] = None;
            self.blocked[from_i] = self.round;
            self.blocked[to_i] = self.round;
            pos = next;
            self.agents[idx].position = pos;
            if self.scenario.is_exit(pos) {
                self.agents[idx].evacuated_at = Some(self.round);
                self.agents[idx].destination = None;
                return; // cell stays free; it was stamped blocked above
            }
            self.occupancy[to_i] = Some(idx as u32);
        }
    }

    /// Runs rounds until every agent has evacuated or `max_rounds` elapsed.
    ///
    /// Evacuation rounds are 1-based and count the round in which the agent
    /// stepped onto an exit. Reports a timeout with partial results when
    /// agents remain.
    pub fn run_until_empty(&mut self, max_rounds: u64) -> RunOutcome {
        let start = self.round;
        while !self.all_evacuated() && self.round - start < max_rounds {
            self.step();
        }
        RunOutcome {
            rounds: self.round - start,
            timed_out: !self.all_evacuated(),
            evacuation_rounds: self.agents.iter().map(|a| a.evacuated_at).collect(),
        }
    }
}
