//! JSON simulation configs and the builtin scenario generators.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use stepfield_core::floorfield::{compute_static_field, Cell, FieldVariant, Scenario, StaticField};
use stepfield_core::simulator::{Simulation, SimulationOptions};

use crate::experiments::builtins;
use crate::scenario_fmt;

/// Field variant names used in configs and CLI flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FieldChoice {
    /// Integer-rounded Euclidean distance (the published default).
    Integer,
    /// Real-valued Euclidean distance.
    Real,
    /// Grid-geodesic distance (Dijkstra over non-wall cells).
    Geodesic,
}

impl From<FieldChoice> for FieldVariant {
    fn from(c: FieldChoice) -> FieldVariant {
        match c {
            FieldChoice::Integer => FieldVariant::IntegerEuclidean,
            FieldChoice::Real => FieldVariant::RealEuclidean,
            FieldChoice::Geodesic => FieldVariant::GridGeodesic,
        }
    }
}

/// Scenario source: a map file or a builtin generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioSource {
    /// Load from a text map file.
    Path(PathBuf),
    /// Generate one of the builtin scenarios.
    Builtin(BuiltinScenario),
}

/// Builtin scenario generators.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BuiltinScenario {
    /// Open rectangle with one exit displaced `(dx, dy)` from the start,
    /// with `margin` free cells around the course.
    Course { dx: u32, dy: u32, margin: u32 },
    /// Disc of the given radius with four exit cells at the center.
    Circle { radius: u32 },
    /// Straight corridor (width 3) of the given length with an exit line at
    /// the far end.
    AxisCorridor { length: u32 },
    /// Diagonal corridor (width 3) of the given axis extent.
    DiagonalCorridor { length: u32 },
}

/// Agent speed assignment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeedAssignment {
    /// Same maximum speed for everyone.
    Uniform(u8),
    /// One speed per agent, same order as the placement list.
    PerAgent(Vec<u8>),
}

/// Agent placement.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentPlacement {
    /// Explicit start cells.
    Cells(Vec<(i32, i32)>),
    /// `count` agents drawn uniformly without replacement from the free
    /// non-exit cells (seeded by the config seed, RNG stream 0).
    Random { count: u32 },
}

/// Round-blocking options.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockingOptions {
    /// Whether an agent's round-start cell blocks others (default true).
    #[serde(default = "default_true")]
    pub include_start_cell: bool,
}

fn default_true() -> bool {
    true
}

impl Default for BlockingOptions {
    fn default() -> Self {
        BlockingOptions {
            include_start_cell: true,
        }
    }
}

/// A complete simulation configuration.
///
/// The coupling keys `herding`, `inertia`, `wall_distance` and
/// `agent_distance` are reserved for model extensions: the schema accepts
/// them, but any present value is rejected at build time as unimplemented.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub scenario: ScenarioSource,
    pub k_s: f64,
    pub seed: u64,
    #[serde(default)]
    pub stream: u64,
    pub max_rounds: u64,
    pub field: FieldChoice,
    pub speeds: SpeedAssignment,
    pub agents: AgentPlacement,
    #[serde(default)]
    pub blocking: BlockingOptions,
    #[serde(default)]
    pub herding: Option<f64>,
    #[serde(default)]
    pub inertia: Option<f64>,
    #[serde(default)]
    pub wall_distance: Option<f64>,
    #[serde(default)]
    pub agent_distance: Option<f64>,
}

impl SimulationConfig {
    /// Parses a config from JSON text.
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Loads a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Builds the scenario (loading or generating as configured).
    pub fn build_scenario(&self) -> Result<Scenario> {
        match &self.scenario {
            ScenarioSource::Path(p) => scenario_fmt::load(p),
            ScenarioSource::Builtin(b) => Ok(match b {
                BuiltinScenario::Course { dx, dy, margin } => builtins::course(*dx, *dy, *margin).0,
                BuiltinScenario::Circle { radius } => builtins::circle(*radius),
                BuiltinScenario::AxisCorridor { length } => builtins::axis_corridor(*length).0,
                BuiltinScenario::DiagonalCorridor { length } => {
                    builtins::diagonal_corridor(*length).0
                }
            }),
        }
    }

    /// Builds the ready-to-run simulation.
    pub fn build(&self) -> Result<(Simulation, StaticField)> {
        for (key, value) in [
            ("herding", self.herding),
            ("inertia", self.inertia),
            ("wall_distance", self.wall_distance),
            ("agent_distance", self.agent_distance),
        ] {
            if value.is_some() {
                bail!("coupling `{key}` is reserved but not implemented");
            }
        }
        let scenario = self.build_scenario()?;
        let field = compute_static_field(&scenario, self.field.into());
        if field.fell_back() {
            eprintln!(
                "warning: real-valued field is invalid with these walls; \
                 fell back to the grid-geodesic field"
            );
        }
        let starts: Vec<Cell> = match &self.agents {
            AgentPlacement::Cells(cells) => cells.iter().map(|&(x, y)| Cell::new(x, y)).collect(),
            AgentPlacement::Random { count } => {
                builtins::random_free_cells(&scenario, *count, self.seed)
            }
        };
        let speeds: Vec<u8> = match &self.speeds {
            SpeedAssignment::Uniform(v) => vec![*v; starts.len()],
            SpeedAssignment::PerAgent(vs) => {
                if vs.len() != starts.len() {
                    bail!(
                        "speed list has {} entries for {} agents",
                        vs.len(),
                        starts.len()
                    );
                }
                vs.clone()
            }
        };
        let agents: Vec<(Cell, u8)> = starts.into_iter().zip(speeds).collect();
        let sim = Simulation::new(
            scenario,
            field.clone(),
            &agents,
            SimulationOptions {
                k_s: self.k_s,
                block_start_cell: self.blocking.include_start_cell,
                seed: self.seed,
                stream: self.stream,
            },
        )?;
        Ok((sim, field))
    }
}
