//! Square-lattice speed neighborhoods and a floor-field pedestrian automaton.
//!
//! In a cellular-automaton model of pedestrian motion an agent's speed `v` is
//! the number of cells it may advance per round. Which cells count as "one
//! round away" is a choice of *neighborhood*, and that choice decides how
//! strongly simulated travel times depend on the angle between the direction
//! of motion and the lattice axes.
//!
//! This crate provides the building blocks to quantify and minimize that
//! angular anisotropy:
//!
//! * [`geometry`] enumerates *complete* neighborhoods (integer discs keyed by
//!   their maximum squared cell distance `d²`), extracts their first-octant
//!   border staircase and convex hull, and decides whether a neighborhood can
//!   be composed from von Neumann and Moore steps.
//! * [`kinematics`] turns a border into the direction-dependent speed
//!   `v(φ)`, evaluates its direction average and angular deviation in closed
//!   form (with an adaptive-quadrature cross-check), and selects the best
//!   neighborhood per integer speed.
//! * [`floorfield`] describes scenarios (grid, walls, exits) and computes the
//!   static distance-to-exit potential in real, integer-rounded and
//!   grid-geodesic variants.
//! * [`simulator`] runs the round-based automaton: parallel destination
//!   choice within per-speed neighborhoods, then sequential greedy movement
//!   with cell exclusion and round blocking.
//!
//! The crate is `no_std` (it requires `alloc`); all floating-point math goes
//! through `libm` so results are identical across targets.

#![no_std]
#![warn(missing_docs)]

extern crate alloc;

#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod floorfield;
pub mod geometry;
pub mod kinematics;
pub mod simulator;

pub use floorfield::{Cell, FieldVariant, Scenario, StaticField};
pub use geometry::{BorderStaircase, CellOffset, Neighborhood, StepKind};
pub use kinematics::{BorderMode, NeighborhoodReport, SelectionMode, SpeedProfile};
pub use simulator::{AgentState, RunOutcome, Simulation};
