//! IO, file formats and the experiment harness for `stepfield-core`.

pub mod config;
pub mod experiments;
pub mod pgm;
pub mod scenario_fmt;
pub mod stats;
pub mod tables;

/// Error marker for simulation timeouts; the CLI maps it to exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("simulation timed out after {max_rounds} rounds")]
pub struct TimeoutError {
    /// The round budget that was exhausted.
    pub max_rounds: u64,
}
