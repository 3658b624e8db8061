//! Adaptive hybrid event-triggered backstepping control for strict-feedback
//! plants with asymmetric full-state constraints, plus a deterministic
//! closed-loop simulator.

pub mod config;
pub mod constraint;
pub mod controller;
pub mod differentiator;
pub mod error;
pub mod integrator;
pub mod observer;
pub mod plant;
pub mod rbf;
pub mod report;
pub mod sim;
pub mod sweep;
pub mod trigger;
pub mod verify;

pub use config::ExperimentConfig;
pub use error::{ConfigIssue, Error, Result};
pub use sim::{run_simulation, RunFailure, RunSummary, SimulationTrace};
