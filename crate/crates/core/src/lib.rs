//! Agents hunting a treasure among a fixed set of locations, optionally
//! learning from each other's actions by a naive Bayesian update.
//!
//! The crate covers the simulator ([`engine`], [`belief`], [`world`]), the
//! measurements taken from it ([`metrics`]), the information measures they
//! rest on ([`infotheory`]), and the relevant-information trade-off curve
//! those measurements are compared against ([`relinfo`]). Named experiment
//! presets and observation-probability sweeps live in [`scenario`].

pub mod belief;
pub mod engine;
pub mod error;
pub mod infotheory;
pub mod metrics;
pub mod relinfo;
pub mod scenario;
pub mod world;

pub use belief::{Belief, LikelihoodMatrix};
pub use engine::{
    calibrate_counts, calibrate_likelihood, calibration_rng, run_batch, run_rng, run_simulation,
    Action, Agent, AgentConfig, Policy, RunRecord, ScenarioConfig, Simulation, UpdateTiming,
};
pub use error::{Error, Result};
pub use infotheory::{Distribution, JointDistribution};
pub use metrics::{AgentSelector, JointCounts, MeasuredPoint};
pub use relinfo::{ri_closed_form, ri_minimize, Strategy, TradeoffPoint, UtilityMatrix};
pub use scenario::{Preset, Scenario, ScenarioParams, SweepParameter, SweepPoint, SweepSpec};
pub use world::WorldState;
