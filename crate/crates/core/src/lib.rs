//! Agent-based models with birth, death and locally dependent state
//! changes, a synchronous simulation engine, and global recurrence rule
//! (GRR) estimators that predict expected per-state populations without
//! running simulations.
//!
//! Two model families ship with the crate: the continuous-space
//! Game-of-Life-like family in [`gol`] and a rib development model in
//! [`rib`]. [`ensemble`] produces the seeded Monte Carlo averages the
//! estimators in [`grr`] are compared against.

pub mod agent;
pub mod ensemble;
mod error;
pub mod gol;
pub mod grr;
pub mod model;
pub mod rib;
pub mod rng;
pub mod space;

pub use agent::{count_by_state, Agent, Population, StateId, StateTable};
pub use ensemble::{run_ensemble, EnsembleConfig, Trajectory, TrajectoryRow};
pub use error::{Error, Result};
pub use gol::{build_gol_model, GolParams};
pub use grr::{ExpectedCounts, NeighborLaw, RegionProbabilities, Stepper};
pub use model::{Initializer, ModelDefinition, Snapshot, UpdateRules};
pub use rib::{build_rib_model, Genotype, RibOverrides, RibParams};
pub use rng::{AgentRandomness, RandomStream, SeedTree};
pub use space::{Environment, Neighborhood, Position};

/// Master seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_917;
