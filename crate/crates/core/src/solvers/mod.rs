//! Quasi-static and explicit dynamic solvers.

pub mod explicit;
pub mod newton;
pub mod timestep;

pub use explicit::{DynamicState, EnergyReport, ExplicitIntegrator, StepEvents};
pub use newton::{newton_quasistatic, NewtonSettings, QuasiStaticResult, StepRecord};
pub use timestep::{stable_timestep, TimestepEstimate, DEFAULT_SAFETY};
