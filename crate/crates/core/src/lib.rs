//! Single-facility location in L_p space: strategyproof mechanisms, seeded
//! property checks with replayable witnesses, and numerical tools for the
//! two-agent characterization and the maximum-cost lower bound.

pub mod characterization;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod mechanisms;
pub mod properties;

pub use error::{Error, Result};
pub use geometry::{lp_distance, PlaneRotation, Point, Profile, SpaceConfig};
pub use mechanisms::{evaluate, Extreme, MechanismSpec, Slope};
pub use properties::{run_check, CheckConfig, Property, PropertyReport, Verdict};
