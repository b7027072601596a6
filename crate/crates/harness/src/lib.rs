//! Experiment harness for surface placement studies: scenario files,
//! the place/sweep/curvature/compare/check drivers, and their outputs.

pub mod cli;
pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{load_config, parse_config, ScenarioConfig};
pub use error::HarnessError;
