//! Placement of reflecting surfaces around a MIMO radar by greedy
//! maximization of a log-determinant mutual-information objective.
//!
//! The pipeline is: [`geometry`] discretizes the coverage area into
//! candidate cells, [`channel`] synthesizes the cascaded surface channels,
//! [`objective`] evaluates `f(S) = ln det(H_S H_Sᴴ + I)`, and [`optimizer`]
//! selects placements and certifies them through the objective's curvature.

pub mod channel;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod linalg;
pub mod objective;
pub mod optimizer;

pub use error::{Error, Result};
pub use exec::Execution;
pub use objective::{GramState, ObjectiveContext};
