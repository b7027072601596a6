//! Cardinality-constrained maximization of the placement objective.

mod baseline;
mod certificate;
mod check;
mod greedy;

pub use baseline::{
    binomial, exhaustive_place, exhaustive_place_with, random_place, DEFAULT_ENUMERATION_CAP,
};
pub use certificate::{
    curvature, curvature_with, optimality_bound, Bound, Certificate, CurvatureReport,
    DEAD_SINGLETON_TOL,
};
pub use check::{
    check_submodularity, check_submodularity_with, evaluate_chain, sample_chain, ChainMargins,
    ChainSample, SubmodularityReport, VIOLATION_TOL,
};
pub use greedy::{greedy_place, greedy_place_with, lazy_greedy_place};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{GramState, ObjectiveContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Greedy,
    LazyGreedy,
    Random,
    Exhaustive,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Greedy => "greedy",
            Method::LazyGreedy => "lazy-greedy",
            Method::Random => "random",
            Method::Exhaustive => "exhaustive",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of one placement run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub method: Method,
    /// Chosen candidate indices, in pick order.
    pub chosen: Vec<usize>,
    /// `gains[k] = f(S_{k+1}) − f(S_k)`.
    pub gains: Vec<f64>,
    /// Cumulative `f` after each pick.
    pub values: Vec<f64>,
    pub final_value: f64,
    /// Number of marginal-gain or objective evaluations spent.
    pub evaluations: u64,
}

impl SelectionResult {
    /// Replays `order` through a Gram state to fill gains and values.
    pub(crate) fn from_order(
        ctx: &ObjectiveContext,
        method: Method,
        order: &[usize],
        evaluations: u64,
    ) -> Result<Self> {
        let mut state = GramState::empty(ctx);
        let mut gains = Vec::with_capacity(order.len());
        let mut values = Vec::with_capacity(order.len());
        for &u in order {
            let gain = state.marginal_gain(u, ctx)?;
            let next = state.update(u, ctx)?;
            gains.push(gain);
            values.push(next.value());
            state = next;
        }
        Ok(SelectionResult {
            method,
            chosen: order.to_vec(),
            gains,
            values,
            final_value: state.value(),
            evaluations,
        })
    }
}

pub(crate) fn check_budget(ctx: &ObjectiveContext, budget: usize) -> Result<()> {
    if budget == 0 || budget > ctx.len() {
        return Err(Error::BudgetOutOfRange {
            budget,
            ground: ctx.len(),
        });
    }
    Ok(())
}
