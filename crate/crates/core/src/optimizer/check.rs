//! Randomized audit of monotonicity and diminishing returns.
//!
//! Each trial draws a chain `S ⊆ T ⊆ A` and a candidate `u ∉ T`, then checks
//! `f(T) ≥ f(S)` and `f(S ∪ {u}) − f(S) ≥ f(T ∪ {u}) − f(T)`.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec::{map_range, Execution};
use crate::objective::ObjectiveContext;

pub const VIOLATION_TOL: f64 = 1e-9;

/// Largest `|T|` drawn by default.
const DEFAULT_MAX_CHAIN: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSample {
    pub small: Vec<usize>,
    pub large: Vec<usize>,
    pub extra: usize,
}

/// Violation margins of one chain; both are `≤ 0` when the properties hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainMargins {
    /// `f(S) − f(S ∪ T)`.
    pub monotonicity: f64,
    /// `gain(T, u) − gain(S, u)`.
    pub diminishing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmodularityReport {
    pub trials: usize,
    pub monotonicity_violations: usize,
    pub diminishing_violations: usize,
    pub worst_monotonicity_margin: f64,
    pub worst_diminishing_margin: f64,
}

impl SubmodularityReport {
    pub fn passed(&self) -> bool {
        self.monotonicity_violations == 0 && self.diminishing_violations == 0
    }
}

/// Draws one chain. `T` has between 0 and `max_large` elements (bounded by
/// the grid), `S` is a uniformly sized random subset of `T`, and the extra
/// candidate lies outside `T`. Requires a non-empty grid.
pub fn sample_chain<R: Rng + ?Sized>(n: usize, max_large: usize, rng: &mut R) -> ChainSample {
    assert!(n >= 1, "cannot sample a chain from an empty grid");
    let extra = rng.random_range(0..n);
    let large_len = rng.random_range(0..=max_large.min(n - 1));
    let large: Vec<usize> = sample(rng, n - 1, large_len)
        .into_iter()
        .map(|k| if k >= extra { k + 1 } else { k })
        .collect();
    let small_len = rng.random_range(0..=large_len);
    let small = sample(rng, large_len, small_len)
        .into_iter()
        .map(|k| large[k])
        .collect();
    ChainSample {
        small,
        large,
        extra,
    }
}

/// Margins for one chain. `small` must be a subset of `large`.
pub fn evaluate_chain(ctx: &ObjectiveContext, chain: &ChainSample) -> Result<ChainMargins> {
    let small_state = ctx.state_for(&chain.small)?;
    let mut large_state = small_state.clone();
    for &u in chain.large.iter().filter(|u| !chain.small.contains(u)) {
        large_state = large_state.update(u, ctx)?;
    }
    let gain_small = small_state.marginal_gain(chain.extra, ctx)?;
    let gain_large = large_state.marginal_gain(chain.extra, ctx)?;
    Ok(ChainMargins {
        monotonicity: small_state.value() - large_state.value(),
        diminishing: gain_large - gain_small,
    })
}

pub fn check_submodularity<R: Rng + ?Sized>(
    ctx: &ObjectiveContext,
    trials: usize,
    rng: &mut R,
) -> Result<SubmodularityReport> {
    check_submodularity_with(ctx, trials, DEFAULT_MAX_CHAIN, rng, Execution::default())
}

/// Chains are drawn sequentially from `rng` and evaluated with `exec`, so
/// the report depends only on the seed.
pub fn check_submodularity_with<R: Rng + ?Sized>(
    ctx: &ObjectiveContext,
    trials: usize,
    max_large: usize,
    rng: &mut R,
    exec: Execution,
) -> Result<SubmodularityReport> {
    let chains: Vec<ChainSample> = (0..trials)
        .map(|_| sample_chain(ctx.len(), max_large, rng))
        .collect();
    let margins = map_range(exec, chains.len(), |k| evaluate_chain(ctx, &chains[k]));

    let mut report = SubmodularityReport {
        trials,
        monotonicity_violations: 0,
        diminishing_violations: 0,
        worst_monotonicity_margin: f64::NEG_INFINITY,
        worst_diminishing_margin: f64::NEG_INFINITY,
    };
    for m in margins {
        let m = m?;
        if m.monotonicity > VIOLATION_TOL {
            report.monotonicity_violations += 1;
        }
        if m.diminishing > VIOLATION_TOL {
            report.diminishing_violations += 1;
        }
        report.worst_monotonicity_margin = report.worst_monotonicity_margin.max(m.monotonicity);
        report.worst_diminishing_margin = report.worst_diminishing_margin.max(m.diminishing);
    }
    Ok(report)
}
