//! Curvature of the objective over the whole grid and the greedy guarantee
//! it implies.
//!
//! With `c = 1 − min_j (f(A) − f(A∖{j})) / f({j})`, greedy satisfies
//! `f(S_gr) ≥ c⁻¹(1 − e⁻ᶜ)·f(S*) ≥ (1 − 1/e)·f(S*)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_range, Execution};
use crate::linalg::Cholesky;
use crate::objective::ObjectiveContext;

/// Singletons with `f({j})` at or below this are treated as dead channels
/// and left out of the curvature minimum.
pub const DEAD_SINGLETON_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    /// `c⁻¹(1 − e⁻ᶜ)`.
    pub tight: f64,
    /// `1 − 1/e`.
    pub loose: f64,
}

pub fn optimality_bound(curvature: f64) -> Result<Bound> {
    if !(0.0..=1.0).contains(&curvature) {
        return Err(Error::CurvatureOutOfRange(curvature));
    }
    let tight = if curvature == 0.0 {
        1.0
    } else {
        -(-curvature).exp_m1() / curvature
    };
    Ok(Bound {
        tight,
        loose: -(-1f64).exp_m1(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub curvature: f64,
    /// Candidate attaining the minimum ratio.
    pub argmin: usize,
    /// `(f(A) − f(A∖{j})) / f({j})` at the arg-min.
    pub min_ratio: f64,
    /// `f(A)`.
    pub full_value: f64,
    /// Candidates skipped because `f({j})` is zero.
    pub dead: Vec<usize>,
}

pub fn curvature(ctx: &ObjectiveContext) -> Result<CurvatureReport> {
    curvature_with(ctx, Execution::default())
}

/// Exhaustive scan over the ground set: one full evaluation, one
/// leave-one-out and one singleton evaluation per candidate.
pub fn curvature_with(ctx: &ObjectiveContext, exec: Execution) -> Result<CurvatureReport> {
    let n = ctx.len();
    let all: Vec<usize> = (0..n).collect();
    let full = ctx.increment_sum(&all)?;
    let full_value = Cholesky::factor_identity_plus(&full)?.log_det();

    let ratios = map_range(exec, n, |j| -> Result<Option<f64>> {
        let single = (ctx.weight(j) * ctx.n_tx() as f64).ln_1p();
        if single <= DEAD_SINGLETON_TOL {
            return Ok(None);
        }
        let mut without = full.clone();
        ctx.add_increment(&mut without, j, -1.0);
        let loo = Cholesky::factor_identity_plus(&without)?.log_det();
        Ok(Some((full_value - loo) / single))
    });

    let mut dead = Vec::new();
    let mut best: Option<(usize, f64)> = None;
    for (j, r) in ratios.into_iter().enumerate() {
        match r? {
            None => dead.push(j),
            Some(ratio) => {
                if best.is_none_or(|(_, b)| ratio < b) {
                    best = Some((j, ratio));
                }
            }
        }
    }
    if !dead.is_empty() {
        log::warn!(
            "{} candidate(s) with zero singleton value left out of the curvature",
            dead.len()
        );
    }
    let (argmin, min_ratio) = best.ok_or(Error::UndefinedCurvature)?;
    Ok(CurvatureReport {
        curvature: (1.0 - min_ratio).clamp(0.0, 1.0),
        argmin,
        min_ratio,
        full_value,
        dead,
    })
}

/// Curvature, the two guarantee factors, and the exact optimum when known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub curvature: f64,
    pub tight_factor: f64,
    pub loose_factor: f64,
    pub optimum: Option<f64>,
}

impl Certificate {
    pub fn new(curvature: f64, optimum: Option<f64>) -> Result<Self> {
        let b = optimality_bound(curvature)?;
        Ok(Certificate {
            curvature,
            tight_factor: b.tight,
            loose_factor: b.loose,
            optimum,
        })
    }

    /// `f(S_gr) ≥ tight·f(S*) ≥ loose·f(S*)` with `slack` absolute tolerance.
    /// Always true when the optimum is unknown.
    pub fn holds(&self, greedy_value: f64, slack: f64) -> bool {
        match self.optimum {
            None => true,
            Some(opt) => {
                greedy_value + slack >= self.tight_factor * opt
                    && self.tight_factor * opt + slack >= self.loose_factor * opt
            }
        }
    }
}
