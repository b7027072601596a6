//! Reference placements: uniform random subsets and exhaustive search.

use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::Cholesky;
use crate::objective::ObjectiveContext;

use super::{check_budget, Method, SelectionResult};

pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// `budget` distinct candidates drawn uniformly without replacement.
pub fn random_place<R: Rng + ?Sized>(
    ctx: &ObjectiveContext,
    budget: usize,
    rng: &mut R,
) -> Result<SelectionResult> {
    check_budget(ctx, budget)?;
    let order = rand::seq::index::sample(rng, ctx.len(), budget).into_vec();
    SelectionResult::from_order(ctx, Method::Random, &order, budget as u64)
}

/// `n choose k`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc·(n−i)/(i+1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i + 1) as u128,
            None => return u128::MAX,
        };
    }
    acc
}

pub fn exhaustive_place(ctx: &ObjectiveContext, budget: usize) -> Result<SelectionResult> {
    exhaustive_place_with(ctx, budget, DEFAULT_ENUMERATION_CAP, Execution::default())
}

/// Exact maximizer over all `budget`-subsets, enumerated in lexicographic
/// order. Ties keep the lexicographically smallest tuple.
pub fn exhaustive_place_with(
    ctx: &ObjectiveContext,
    budget: usize,
    cap: u128,
    exec: Execution,
) -> Result<SelectionResult> {
    check_budget(ctx, budget)?;
    let n = ctx.len();
    let subsets = binomial(n, budget);
    if subsets > cap {
        return Err(Error::EnumerationCap { subsets, cap });
    }

    // One work item per leading index; items are reduced in index order so
    // the earliest tuple wins ties regardless of scheduling.
    let firsts = n - budget + 1;
    let per_first =
        crate::exec::map_range(exec, firsts, |first| best_with_first(ctx, first, budget));
    let mut best: Option<(Vec<usize>, f64)> = None;
    for item in per_first {
        let (tuple, value) = item?;
        if best.as_ref().is_none_or(|(_, bv)| value > *bv) {
            best = Some((tuple, value));
        }
    }
    let (tuple, _) = best.expect("at least one subset");
    SelectionResult::from_order(ctx, Method::Exhaustive, &tuple, subsets as u64)
}

fn best_with_first(
    ctx: &ObjectiveContext,
    first: usize,
    budget: usize,
) -> Result<(Vec<usize>, f64)> {
    let n = ctx.len();
    let rest = budget - 1;
    let mut tail: Vec<usize> = (first + 1..first + 1 + rest).collect();
    let mut tuple = Vec::with_capacity(budget);
    let mut best: Option<(Vec<usize>, f64)> = None;
    loop {
        tuple.clear();
        tuple.push(first);
        tuple.extend_from_slice(&tail);
        let value = subset_value(ctx, &tuple)?;
        if best.as_ref().is_none_or(|(_, bv)| value > *bv) {
            best = Some((tuple.clone(), value));
        }
        if !next_combination(&mut tail, n) {
            break;
        }
    }
    Ok(best.expect("at least one subset"))
}

fn subset_value(ctx: &ObjectiveContext, set: &[usize]) -> Result<f64> {
    let mut g = crate::channel::CMatrix::zeros(ctx.n_tx(), ctx.n_tx());
    for &u in set {
        ctx.add_increment(&mut g, u, 1.0);
    }
    Ok(Cholesky::factor_identity_plus(&g)?.log_det())
}

/// Advances a strictly increasing index tuple with entries below `n` to its
/// lexicographic successor. Returns `false` after the last tuple.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - (k - i) {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
