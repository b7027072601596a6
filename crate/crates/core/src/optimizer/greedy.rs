//! Plain and lazy greedy selection.
//!
//! Both pick, in each round, the unselected candidate with the largest
//! marginal gain and break ties toward the lowest index, so they return
//! the same sequence. The lazy variant keeps each candidate's last gain as
//! an upper bound (valid by diminishing returns) and only re-evaluates
//! candidates whose bound could still beat the best fresh gain.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::Result;
use crate::exec::{argmax, better, Execution};
use crate::objective::ObjectiveContext;

use super::{check_budget, Method, SelectionResult};

pub fn greedy_place(ctx: &ObjectiveContext, budget: usize) -> Result<SelectionResult> {
    greedy_place_with(ctx, budget, Execution::default())
}

pub fn greedy_place_with(
    ctx: &ObjectiveContext,
    budget: usize,
    exec: Execution,
) -> Result<SelectionResult> {
    check_budget(ctx, budget)?;
    let n = ctx.len();
    let mut state = ctx.empty_state();
    let mut chosen = Vec::with_capacity(budget);
    let mut gains = Vec::with_capacity(budget);
    let mut values = Vec::with_capacity(budget);
    let mut evaluations = 0u64;

    for round in 0..budget {
        let (u, gain) = argmax(exec, n, |u| {
            (!state.contains(u)).then(|| state.gain_unchecked(u, ctx))
        })
        .expect("budget ≤ ground set leaves a candidate");
        evaluations += (n - round) as u64;
        state = state.update(u, ctx)?;
        chosen.push(u);
        gains.push(gain);
        values.push(state.value());
    }

    Ok(SelectionResult {
        method: Method::Greedy,
        chosen,
        gains,
        values,
        final_value: state.value(),
        evaluations,
    })
}

// Stale bounds are widened by this much before they are trusted, so that
// rounding in the Cholesky solve cannot make a stale bound undercut the
// fresh gain it stands for.
const STALE_SLACK_REL: f64 = 1e-9;
const STALE_SLACK_ABS: f64 = 1e-12;

fn widen(bound: f64) -> f64 {
    bound + STALE_SLACK_REL * bound.abs() + STALE_SLACK_ABS
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    bound: f64,
    index: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // max-heap: larger bound first, then smaller index
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then_with(|| other.index.cmp(&self.index))
    }
}

pub fn lazy_greedy_place(ctx: &ObjectiveContext, budget: usize) -> Result<SelectionResult> {
    check_budget(ctx, budget)?;
    let mut state = ctx.empty_state();
    let mut heap: BinaryHeap<Entry> = (0..ctx.len())
        .map(|index| Entry {
            bound: f64::INFINITY,
            index,
        })
        .collect();
    let mut chosen = Vec::with_capacity(budget);
    let mut gains = Vec::with_capacity(budget);
    let mut values = Vec::with_capacity(budget);
    let mut evaluations = 0u64;
    let mut refreshed = Vec::new();

    for _ in 0..budget {
        // Everything in the heap is stale at the start of a round; entries
        // refreshed this round wait in `refreshed` until the pick is made.
        let mut best: Option<(usize, f64)> = None;
        while let Some(top) = heap.peek() {
            if let Some((bi, bg)) = best {
                let key = widen(top.bound);
                if key < bg || (key == bg && top.index > bi) {
                    break;
                }
            }
            let top = heap.pop().expect("peeked");
            let gain = state.gain_unchecked(top.index, ctx);
            evaluations += 1;
            let fresh = (top.index, gain);
            best = Some(match best {
                None => fresh,
                Some(b) => {
                    let win = better(b, fresh);
                    let lose = if win.0 == b.0 { fresh } else { b };
                    refreshed.push(Entry {
                        bound: lose.1,
                        index: lose.0,
                    });
                    win
                }
            });
        }
        let (u, gain) = best.expect("budget ≤ ground set leaves a candidate");
        heap.extend(refreshed.drain(..));
        state = state.update(u, ctx)?;
        chosen.push(u);
        gains.push(gain);
        values.push(state.value());
    }

    Ok(SelectionResult {
        method: Method::LazyGreedy,
        chosen,
        gains,
        values,
        final_value: state.value(),
        evaluations,
    })
}
