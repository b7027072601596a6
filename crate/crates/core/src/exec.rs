//! Sequential/parallel dispatch for the data-parallel scans.
//!
//! Every parallel path reduces with a total order so its result is
//! bit-identical to the sequential one. Without the `parallel` feature,
//! [`Execution::Parallel`] silently runs sequentially.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Whether work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Higher score wins; equal scores go to the lower index.
#[inline]
pub(crate) fn better(a: (usize, f64), b: (usize, f64)) -> (usize, f64) {
    match b.1.total_cmp(&a.1) {
        Ordering::Greater => b,
        Ordering::Less => a,
        Ordering::Equal => {
            if b.0 < a.0 {
                b
            } else {
                a
            }
        }
    }
}

/// Arg-max of `score` over `0..n`, skipping indices where it returns `None`.
pub(crate) fn argmax<F>(exec: Execution, n: usize, score: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> Option<f64> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n)
            .into_par_iter()
            .filter_map(|i| score(i).map(|s| (i, s)))
            .reduce_with(better);
    }
    let _ = exec;
    (0..n)
        .filter_map(|i| score(i).map(|s| (i, s)))
        .reduce(better)
}

/// `f` applied to each index in `0..n`, collected in order.
pub(crate) fn map_range<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}
