//! Worker pools and order-fixed reductions.
//!
//! Per-item work may run on any number of threads, but sums are always taken
//! over a binary tree whose shape depends only on the item count, so results
//! are bit-identical for every worker count.

use rayon::{ThreadPool, ThreadPoolBuilder};

/// A pool with exactly `workers` threads (at least one).
pub fn pool(workers: usize) -> ThreadPool {
    ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool")
}

/// Pairwise tree sum of equally long vectors; splits at `len / 2`.
pub fn tree_sum(items: &[Vec<f64>]) -> Vec<f64> {
    assert!(!items.is_empty(), "tree_sum of nothing");
    if items.len() == 1 {
        return items[0].clone();
    }
    let mid = items.len() / 2;
    let mut left = tree_sum(&items[..mid]);
    let right = tree_sum(&items[mid..]);
    for (l, r) in left.iter_mut().zip(&right) {
        *l += r;
    }
    left
}

/// Pairwise tree sum of scalars.
pub fn tree_sum_scalar(items: &[f64]) -> f64 {
    match items.len() {
        0 => 0.0,
        1 => items[0],
        len => tree_sum_scalar(&items[..len / 2]) + tree_sum_scalar(&items[len / 2..]),
    }
}
