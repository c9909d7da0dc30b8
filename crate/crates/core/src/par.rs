//! Ordered data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature the work runs on a rayon pool; without it (or
//! with [`Execution::Sequential`]) it runs on the calling thread. Results are
//! always returned in input order so downstream reductions are deterministic.

use serde::{Deserialize, Serialize};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "ZITTERLAB_THREADS";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this build can actually run work in parallel.
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// Thread cap from [`THREADS_ENV`], if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Maps `f` over `items`, preserving order.
pub fn map_ordered<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        Execution::Sequential => items.iter().map(f).collect(),
        Execution::Parallel => parallel_map(items, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;

    match thread_cap() {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
            Err(_) => items.par_iter().map(&f).collect(),
        },
        None => items.par_iter().map(&f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Elementwise compensated sum of equally long vectors.
pub fn sum_vectors<'a>(len: usize, parts: impl IntoIterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut acc = vec![CompensatedSum::default(); len];
    for part in parts {
        debug_assert_eq!(part.len(), len);
        for (a, &x) in acc.iter_mut().zip(part) {
            a.add(x);
        }
    }
    acc.iter().map(CompensatedSum::value).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_map_matches_sequential() {
        let items: Vec<u64> = (0..1000).collect();
        let a = map_ordered(Execution::Sequential, &items, |x| x * x);
        let b = map_ordered(Execution::Parallel, &items, |x| x * x);
        assert_eq!(a, b);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }

    #[test]
    fn vector_sum_is_order_independent() {
        let parts: Vec<Vec<f64>> = (0..50)
            .map(|i| {
                (0..8)
                    .map(|j| ((i * 7 + j) as f64).sin() * 10f64.powi(i % 9 - 4))
                    .collect()
            })
            .collect();
        let fwd = sum_vectors(8, parts.iter().map(Vec::as_slice));
        let rev = sum_vectors(8, parts.iter().rev().map(Vec::as_slice));
        for (a, b) in fwd.iter().zip(rev.iter()) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}
