//! Execution helpers: data-parallel maps with a sequential fallback.
//!
//! All parallelism in this crate funnels through [`indexed_map`]. Results are
//! collected in index order and reduced sequentially afterwards, so the
//! numerical output is bit-identical whether the `parallel` feature is on or
//! off and regardless of the worker count.

use crate::error::{Error, Result};

/// Evaluate `f(0..n)` and collect the results in index order.
///
/// Runs on the rayon pool when the `parallel` feature is enabled, otherwise
/// sequentially. The bounds are identical in both builds.
#[cfg(feature = "parallel")]
pub fn indexed_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Evaluate `f(0..n)` and collect the results in index order.
///
/// Runs on the rayon pool when the `parallel` feature is enabled, otherwise
/// sequentially. The bounds are identical in both builds.
#[cfg(not(feature = "parallel"))]
pub fn indexed_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    indexed_map_seq(n, f)
}

/// Sequential version of [`indexed_map`]; the body used when `parallel` is
/// disabled. Exposed so benchmarks can compare both paths in one build.
pub fn indexed_map_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Configure the number of worker threads used by [`indexed_map`].
///
/// Must be called before the first parallel operation; later calls fail
/// because the global pool is already initialized. Without the `parallel`
/// feature this is a no-op.
#[cfg(feature = "parallel")]
pub fn set_worker_threads(n: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))
}

/// Configure the number of worker threads used by [`indexed_map`].
///
/// Must be called before the first parallel operation; later calls fail
/// because the global pool is already initialized. Without the `parallel`
/// feature this is a no-op.
#[cfg(not(feature = "parallel"))]
pub fn set_worker_threads(_n: usize) -> Result<()> {
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_index_order() {
        let out = indexed_map(100, |i| i * i);
        let expect: Vec<usize> = (0..100).map(|i| i * i).collect();
        assert_eq!(out, expect);
        assert_eq!(indexed_map_seq(100, |i| i * i), expect);
    }
}
