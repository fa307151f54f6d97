//! Deterministic data-parallel sweeps.
//!
//! Monte Carlo style sweeps (many scenarios, many sample paths) map an
//! index range through a pure function. With the `parallel` feature the map
//! runs on the rayon thread pool; without it the same code path runs
//! sequentially. Results are collected in index order either way, so a
//! sweep's output is a pure function of its inputs and never depends on
//! scheduling. Work items must derive any randomness from their own index.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n`, collecting results in index order.
///
/// Uses the rayon pool when the `parallel` feature is enabled, otherwise
/// falls back to [`map_indexed_seq`].
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_indexed_seq(n, f)
    }
}

/// Sequential reference implementation of [`map_indexed`].
///
/// Always available so benchmarks can compare the two execution modes
/// within a single build.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
