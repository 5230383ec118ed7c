//! Node-loop execution.
//!
//! Every per-node kernel in the crate goes through these helpers. With the
//! `parallel` feature (default) they fan out over the rayon pool; without it
//! they run as plain iterators on the calling thread. Results are identical
//! either way because each node is computed independently.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Collects `f(i)` for `i in 0..n`, preserving order.
pub fn collect_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Fallible variant of [`collect_indexed`]. Returns the error of the lowest
/// failing index so diagnostics are deterministic.
pub fn try_collect_indexed<T, E, F>(n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Send + Sync,
{
    let results = collect_indexed(n, f);
    results.into_iter().collect()
}

/// Maximum of `f(i)` over `0..n`; `0.0` for an empty range. NaN propagates.
pub fn max_indexed<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Send + Sync,
{
    let pick = |a: f64, b: f64| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) };
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).reduce(|| 0.0, pick)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).fold(0.0, pick)
    }
}

/// Runs `op` on a dedicated pool of `threads` workers. Without the
/// `parallel` feature this just calls `op`.
pub fn with_threads<R: Send>(threads: usize, op: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(op),
            Err(_) => op(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        op()
    }
}

/// Whether node loops run on the rayon pool.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let v = collect_indexed(1000, |i| i * 2);
        assert!(v.iter().enumerate().all(|(i, &x)| x == 2 * i));
    }

    #[test]
    fn first_error_wins() {
        let r: Result<Vec<usize>, usize> =
            try_collect_indexed(100, |i| if i % 10 == 7 { Err(i) } else { Ok(i) });
        assert_eq!(r, Err(7));
    }

    #[test]
    fn max_handles_empty_and_nan() {
        assert_eq!(max_indexed(0, |_| 1.0), 0.0);
        assert_eq!(max_indexed(5, |i| i as f64), 4.0);
        assert!(max_indexed(5, |i| if i == 3 { f64::NAN } else { 1.0 }).is_nan());
    }

    #[test]
    fn single_thread_pool_matches() {
        let a = collect_indexed(257, |i| (i as f64).sin());
        let b = with_threads(1, || collect_indexed(257, |i| (i as f64).sin()));
        assert_eq!(a, b);
    }
}
