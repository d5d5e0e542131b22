//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the helpers dispatch to rayon; without it they
//! are ordinary iterator pipelines. [`sequential`] forces the sequential path
//! for the duration of a closure on the calling thread, which is how the
//! benches compare both paths in one binary. Every helper preserves input
//! order, so results are identical on either path.

use std::cell::Cell;

thread_local! {
    static FORCE_SEQUENTIAL: Cell<bool> = const { Cell::new(false) };
}

/// Runs `f` with all helpers on this thread pinned to the sequential path.
pub fn sequential<R>(f: impl FnOnce() -> R) -> R {
    let prev = FORCE_SEQUENTIAL.with(|c| c.replace(true));
    let out = f();
    FORCE_SEQUENTIAL.with(|c| c.set(prev));
    out
}

/// True when helpers called from this thread would fan out.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.with(|c| c.get())
}

/// Order-preserving map over a slice.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Order-preserving map over `0..n`.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Minimum of `f` over a slice, ties to the lowest index. `None` when empty.
pub fn min_by_key_f64<T, F>(items: &[T], f: F) -> Option<(usize, f64)>
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync + Send,
{
    let pick = |a: (usize, f64), b: (usize, f64)| {
        if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) {
            b
        } else {
            a
        }
    };
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return items
            .par_iter()
            .enumerate()
            .map(|(i, t)| (i, f(t)))
            .reduce_with(pick);
    }
    items.iter().enumerate().map(|(i, t)| (i, f(t))).reduce(pick)
}
