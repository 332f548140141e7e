//! Order-preserving map over independent work items.
//!
//! With the `parallel` feature (default) the map runs on the rayon thread
//! pool; without it the same code path degrades to a plain sequential loop.
//! Results come back in input order either way, so reductions that break
//! ties by index stay deterministic regardless of scheduling.

#[cfg(feature = "parallel")]
pub fn map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Send + Sync,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Send + Sync,
{
    items.into_iter().map(f).collect()
}

/// Sequential reference path, kept available under every feature set so the
/// bench suite can compare it against [`map`] in a single build.
pub fn map_serial<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}
