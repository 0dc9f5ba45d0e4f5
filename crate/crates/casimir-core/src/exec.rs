//! Deterministic work mapping: parallel via rayon when the `parallel`
//! feature is on, sequential otherwise. Outputs are always collected in
//! input order so downstream reductions are bitwise-stable regardless of
//! thread count. A runtime switch forces the sequential path so tests and
//! benches can compare both in one build.

use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Force the sequential path even when compiled with `parallel`.
/// Only changes scheduling; results are identical either way.
pub fn force_sequential(on: bool) {
    FORCE_SEQUENTIAL.store(on, Ordering::Relaxed);
}

pub fn sequential_forced() -> bool {
    FORCE_SEQUENTIAL.load(Ordering::Relaxed)
}

/// Map `f` over `items`, returning results in input order.
#[cfg(feature = "parallel")]
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    if sequential_forced() {
        items.iter().map(f).collect()
    } else {
        items.par_iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.iter().map(f).collect()
}
