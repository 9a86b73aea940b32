//! Process-wide size caps.
//!
//! Each cap has a default and can be changed at runtime; the element cap is
//! also read once from `WITTKIT_MAX_ELEMS` on first use.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Once;

pub const DEFAULT_MAX_ELEMENTS: usize = 10_000;
pub const DEFAULT_MAX_TUPLES: usize = 1_000_000;
pub const DEFAULT_MAX_DEGREE: usize = 64;
pub const DEFAULT_MAX_TERMS: usize = 200_000;

static MAX_ELEMENTS: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_ELEMENTS);
static MAX_TUPLES: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_TUPLES);
static MAX_DEGREE: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_DEGREE);
static MAX_TERMS: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_TERMS);
static ENV_INIT: Once = Once::new();

pub const ENV_MAX_ELEMS: &str = "WITTKIT_MAX_ELEMS";

fn init_from_env() {
    ENV_INIT.call_once(|| {
        if let Some(n) = std::env::var(ENV_MAX_ELEMS)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
        {
            MAX_ELEMENTS.store(n, Ordering::Relaxed);
        }
    });
}

/// Largest poset accepted by validation.
pub fn max_elements() -> usize {
    init_from_env();
    MAX_ELEMENTS.load(Ordering::Relaxed)
}

pub fn set_max_elements(n: usize) {
    init_from_env();
    MAX_ELEMENTS.store(n, Ordering::Relaxed);
}

/// Largest tuple set enumerated while building an exponential diagram.
pub fn max_tuples() -> usize {
    MAX_TUPLES.load(Ordering::Relaxed)
}

pub fn set_max_tuples(n: usize) {
    MAX_TUPLES.store(n, Ordering::Relaxed);
}

/// Largest norm for which universal polynomials are built.
pub fn max_degree() -> usize {
    MAX_DEGREE.load(Ordering::Relaxed)
}

pub fn set_max_degree(n: usize) {
    MAX_DEGREE.store(n, Ordering::Relaxed);
}

/// Largest number of terms allowed in a single universal polynomial.
pub fn max_terms() -> usize {
    MAX_TERMS.load(Ordering::Relaxed)
}

pub fn set_max_terms(n: usize) {
    MAX_TERMS.store(n, Ordering::Relaxed);
}
