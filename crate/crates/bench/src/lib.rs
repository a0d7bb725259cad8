//! Shared fixtures for the criterion benchmarks.

use gennum::prelude::*;

/// The full default dyadic gauge used by the library.
pub fn full_gauge() -> Gauge {
    Gauge::default()
}

/// A reduced gauge for the heavier transform benchmarks.
pub fn small_gauge() -> Gauge {
    Gauge::dyadic(4, 16, 10, 20)
}
