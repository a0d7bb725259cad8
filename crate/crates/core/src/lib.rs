//! Computational engine for Robinson–Colombeau generalized complex numbers.
//!
//! The engine works with ε-indexed nets evaluated on a finite dyadic grid.
//! Every asymptotic verdict (negligible, moderate, convergent, …) is a
//! finite-evidence statement at a declared horizon (`q_max`, grid, budgets)
//! and the horizons travel with the reports.
//!
//! Layers, bottom up:
//! - [`xc`]: scaled complex arithmetic `m·2^e` with unbounded exponent range;
//! - [`gauge`]: the gauge/grid, generalized numbers, valuation, sharp order;
//! - [`hypernat`]: hypernatural numbers, nearest-integer rounding;
//! - [`hyperseq`]: hypersequences, hyperlimits, Cauchy criterion;
//! - [`hyperseries`]: hyperfinite sums, convergence classification and tests;
//! - [`hps`]: hyper-power series, radius, set-of-convergence membership;
//! - [`mollifier`]: the compactly-supported bump β and its entire transform μ;
//! - [`ghf`]: contour coefficient extraction, Liouville, zeros, continuation;
//! - [`hft`]: the hyperfinite Fourier transform and its theorem suite;
//! - [`oracle`]: independent reference quadrature/differentiation/summation.

pub mod gauge;
pub mod ghf;
pub mod hft;
pub mod hps;
pub mod hypernat;
pub mod hyperseq;
pub mod hyperseries;
pub mod mollifier;
pub mod oracle;
pub mod xc;

pub mod prelude {
    pub use crate::gauge::{
        sharp_compare, valuation, CompareVerdict, Gauge, GenComplex, GridPoint, NetClass,
        ValuationReport,
    };
    pub use crate::hypernat::HyperNatural;
    pub use crate::xc::Xc;
}
