//! Exact enumeration and seeded Monte Carlo tools for k-cycle factors in
//! random cubic graphs and for renewal processes without replacement.

pub mod comb;
pub mod combinatorics;
pub mod conditioning;
pub mod cycle_factors;
pub mod error;
pub mod graph;
pub mod lengths;
pub mod pairing;
pub mod patterns;
pub mod power_series;
pub mod renewal;
pub mod rng;

#[cfg(test)]
mod proptests;

pub use error::{Error, Result};
pub use graph::Multigraph;
pub use pairing::{CycleCensus, Pairing};
pub use cycle_factors::{MomentReport, RodFactor};
pub use lengths::LengthMultiset;
pub use power_series::{LimitConstants, TruncatedSeries};
pub use renewal::{HitProbability, Variant};
pub use rng::Estimate;

/// Version string recorded in experiment headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
