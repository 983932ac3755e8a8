//! Seed derivation and Monte Carlo aggregation.
//!
//! Trial `i` of a run with master seed `s` always draws from the ChaCha8
//! stream `(s, i)`, so aggregates do not depend on how trials are split
//! across worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub type TrialRng = ChaCha8Rng;

/// Generator for trial `stream` of the run seeded by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub variance: f64,
    pub samples: u64,
}

impl Estimate {
    /// Summarises values in their given order.
    pub fn from_values(values: &[f64]) -> Estimate {
        let n = values.len() as f64;
        if values.is_empty() {
            return Estimate { mean: f64::NAN, std_error: f64::NAN, variance: f64::NAN, samples: 0 };
        }
        let mean = values.iter().sum::<f64>() / n;
        let variance = if values.len() > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Estimate { mean, std_error: (variance / n).sqrt(), variance, samples: values.len() as u64 }
    }

    /// Summarises integer-valued trials from exact power sums.
    pub fn from_sums(samples: u64, sum: u128, sum_sq: u128) -> Estimate {
        let n = samples as f64;
        let mean = sum as f64 / n;
        let variance = if samples > 1 {
            let centred = sum_sq as f64 - (sum as f64) * (sum as f64) / n;
            (centred / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        Estimate { mean, std_error: (variance / n).sqrt(), variance, samples }
    }

    /// Binomial frequency estimate.
    pub fn from_hits(samples: u64, hits: u64) -> Estimate {
        let p = hits as f64 / samples as f64;
        let variance = p * (1.0 - p);
        Estimate { mean: p, std_error: (variance / samples as f64).sqrt(), variance, samples }
    }

    /// Distance from `target` in units of standard error (infinite when the
    /// error is zero and the mean differs).
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.mean - target).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

/// Runs `trials` independent integer-valued trials in parallel and returns
/// the exact sum and sum of squares.
pub fn integer_trials<F>(seed: u64, trials: u64, f: F) -> (u128, u128)
where
    F: Fn(&mut TrialRng) -> u64 + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let v = f(&mut stream_rng(seed, i)) as u128;
            (v, v * v)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// Runs `trials` independent trials in parallel, returning results in trial
/// order.
pub fn collect_trials<T, F>(seed: u64, trials: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut TrialRng) -> T + Sync,
{
    (0..trials).into_par_iter().map(|i| f(&mut stream_rng(seed, i))).collect()
}
