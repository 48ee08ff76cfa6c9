//! Quantitative experiments: exact enumerations, Monte Carlo estimates and
//! validators for the analytic tail bounds.
//!
//! Monte Carlo work is cut into fixed batches of [`BATCH`] samples; batch `i`
//! uses the child stream `i` of the caller's [`RngStream`]. Results depend
//! only on the seed, stream and sample count, never on the thread count.

mod bounds;
mod macdonald;
mod tv;
mod wilf;

pub use bounds::*;
pub use macdonald::*;
pub use tv::*;
pub use wilf::*;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{precondition, Result};
use crate::rng::RngStream;

/// Samples per Monte Carlo batch.
pub const BATCH: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactEnumeration,
    ExactRatio,
    MonteCarlo,
}

/// A probability estimate with its provenance.
#[derive(Clone, Debug, Serialize)]
pub struct Estimate {
    pub value: f64,
    /// Zero exactly when `method` is exact.
    pub stderr: f64,
    /// Draws for Monte Carlo, objects enumerated for exact methods.
    pub samples: u64,
    pub seed: u64,
    pub stream_id: u64,
    pub method: Method,
}

impl Estimate {
    pub fn exact(value: f64, samples: u64, method: Method) -> Self {
        Self {
            value,
            stderr: 0.0,
            samples,
            seed: 0,
            stream_id: 0,
            method,
        }
    }

    /// Bernoulli estimate with `stderr = √(v(1−v)/samples)`.
    pub fn bernoulli(hits: u64, samples: u64, stream: RngStream) -> Self {
        let v = hits as f64 / samples as f64;
        Self {
            value: v,
            stderr: (v * (1.0 - v) / samples as f64).sqrt(),
            samples,
            seed: stream.seed,
            stream_id: stream.stream_id,
            method: Method::MonteCarlo,
        }
    }

    /// `|self − reference| ≤ sigmas · stderr`.
    pub fn agrees_with(&self, reference: f64, sigmas: f64) -> bool {
        (self.value - reference).abs() <= sigmas * self.stderr
    }
}

/// Runs `f(rng, count)` on every batch in parallel, in batch order.
pub(crate) fn mc_batches<T, F>(samples: u64, stream: RngStream, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let batches = samples.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .map(|i| {
            let count = BATCH.min(samples - i * BATCH);
            f(&mut stream.child(i).rng(), count)
        })
        .collect()
}

/// Counts Monte Carlo successes of `event`.
pub(crate) fn mc_hits<F>(samples: u64, stream: RngStream, event: F) -> u64
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    mc_batches(samples, stream, |rng, count| {
        (0..count).filter(|_| event(rng)).count() as u64
    })
    .into_iter()
    .sum()
}

pub(crate) fn check_samples(samples: u64) -> Result<()> {
    if samples == 0 {
        return Err(precondition("samples must be positive"));
    }
    Ok(())
}
