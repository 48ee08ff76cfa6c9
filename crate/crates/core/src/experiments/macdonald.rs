use rayon::prelude::*;
use serde::Serialize;

use super::{check_samples, mc_batches, Estimate, Method};
use crate::asymptotics::headline_bound;
use crate::error::{Error, Result};
use crate::partition::{all_partitions, prefix_dominated};
use crate::rng::RngStream;
use crate::sampling::sample_uniform_exact;
use crate::table::RestrictedCountTable;

/// Largest `n` for the exhaustive pair count.
pub const MACDONALD_ENUMERATION_CAP: u32 = 25;

/// Exact pair count behind `Q(n)`.
#[derive(Clone, Debug, Serialize)]
pub struct ComparableCount {
    pub n: u32,
    /// Ordered pairs `(λ, μ)` with `μ ⪯ λ`.
    pub comparable_pairs: u64,
    pub total_pairs: u64,
    pub estimate: Estimate,
}

/// `Q(n) = #{(λ, μ) : μ ⪯ λ} / p(n)²` by double enumeration.
pub fn macdonald_comparable_exact(n: u32) -> Result<ComparableCount> {
    if n > MACDONALD_ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            n: n.into(),
            cap: MACDONALD_ENUMERATION_CAP.into(),
        });
    }
    let all = all_partitions(n);
    let comparable: u64 = all
        .par_iter()
        .map(|lam| {
            all.iter()
                .filter(|mu| prefix_dominated(mu.parts(), lam.parts()))
                .count() as u64
        })
        .sum();
    let total = (all.len() as u64).pow(2);
    Ok(ComparableCount {
        n,
        comparable_pairs: comparable,
        total_pairs: total,
        estimate: Estimate::exact(
            comparable as f64 / total as f64,
            total,
            Method::ExactEnumeration,
        ),
    })
}

/// Monte Carlo `Q(n)` and `P(λ ⪯ λ')` from the same draws.
#[derive(Clone, Debug, Serialize)]
pub struct MacdonaldEstimate {
    pub n: u32,
    /// `P(Δ ⪯ Λ)` for independent uniform `Λ`, `Δ`.
    pub comparable: Estimate,
    /// `P(Λ ⪯ Λ')` against the conjugate of the first draw.
    pub self_dual: Estimate,
    /// `exp(−0.11 log n / log log n)` when `n ≥ 16`, for comparison.
    pub headline_bound: Option<f64>,
}

pub fn macdonald_comparable_mc(
    n: u32,
    samples: u64,
    stream: RngStream,
    table: &RestrictedCountTable,
) -> Result<MacdonaldEstimate> {
    check_samples(samples)?;
    if n == 0 {
        return Err(crate::error::precondition("macdonald needs n >= 1"));
    }
    sample_uniform_exact(n, &mut stream.rng(), table)?;
    let counts = mc_batches(samples, stream, |rng, count| {
        let (mut pair, mut dual) = (0u64, 0u64);
        for _ in 0..count {
            let lam = sample_uniform_exact(n, rng, table).expect("table checked");
            let delta = sample_uniform_exact(n, rng, table).expect("table checked");
            pair += u64::from(prefix_dominated(delta.parts(), lam.parts()));
            let conj = lam.conjugate();
            dual += u64::from(prefix_dominated(lam.parts(), conj.parts()));
        }
        (pair, dual)
    });
    let (pair, dual) = counts
        .into_iter()
        .fold((0, 0), |(a, b), (x, y)| (a + x, b + y));
    Ok(MacdonaldEstimate {
        n,
        comparable: Estimate::bernoulli(pair, samples, stream),
        self_dual: Estimate::bernoulli(dual, samples, stream),
        headline_bound: headline_bound(n.into(), 0.11).ok(),
    })
}
