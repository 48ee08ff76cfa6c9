use num_bigint::BigUint;
use serde::Serialize;

use super::{check_samples, mc_hits, Estimate, Method};
use crate::count::{count_partitions, ratio_f64, ser_decimal};
use crate::error::{precondition, Error, Result};
use crate::partition::{nash_williams_parts, par_fold_partitions};
use crate::rng::RngStream;
use crate::sampling::sample_uniform_exact;
use crate::table::RestrictedCountTable;

/// Largest `n` handled by exhaustive enumeration by default.
pub const WILF_ENUMERATION_CAP: u32 = 80;

fn check_even(n: u32) -> Result<()> {
    if n == 0 || n % 2 == 1 {
        return Err(precondition(format!("n = {n} must be even and positive")));
    }
    Ok(())
}

/// Number of graphical partitions of `n`, by exhaustive enumeration split
/// across threads by largest part.
pub fn count_graphical(n: u32, cap: u32) -> Result<u64> {
    if n > cap {
        return Err(Error::EnumerationCap {
            n: n.into(),
            cap: cap.into(),
        });
    }
    Ok(par_fold_partitions(
        n,
        0u64,
        |acc, parts| *acc += u64::from(nash_williams_parts(parts)),
        |a, b| a + b,
    ))
}

/// Exact fraction of graphical partitions of an even `n ≤ cap`.
pub fn wilf_fraction_exact_capped(n: u32, cap: u32) -> Result<Estimate> {
    check_even(n)?;
    let g = count_graphical(n, cap)?;
    let total = count_partitions(n.into());
    let samples = u64::try_from(&total).unwrap_or(u64::MAX);
    Ok(Estimate::exact(
        ratio_f64(&BigUint::from(g), &total),
        samples,
        Method::ExactEnumeration,
    ))
}

pub fn wilf_fraction_exact(n: u32) -> Result<Estimate> {
    wilf_fraction_exact_capped(n, WILF_ENUMERATION_CAP)
}

/// Monte Carlo fraction of graphical partitions using the exact sampler.
pub fn wilf_fraction_mc(
    n: u32,
    samples: u64,
    stream: RngStream,
    table: &RestrictedCountTable,
) -> Result<Estimate> {
    check_even(n)?;
    check_samples(samples)?;
    // surface table errors before fanning out
    sample_uniform_exact(n, &mut stream.rng(), table)?;
    let hits = mc_hits(samples, stream, |rng| {
        let p = sample_uniform_exact(n, rng, table).expect("table checked");
        nash_williams_parts(p.parts())
    });
    Ok(Estimate::bernoulli(hits, samples, stream))
}

#[derive(Clone, Debug, Serialize)]
pub struct FractionRow {
    pub n: u32,
    #[serde(serialize_with = "ser_opt_decimal")]
    pub graphical_count: Option<BigUint>,
    #[serde(serialize_with = "ser_decimal")]
    pub total: BigUint,
    pub fraction: Estimate,
}

fn ser_opt_decimal<S: serde::Serializer>(x: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => ser_decimal(v, s),
        None => s.serialize_none(),
    }
}

/// Graphical fractions for a range of even `n`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct FractionSeries {
    pub rows: Vec<FractionRow>,
}

impl FractionSeries {
    /// Exact rows for every even `n` in `[2, n_max]`.
    pub fn exact(n_max: u32, cap: u32) -> Result<Self> {
        let mut rows = Vec::new();
        for n in (2..=n_max).step_by(2) {
            let g = count_graphical(n, cap)?;
            let total = count_partitions(n.into());
            let samples = u64::try_from(&total).unwrap_or(u64::MAX);
            let fraction = Estimate::exact(
                ratio_f64(&BigUint::from(g), &total),
                samples,
                Method::ExactEnumeration,
            );
            rows.push(FractionRow {
                n,
                graphical_count: Some(g.into()),
                total,
                fraction,
            });
        }
        Ok(Self { rows })
    }

    /// Values of `n` where the exact fraction increases over the previous row.
    pub fn increases(&self) -> Vec<u32> {
        self.rows
            .windows(2)
            .filter(|w| w[1].fraction.value > w[0].fraction.value)
            .map(|w| w[1].n)
            .collect()
    }
}
