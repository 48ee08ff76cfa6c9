use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::Serialize;

use super::{check_samples, mc_hits, Estimate};
use crate::error::{precondition, Result};
use crate::rng::RngStream;
use crate::sampling::{
    exponential_partial_sums, sample_surrogate, surrogate_overflow_bounds,
    surrogate_tie_probability, surrogate_tie_union_bound,
};
use crate::tolerance::BOUND_SLACK_SIGMAS;

/// Empirical frequency against an analytic upper bound.
#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub empirical: Estimate,
    pub bound: f64,
    /// A second, nominally weaker bound reported alongside, not asserted.
    pub secondary_bound: Option<f64>,
    /// `empirical ≤ bound + 5·stderr`.
    pub holds: bool,
}

impl BoundCheck {
    fn new(empirical: Estimate, bound: f64, secondary_bound: Option<f64>) -> Self {
        let holds = empirical.value <= bound + BOUND_SLACK_SIGMAS * empirical.stderr;
        Self {
            empirical,
            bound,
            secondary_bound,
            holds,
        }
    }
}

fn unit_open(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

/// `P(min_{i≤k} Π_{j≤i} S'_j/S_j ≥ 1/2)` from surrogate draws, with the
/// running product kept as a sum of logarithms.
pub fn surrogate_event_pk(k: usize, samples: u64, stream: RngStream) -> Result<Estimate> {
    if k == 0 {
        return Err(precondition("surrogate_event_pk needs k >= 1"));
    }
    check_samples(samples)?;
    let floor = -std::f64::consts::LN_2;
    let hits = mc_hits(samples, stream, |rng| {
        let (mut s, mut sp, mut log_prod) = (0.0, 0.0, 0.0);
        for _ in 0..k {
            s -= unit_open(rng).ln();
            sp -= unit_open(rng).ln();
            log_prod += (sp / s).ln();
            if log_prod < floor {
                return false;
            }
        }
        true
    });
    Ok(Estimate::bernoulli(hits, samples, stream))
}

/// `exp(−a log k / log log k)`, the decay curve reported next to `P_k`.
pub fn pk_reference_curve(k: u64, a: f64) -> Option<f64> {
    let l = (k as f64).ln();
    (l.ln() > 0.0).then(|| (-a * l / l.ln()).exp())
}

fn gamma(j: u64) -> Result<Gamma<f64>> {
    if j == 0 {
        return Err(precondition("j must be at least 1"));
    }
    Gamma::new(j as f64, 1.0).map_err(|e| precondition(e.to_string()))
}

/// `P(|S_j/j − 1| ≥ d)` against `exp(j(log(1+d) − d))`; the quadratic form
/// `exp(−jd²/2)` is reported as the secondary bound.
pub fn chernoff_validate(j: u64, d: f64, samples: u64, stream: RngStream) -> Result<BoundCheck> {
    if !(d > 0.0 && d < 1.0) {
        return Err(precondition(format!("d = {d} must lie in (0, 1)")));
    }
    check_samples(samples)?;
    let g = gamma(j)?;
    let jf = j as f64;
    let hits = mc_hits(samples, stream, |rng| (g.sample(rng) / jf - 1.0).abs() >= d);
    Ok(BoundCheck::new(
        Estimate::bernoulli(hits, samples, stream),
        (jf * ((1.0 + d).ln() - d)).exp(),
        Some((-jf * d * d / 2.0).exp()),
    ))
}

/// `P(S'_j/S_j ≥ β)` against `(1 + (β−1)²/(4β))^{−j}`.
pub fn ratio_bound_validate(j: u64, beta: f64, samples: u64, stream: RngStream) -> Result<BoundCheck> {
    if !(beta > 1.0) {
        return Err(precondition(format!("beta = {beta} must exceed 1")));
    }
    check_samples(samples)?;
    let g = gamma(j)?;
    let hits = mc_hits(samples, stream, |rng| {
        let s = g.sample(rng);
        g.sample(rng) >= beta * s
    });
    let bound = (1.0 + (beta - 1.0).powi(2) / (4.0 * beta)).powf(-(j as f64));
    Ok(BoundCheck::new(Estimate::bernoulli(hits, samples, stream), bound, None))
}

/// Both surrogate tail bounds at `(n, k)`: `P(S_k ≥ k log n)` and
/// `P(S_1 ≤ n^{−1/2} k²)`.
#[derive(Clone, Debug, Serialize)]
pub struct OverflowCheck {
    pub gamma: f64,
    pub large_sum: BoundCheck,
    pub small_first: BoundCheck,
    /// `1 − e^{−x}` at the small-sum threshold.
    pub small_first_exact: f64,
}

pub fn overflow_validate(n: u64, k: u64, samples: u64, stream: RngStream) -> Result<OverflowCheck> {
    let b = surrogate_overflow_bounds(n, k)?;
    check_samples(samples)?;
    let g = gamma(k)?;
    let level = k as f64 * (n as f64).ln();
    let large = mc_hits(samples, stream, |rng| g.sample(rng) >= level);
    let x = b.small_threshold;
    let small_stream = RngStream::new(stream.seed, stream.stream_id ^ 1 << 63);
    let small = mc_hits(samples, small_stream, |rng| -unit_open(rng).ln() <= x);
    Ok(OverflowCheck {
        gamma: b.gamma,
        large_sum: BoundCheck::new(Estimate::bernoulli(large, samples, stream), b.large_sum, None),
        small_first: BoundCheck::new(
            Estimate::bernoulli(small, samples, small_stream),
            b.small_first,
            None,
        ),
        small_first_exact: -(-x).exp_m1(),
    })
}

/// Empirical probability that `Λ_1, …, Λ_k` fails to strictly decrease,
/// with the closed-form sum and the union bound.
#[derive(Clone, Debug, Serialize)]
pub struct TieCheck {
    pub n: u64,
    pub k: u64,
    pub empirical: Estimate,
    pub geometric_sum: f64,
    pub union_bound: f64,
}

pub fn tie_validate(n: u64, k: u64, samples: u64, stream: RngStream) -> Result<TieCheck> {
    let geometric_sum = surrogate_tie_probability(n, k)?;
    let union_bound = surrogate_tie_union_bound(n, k)?;
    check_samples(samples)?;
    let hits = mc_hits(samples, stream, |rng| {
        let s = exponential_partial_sums(k as usize, rng);
        let lam: Vec<i64> = s.iter().map(|&x| crate::count::slanted_index(n, x)).collect();
        lam.windows(2).any(|w| w[0] == w[1])
    });
    Ok(TieCheck {
        n,
        k,
        empirical: Estimate::bernoulli(hits, samples, stream),
        geometric_sum,
        union_bound,
    })
}

/// Mean of unit exponentials and the frequency of `E > 1`.
#[derive(Clone, Debug, Serialize)]
pub struct ExponentialCheck {
    pub mean: f64,
    pub exceed_one: Estimate,
}

pub fn exponential_marginals(samples: u64, stream: RngStream) -> Result<ExponentialCheck> {
    check_samples(samples)?;
    let sums = super::mc_batches(samples, stream, |rng, count| {
        let (mut total, mut above) = (0.0, 0u64);
        for _ in 0..count {
            let d = sample_surrogate(1, 1, rng).expect("k >= 1");
            total += d.s[0];
            above += u64::from(d.s[0] > 1.0);
        }
        (total, above)
    });
    let (total, above) = sums
        .into_iter()
        .fold((0.0, 0), |(a, b), (x, y)| (a + x, b + y));
    Ok(ExponentialCheck {
        mean: total / samples as f64,
        exceed_one: Estimate::bernoulli(above, samples, stream),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pk_one_is_two_thirds() {
        let e = surrogate_event_pk(1, 200_000, RngStream::new(4, 0)).unwrap();
        assert!(e.agrees_with(2.0 / 3.0, 4.0), "{e:?}");
    }

    #[test]
    fn ratio_one_two() {
        let c = ratio_bound_validate(1, 2.0, 200_000, RngStream::new(4, 1)).unwrap();
        assert!((c.bound - 8.0 / 9.0).abs() < 1e-15);
        assert!(c.empirical.agrees_with(1.0 / 3.0, 4.0));
        assert!(c.holds);
        assert!(ratio_bound_validate(1, 1.0, 10, RngStream::new(4, 1)).is_err());
    }

    #[test]
    fn chernoff_small() {
        let c = chernoff_validate(100, 0.3, 100_000, RngStream::new(4, 2)).unwrap();
        assert!(c.holds);
        assert!(c.secondary_bound.unwrap() <= c.bound);
        let c = chernoff_validate(10, 1e-9, 1000, RngStream::new(4, 2)).unwrap();
        assert!((c.bound - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reference_curve() {
        assert!(pk_reference_curve(2, 0.445).is_none());
        let v = pk_reference_curve(10_000, 0.445).unwrap();
        assert!(v > 0.0 && v < 1.0);
    }
}
