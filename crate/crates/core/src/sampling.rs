//! Random partitions: an exact uniform sampler driven by a count table, the
//! Boltzmann rejection sampler, and the exponential-sums surrogate for the
//! largest parts and largest conjugate parts.
//!
//! Samplers take any `rand::Rng`; reproducible streams come from
//! [`RngStream::rng`](crate::RngStream::rng).

use std::cmp::Ordering;

use rand::Rng;
use serde::Serialize;

use crate::asymptotics::{scale, C};
use crate::count::slanted_index;
use crate::error::{precondition, Error, Result};
use crate::partition::Partition;
use crate::table::{cmp_limbs, RestrictedCountTable, TableMode};

/// Uniform draw from `[0, bound)` on fixed-width little-endian limbs, by
/// rejection on the bit length of `bound`.
fn uniform_below<R: Rng + ?Sized>(rng: &mut R, bound: &[u64], out: &mut [u64]) {
    let top = bound.iter().rposition(|&l| l != 0).expect("positive bound");
    let mask = u64::MAX >> bound[top].leading_zeros();
    out.iter_mut().for_each(|l| *l = 0);
    loop {
        for l in out.iter_mut().take(top) {
            *l = rng.random();
        }
        out[top] = rng.random::<u64>() & mask;
        if cmp_limbs(out, bound) == Ordering::Less {
            return;
        }
    }
}

fn sub_assign(a: &mut [u64], b: &[u64]) {
    let mut borrow = false;
    for (x, &y) in a.iter_mut().zip(b) {
        let (d1, b1) = x.overflowing_sub(y);
        let (d2, b2) = d1.overflowing_sub(borrow as u64);
        *x = d2;
        borrow = b1 || b2;
    }
    debug_assert!(!borrow);
}

/// Exactly uniform random partition of `n`.
///
/// One uniform integer `U < p(n)` is drawn. At each step the next part is
/// the smallest `x` with `T(rem, x) > U`, where `T(ν, m)` counts partitions
/// of `ν` into parts at most `m`; then `U − T(rem, x−1)` is uniform below
/// `T(rem − x, x)` and drives the rest of the partition.
pub fn sample_uniform_exact<R: Rng + ?Sized>(
    n: u32,
    rng: &mut R,
    table: &RestrictedCountTable,
) -> Result<Partition> {
    if table.mode() != TableMode::ByLargestPart {
        return Err(precondition("exact sampling needs a by-largest-part table"));
    }
    if n > table.n_max() {
        return Err(Error::TableTooSmall {
            needed: n.into(),
            available: table.n_max().into(),
        });
    }
    let total = table.largest_part_limbs(n as usize, n as usize);
    let mut u = vec![0u64; total.len()];
    uniform_below(rng, total, &mut u);
    let mut parts = Vec::new();
    let (mut rem, mut cap) = (n as usize, n as usize);
    while rem > 0 {
        // smallest x in [1, cap] with T(rem, x) > u
        let (mut lo, mut hi) = (1usize, cap.min(rem));
        while lo < hi {
            let mid = (lo + hi) / 2;
            if cmp_limbs(table.largest_part_limbs(rem, mid), &u) == Ordering::Greater {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let x = lo;
        sub_assign(&mut u, table.largest_part_limbs(rem, x - 1));
        parts.push(x as u32);
        rem -= x;
        cap = x;
    }
    Ok(Partition::from_parts_unchecked(parts))
}

/// Attempt counts of the Boltzmann sampler.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct BoltzmannStats {
    pub attempts: u64,
    pub accepted: u64,
}

impl BoltzmannStats {
    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.attempts as f64
    }
}

/// Default number of Boltzmann attempts before giving up on one draw.
pub const DEFAULT_RETRY_CAP: u64 = 1 << 32;

/// Boltzmann sampler at `q = e^{−c/√n}`, conditioned on weight `n` by
/// rejection. Part `j` has geometric multiplicity with ratio `q^j`.
///
/// The parts with nonzero multiplicity are found by thinning: from the
/// current index `j`, a geometric jump with success probability `q^j`
/// proposes a candidate `k`, kept with probability `q^{k−j}`. Attempts stop
/// as soon as the weight exceeds `n`. Once the weight hits `n` the draw is
/// kept with probability `Π_{k≥j}(1 − q^k)`, the chance that no larger
/// part appears, so no part size is ever truncated.
pub fn sample_boltzmann<R: Rng + ?Sized>(
    n: u32,
    rng: &mut R,
    retry_cap: u64,
    stats: &mut BoltzmannStats,
) -> Result<Partition> {
    if n == 0 {
        return Err(precondition("sample_boltzmann needs n >= 1"));
    }
    let ln_q = -C / f64::from(n).sqrt();
    let mut mult: Vec<(u32, u32)> = Vec::new();
    for _ in 0..retry_cap {
        stats.attempts += 1;
        if boltzmann_attempt(n, ln_q, rng, &mut mult) {
            stats.accepted += 1;
            let mut parts = Vec::with_capacity(mult.iter().map(|&(_, m)| m as usize).sum());
            for &(k, m) in mult.iter().rev() {
                parts.extend(std::iter::repeat_n(k, m as usize));
            }
            return Ok(Partition::from_parts_unchecked(parts));
        }
    }
    Err(Error::RetryCap {
        attempts: retry_cap,
    })
}

/// Uniform on `(0, 1]`.
#[inline]
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

fn boltzmann_attempt<R: Rng + ?Sized>(
    n: u32,
    ln_q: f64,
    rng: &mut R,
    mult: &mut Vec<(u32, u32)>,
) -> bool {
    mult.clear();
    let n = u64::from(n);
    let mut weight = 0u64;
    let mut j = 1u64;
    loop {
        let rem = n - weight;
        if rem == 0 {
            return rng.random::<f64>() < no_part_from(j, ln_q);
        }
        if j > rem {
            // every later part exceeds the remaining weight
            return false;
        }
        let envelope = (j as f64 * ln_q).exp();
        let jump = (open_unit(rng).ln() / (-envelope).ln_1p()).floor();
        if !(jump <= (rem - j) as f64) {
            return false;
        }
        let jump = jump as u64;
        let k = j + jump;
        j = k + 1;
        if rng.random::<f64>() >= (jump as f64 * ln_q).exp() {
            continue;
        }
        // multiplicity 1 + Geometric with ratio q^k
        let extra = open_unit(rng).ln() / (k as f64 * ln_q);
        if !(extra < n as f64) {
            return false;
        }
        let m = 1 + extra as u64;
        weight += k * m;
        if weight > n {
            return false;
        }
        mult.push((k as u32, m as u32));
    }
}

/// `Π_{k≥j}(1 − q^k)` for `q = e^{ln_q}`.
fn no_part_from(j: u64, ln_q: f64) -> f64 {
    let mut log_p = 0.0;
    let mut k = j;
    loop {
        let t = (k as f64 * ln_q).exp();
        if t < 1e-20 {
            break;
        }
        log_p += (-t).ln_1p();
        k += 1;
    }
    log_p.exp()
}

/// One draw of the exponential-sums surrogate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurrogateDraw {
    pub k: usize,
    pub n: u64,
    /// Partial sums `S_1 < … < S_k` of unit exponentials.
    #[serde(rename = "S")]
    pub s: Vec<f64>,
    #[serde(rename = "S_prime")]
    pub s_prime: Vec<f64>,
    /// `Λ_j = ⌈(√n/c)·log((√n/c)/S_j)⌉`.
    #[serde(rename = "Lambda")]
    pub lambda: Vec<i64>,
    #[serde(rename = "Lambda_prime")]
    pub lambda_prime: Vec<i64>,
    /// Some `Λ_j` or `Λ'_j` is nonpositive (kept, not clamped).
    pub nonpositive: bool,
}

impl SurrogateDraw {
    /// Builds a draw from given partial sums; the test hook for forced
    /// inputs.
    pub fn from_sums(n: u64, s: Vec<f64>, s_prime: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(precondition("surrogate needs n >= 1"));
        }
        if s.len() != s_prime.len() || s.is_empty() {
            return Err(precondition("S and S' must be nonempty and of equal length"));
        }
        if s.iter().chain(&s_prime).any(|&x| !(x > 0.0)) {
            return Err(precondition("partial sums must be positive"));
        }
        let lambda: Vec<i64> = s.iter().map(|&x| slanted_index(n, x)).collect();
        let lambda_prime: Vec<i64> = s_prime.iter().map(|&x| slanted_index(n, x)).collect();
        let nonpositive = lambda.iter().chain(&lambda_prime).any(|&l| l <= 0);
        Ok(Self {
            k: s.len(),
            n,
            s,
            s_prime,
            lambda,
            lambda_prime,
            nonpositive,
        })
    }

    /// `Λ_{j−1} = Λ_j` or `Λ'_{j−1} = Λ'_j` for some `j ≤ k`.
    pub fn has_tie(&self) -> bool {
        self.lambda.windows(2).any(|w| w[0] == w[1])
            || self.lambda_prime.windows(2).any(|w| w[0] == w[1])
    }
}

/// Partial sums of `k` unit exponentials, each drawn as `−log U`.
pub fn exponential_partial_sums<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let mut acc = 0.0;
    (0..k)
        .map(|_| {
            acc -= open_unit(rng).ln();
            acc
        })
        .collect()
}

pub fn sample_surrogate<R: Rng + ?Sized>(n: u64, k: usize, rng: &mut R) -> Result<SurrogateDraw> {
    if k == 0 {
        return Err(precondition("sample_surrogate needs k >= 1"));
    }
    let s = exponential_partial_sums(k, rng);
    let s_prime = exponential_partial_sums(k, rng);
    SurrogateDraw::from_sums(n, s, s_prime)
}

/// `Σ_{j=2}^{k} (1 − e^{−c/√n})^{j−1}`.
pub fn surrogate_tie_probability(n: u64, k: u64) -> Result<f64> {
    if k < 2 {
        return Err(precondition("surrogate_tie_probability needs k >= 2"));
    }
    if n == 0 {
        return Err(precondition("surrogate_tie_probability needs n >= 1"));
    }
    let x = -(-C / (n as f64).sqrt()).exp_m1();
    Ok((1..k).map(|e| x.powi(e as i32)).sum())
}

/// Union bound `Σ_{j=2}^{k} (1 − e^{−(j−1)c/√n})` on the probability that
/// one of the sequences `Λ`, `Λ'` has a tie. Each term is
/// `P(S_{j−1}/S_j > e^{−c/√n})`, a necessary condition for `Λ_{j−1} = Λ_j`.
pub fn surrogate_tie_union_bound(n: u64, k: u64) -> Result<f64> {
    if k < 2 {
        return Err(precondition("surrogate_tie_union_bound needs k >= 2"));
    }
    if n == 0 {
        return Err(precondition("surrogate_tie_union_bound needs n >= 1"));
    }
    let u = C / (n as f64).sqrt();
    Ok((1..k).map(|e| -(-(e as f64) * u).exp_m1()).sum())
}

/// Tail bounds for the surrogate sums at `k = ⌊n^γ⌋`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OverflowBounds {
    pub gamma: f64,
    /// `exp(−½ k log n)`, bounding `P(S_k ≥ k log n)`.
    pub large_sum: f64,
    /// `n^{−1/2} k²`, bounding `P(S_1 ≤ n^{−1/2} k²)`.
    pub small_first: f64,
    /// The threshold `n^{−1/2} k²` itself.
    pub small_threshold: f64,
}

/// `γ = log k / log n` is accepted up to `1/4` inclusive (within `1e-9`).
pub fn surrogate_overflow_bounds(n: u64, k: u64) -> Result<OverflowBounds> {
    if n < 2 || k == 0 {
        return Err(precondition("surrogate_overflow_bounds needs n >= 2 and k >= 1"));
    }
    let ln_n = (n as f64).ln();
    let gamma = (k as f64).ln() / ln_n;
    if gamma > 0.25 + 1e-9 {
        return Err(precondition(format!(
            "gamma = log k / log n = {gamma:.6} must be below 1/4"
        )));
    }
    let kf = k as f64;
    let small = kf * kf / (n as f64).sqrt();
    Ok(OverflowBounds {
        gamma,
        large_sum: (-0.5 * kf * ln_n).exp(),
        small_first: small,
        small_threshold: small,
    })
}

/// `√n / c`, re-exported for callers working with slanted indices.
pub fn surrogate_scale(n: u64) -> f64 {
    scale(n)
}
