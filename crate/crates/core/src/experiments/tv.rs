use std::collections::HashMap;

use serde::Serialize;

use super::{check_samples, mc_batches, Estimate, Method};
use crate::asymptotics::scale;
use crate::error::{precondition, Error, Result};
use crate::partition::conjugate_parts;
use crate::rng::RngStream;
use crate::sampling::{sample_surrogate, sample_uniform_exact};
use crate::table::RestrictedCountTable;
use crate::tolerance::LEAK_TOLERANCE;

/// Largest `n` accepted by [`tv_distance_k1`].
pub const TV_EXACT_MAX: u64 = 20_000;

/// Exact total variation between the law of `(λ₁, λ'₁)` for a uniform
/// partition of `n` and the law of the slanted `(Λ₁, Λ'₁)`.
#[derive(Clone, Debug, Serialize)]
pub struct TvReport {
    pub n: u64,
    /// `coarse_tv + slack`, an upper bound on the exact distance.
    pub tv: f64,
    /// Half the L¹ distance over the cell partition.
    pub coarse_tv: f64,
    /// `Σ min(P, Q)` over the boundary cells, the most the coarsening hides.
    pub slack: f64,
    /// Both coordinates are resolved to single integers on `[lo, hi]`; values
    /// below `lo` and above `hi` form one boundary class each.
    pub lo: i64,
    pub hi: i64,
    pub leak_tolerance: f64,
}

/// Exact k = 1 total variation distance.
///
/// The joint distribution function `P(λ₁ ≤ a, λ'₁ ≤ b) = p_{n,a,b}/p(n)` is
/// filled by a layered recursion over `b` on generating-function rows
/// scaled by `x^ν`, `x = e^{−c/√n}`, and differenced into cell masses. The
/// surrogate cells are products of `P(Λ₁ = a) = Φ(a) − Φ(a−1)` with
/// `Φ(a) = exp(−(√n/c)·e^{−ca/√n})`.
pub fn tv_distance_k1(n: u64) -> Result<TvReport> {
    tv_distance_k1_with(n, LEAK_TOLERANCE)
}

pub fn tv_distance_k1_with(n: u64, leak_tolerance: f64) -> Result<TvReport> {
    if n == 0 || n > TV_EXACT_MAX {
        return Err(precondition(format!(
            "tv_distance_k1 needs 1 <= n <= {TV_EXACT_MAX}, got {n}"
        )));
    }
    let nu = n as usize;
    let sigma = scale(n);
    let ln_x = -1.0 / sigma;

    // g_cdf[a] = P(λ₁ ≤ a)
    let mut g = vec![0.0f64; nu + 1];
    g[0] = 1.0;
    let mut g_raw = vec![0.0f64; nu + 1];
    for a in 1..=nu {
        let xa = (a as f64 * ln_x).exp();
        for v in a..=nu {
            g[v] += xa * g[v - a];
        }
        g_raw[a] = g[nu];
    }
    let total = g_raw[nu];
    let g_cdf: Vec<f64> = g_raw.iter().map(|&v| v / total).collect();
    let g_tail = |a: usize| (total - g_raw[a]) / total;

    let phi = |a: i64| (-sigma * (-(a as f64) / sigma).exp()).exp();
    let phi_tail = |a: i64| -(-sigma * (-(a as f64) / sigma).exp()).exp_m1();
    // P(Λ₁ = a) without cancellation
    let phi_cell = |a: i64| {
        let y = sigma * (-(a as f64) / sigma).exp();
        phi(a) * -(-y * (1.0 / sigma).exp_m1()).exp_m1()
    };

    let threshold = leak_tolerance / 8.0;
    let mut low = 0usize;
    while low < nu && g_cdf[low + 1].min(phi(low as i64 + 1)) <= threshold {
        low += 1;
    }
    let mut high = low + 1;
    while g_tail(high).min(phi_tail(high as i64)) > threshold {
        high += 1;
    }

    let w = high - low + 1;
    let mut f = vec![0.0f64; w * w];
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(high + 1);
    let mut e0 = vec![0.0f64; nu + 1];
    e0[0] = 1.0;
    rows.push(e0);
    for b in 1..=high {
        let xb = (b as f64 * ln_x).exp();
        for a in 1..b {
            let end = nu.min(a * b);
            if end < b {
                continue;
            }
            let (done, rest) = rows.split_at_mut(a);
            let src = &done[a - 1];
            let dst = &mut rest[0];
            for (d, s) in dst[b..=end].iter_mut().zip(&src[..=end - b]) {
                *d += xb * s;
            }
        }
        let mut next = rows[b - 1].clone();
        let end = nu.min(b * b);
        if end >= b {
            let src = &rows[b - 1];
            for (d, s) in next[b..=end].iter_mut().zip(&src[..=end - b]) {
                *d += xb * s;
            }
        }
        rows.push(next);
        if b >= low {
            for a in low..=b {
                let v = rows[a][nu] / total;
                f[(a - low) * w + (b - low)] = v;
                f[(b - low) * w + (a - low)] = v;
            }
        }
    }
    drop(rows);
    let fa = |a: usize, b: usize| f[(a - low) * w + (b - low)];

    // classes: 0 = low strip, 1..w-1 = integers low+1..=high, w = high strip
    let true_mass = |i: usize, j: usize| -> f64 {
        let lo_c = 0;
        let hi_c = w;
        let m = |j: usize| g_cdf[j] - g_cdf[j - 1];
        let v = match (i, j) {
            (a, b) if a == lo_c && b == lo_c => fa(low, low),
            (a, b) if a == lo_c && b == hi_c => g_cdf[low] - fa(low, high),
            (a, b) if a == hi_c && b == lo_c => g_cdf[low] - fa(high, low),
            (a, b) if a == hi_c && b == hi_c => {
                g_tail(high) - (g_cdf[high] - fa(high, high))
            }
            (a, b) if a == lo_c => fa(low, low + b) - fa(low, low + b - 1),
            (a, b) if b == lo_c => fa(low + a, low) - fa(low + a - 1, low),
            (a, b) if a == hi_c => m(low + b) - (fa(high, low + b) - fa(high, low + b - 1)),
            (a, b) if b == hi_c => m(low + a) - (fa(low + a, high) - fa(low + a - 1, high)),
            (a, b) => {
                let (x, y) = (low + a, low + b);
                fa(x, y) - fa(x - 1, y) - fa(x, y - 1) + fa(x - 1, y - 1)
            }
        };
        v.max(0.0)
    };
    let sur: Vec<f64> = (0..=w)
        .map(|c| {
            if c == 0 {
                phi(low as i64)
            } else if c == w {
                phi_tail(high as i64)
            } else {
                phi_cell((low + c) as i64)
            }
        })
        .collect();

    let (mut coarse, mut slack) = (0.0, 0.0);
    for i in 0..=w {
        for j in 0..=w {
            let p = true_mass(i, j);
            let q = sur[i] * sur[j];
            coarse += (p - q).abs();
            if i == 0 || j == 0 || i == w || j == w {
                slack += p.min(q);
            }
        }
    }
    coarse *= 0.5;
    if slack > leak_tolerance {
        return Err(Error::SupportLeak {
            mass: slack,
            tolerance: leak_tolerance,
        });
    }
    Ok(TvReport {
        n,
        tv: coarse + slack,
        coarse_tv: coarse,
        slack,
        lo: low as i64 + 1,
        hi: high as i64,
        leak_tolerance,
    })
}

/// Cell layout of the Monte Carlo distance: every coordinate is clipped to
/// `[0, clip]` and divided by `width`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Binning {
    pub width: i64,
    pub clip: i64,
}

impl Binning {
    /// Integer cells clipped to `[0, 3·(√n/c)·log n]`.
    pub fn integer(n: u64) -> Self {
        Self {
            width: 1,
            clip: (3.0 * scale(n) * (n as f64).ln()).ceil() as i64,
        }
    }

    fn cell(&self, v: i64) -> i64 {
        v.clamp(0, self.clip) / self.width
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TvMcReport {
    pub n: u64,
    pub k: usize,
    /// Plug-in distance between the binned empirical laws.
    pub estimate: Estimate,
    pub binning: Binning,
    pub occupied_cells: usize,
}

/// Plug-in total variation between two samples of binned keys. The standard
/// error is the expected plug-in value when both laws coincide,
/// `½ Σ √(2/π) √(p/N₁ + q/N₂)`, the noise floor of the estimator.
pub fn plug_in_tv(a: &[Vec<i64>], b: &[Vec<i64>]) -> (f64, f64, usize) {
    let mut cells: HashMap<&[i64], (u64, u64)> = HashMap::new();
    for key in a {
        cells.entry(key.as_slice()).or_default().0 += 1;
    }
    for key in b {
        cells.entry(key.as_slice()).or_default().1 += 1;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut keys: Vec<_> = cells.into_iter().collect();
    keys.sort_unstable();
    let (mut tv, mut floor) = (0.0, 0.0);
    for (_, (x, y)) in &keys {
        let (p, q) = (*x as f64 / na, *y as f64 / nb);
        tv += (p - q).abs();
        floor += (p / na + q / nb).sqrt();
    }
    let floor = 0.5 * (2.0 / std::f64::consts::PI).sqrt() * floor;
    (0.5 * tv, floor, keys.len())
}

/// Plug-in distance between `(λ_1..λ_k, λ'_1..λ'_k)` from the exact sampler
/// and `(Λ_1..Λ_k, Λ'_1..Λ'_k)` from the surrogate, over `binning`. Binning
/// merges cells, so apart from sampling noise the value is a lower bound on
/// the distance between the unbinned laws.
pub fn tv_distance_mc(
    n: u32,
    k: usize,
    samples: u64,
    stream: RngStream,
    table: &RestrictedCountTable,
    binning: Binning,
) -> Result<TvMcReport> {
    check_samples(samples)?;
    if k == 0 {
        return Err(precondition("tv_distance_mc needs k >= 1"));
    }
    let nn = u64::from(n);
    if n >= 2 && (k as f64).ln() / f64::from(n).ln() > 0.25 + 1e-9 {
        return Err(precondition(format!(
            "k = {k} gives gamma = log k / log n above 1/4"
        )));
    }
    if binning.width < 1 || binning.clip < 0 {
        return Err(precondition("binning needs width >= 1 and clip >= 0"));
    }
    sample_uniform_exact(n, &mut stream.rng(), table)?;
    let exact_stream = stream.child(u64::MAX);
    let sur_stream = stream.child(u64::MAX - 1);
    let exact: Vec<Vec<i64>> = mc_batches(samples, exact_stream, |rng, count| {
        (0..count)
            .map(|_| {
                let p = sample_uniform_exact(n, rng, table).expect("table checked");
                let conj = conjugate_parts(p.parts());
                let get = |v: &[u32], i: usize| i64::from(v.get(i).copied().unwrap_or(0));
                (0..k)
                    .map(|i| binning.cell(get(p.parts(), i)))
                    .chain((0..k).map(|i| binning.cell(get(&conj, i))))
                    .collect::<Vec<i64>>()
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    let sur = surrogate_keys(nn, k, samples, sur_stream, binning);
    let (value, stderr, occupied) = plug_in_tv(&exact, &sur);
    Ok(TvMcReport {
        n: nn,
        k,
        estimate: Estimate {
            value,
            stderr,
            samples,
            seed: stream.seed,
            stream_id: stream.stream_id,
            method: Method::MonteCarlo,
        },
        binning,
        occupied_cells: occupied,
    })
}

/// Binned `(Λ, Λ')` keys from `samples` surrogate draws.
pub fn surrogate_keys(n: u64, k: usize, samples: u64, stream: RngStream, binning: Binning) -> Vec<Vec<i64>> {
    mc_batches(samples, stream, |rng, count| {
        (0..count)
            .map(|_| {
                let d = sample_surrogate(n, k, rng).expect("k >= 1");
                d.lambda
                    .iter()
                    .chain(&d.lambda_prime)
                    .map(|&v| binning.cell(v))
                    .collect::<Vec<i64>>()
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}
