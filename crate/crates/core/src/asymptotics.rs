//! Floating-point evaluators for the closed-form asymptotics of partition
//! counts, plus helpers that measure them against exact counts.
//!
//! Anything that can exceed the double range is handled as a logarithm.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::count::{count_partitions, count_restricted, joint_tail, ln_big};
use crate::error::{precondition, Result};
use crate::tolerance::BAND_CONSTANT;

/// `c = π/√6`.
pub const C: f64 = 1.282_549_830_161_864;
/// `b = 2c = π·√(2/3)`.
pub const B: f64 = 2.0 * C;
/// `α = 2/π²`, the constant in `1 − cos θ ≥ α θ²` on `[−π, π]`.
pub const ALPHA: f64 = 2.0 / (PI * PI);

/// Default half-opening of the wedge `|Im u| ≤ ε Re u` for Freiman's formula.
pub const FREIMAN_WEDGE: f64 = 0.1;
const TAIL_TOLERANCE: f64 = 1e-14;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AsymptoticConstants {
    pub c: f64,
    pub b: f64,
    pub alpha_lemma1: f64,
}

impl Default for AsymptoticConstants {
    fn default() -> Self {
        Self {
            c: C,
            b: B,
            alpha_lemma1: ALPHA,
        }
    }
}

/// `√n / c`, the scale of the largest parts.
pub fn scale(n: u64) -> f64 {
    (n as f64).sqrt() / C
}

/// `log( e^{π√(2n/3)} / (4√3 n) )`.
pub fn ln_hardy_ramanujan(n: u64) -> f64 {
    let n = n as f64;
    PI * (2.0 * n / 3.0).sqrt() - (4.0 * 3f64.sqrt() * n).ln()
}

/// Hardy–Ramanujan leading term `e^{π√(2n/3)} / (4√3 n)`; `+∞` once it
/// leaves the double range (use [`ln_hardy_ramanujan`] there).
pub fn hardy_ramanujan(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(precondition("hardy_ramanujan needs n >= 1"));
    }
    Ok(ln_hardy_ramanujan(n).exp())
}

/// `p(n) / HR(n)` from the exact count.
pub fn hardy_ramanujan_ratio(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(precondition("hardy_ramanujan needs n >= 1"));
    }
    Ok((ln_big(&count_partitions(n)) - ln_hardy_ramanujan(n)).exp())
}

/// Number of factors needed so the neglected tail of `Σ −Log(1 − e^{−ku})`
/// is below `1e-14`.
pub fn freiman_terms(re_u: f64) -> u64 {
    let mut k = 1u64;
    while !(freiman_tail(re_u, k) < TAIL_TOLERANCE) {
        k = (k * 2).max(k + 1);
        if k > 1 << 40 {
            break;
        }
    }
    // bisect down to the smallest sufficient count
    let (mut lo, mut hi) = (k / 2, k);
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if freiman_tail(re_u, mid) < TAIL_TOLERANCE {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn freiman_tail(re_u: f64, terms: u64) -> f64 {
    (-((terms + 1) as f64) * re_u).exp() / -(-re_u).exp_m1()
}

/// `Σ_{k≤terms} −Log(1 − e^{−ku})`: log of the truncated Euler product at
/// `q = e^{−u}`, inside the default wedge.
pub fn freiman_lhs(u: Complex64, terms: u64) -> Result<Complex64> {
    freiman_lhs_in_wedge(u, terms, FREIMAN_WEDGE)
}

pub fn freiman_lhs_in_wedge(u: Complex64, terms: u64, eps: f64) -> Result<Complex64> {
    if !(u.re > 0.0) {
        return Err(precondition("freiman_lhs needs Re u > 0"));
    }
    if u.im.abs() > eps * u.re {
        return Err(precondition(format!(
            "u = {u} lies outside the wedge |Im u| <= {eps} Re u"
        )));
    }
    if !(freiman_tail(u.re, terms) < TAIL_TOLERANCE) {
        return Err(precondition(format!(
            "{terms} terms leave a tail above {TAIL_TOLERANCE:e}; need at least {}",
            freiman_terms(u.re)
        )));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    // add the small far terms first
    for k in (1..=terms).rev() {
        let z = (-(k as f64) * u).exp();
        sum -= (-z).ln_1p_c();
    }
    Ok(sum)
}

/// `π²/(6u) + ½ Log(u/2π)`.
pub fn freiman_leading(u: Complex64) -> Complex64 {
    PI * PI / (6.0 * u) + 0.5 * (u / (2.0 * PI)).ln()
}

/// `freiman_lhs(u) − freiman_leading(u)` with enough terms.
pub fn freiman_remainder(u: Complex64) -> Result<Complex64> {
    Ok(freiman_lhs(u, freiman_terms(u.re))? - freiman_leading(u))
}

trait Ln1p {
    fn ln_1p_c(self) -> Self;
}

impl Ln1p for Complex64 {
    /// `Log(1 + z)` without cancellation for small `|z|`.
    fn ln_1p_c(self) -> Self {
        if self.norm() < 1e-4 {
            // z − z²/2 + z³/3 − z⁴/4
            let z = self;
            let z2 = z * z;
            z - z2 / 2.0 + z2 * z / 3.0 - z2 * z2 / 4.0
        } else {
            (Complex64::new(1.0, 0.0) + self).ln()
        }
    }
}

/// Both sides of the modulus bound on `p(re^{iθ})`, as logarithms since
/// `p(r)` overflows a double long before `r → 1`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Lemma1Check {
    pub r: f64,
    pub theta: f64,
    pub log_lhs: f64,
    pub log_rhs: f64,
}

impl Lemma1Check {
    pub fn holds(&self) -> bool {
        self.log_lhs <= self.log_rhs + 1e-10 * self.log_rhs.abs().max(1.0)
    }
}

/// `log|p(re^{iθ})|` against `log p(r) − α r θ² / ((1−r)((1−r)² + 2rαθ²))`.
pub fn lemma1_bound_check(r: f64, theta: f64) -> Result<Lemma1Check> {
    if !(r > 0.0 && r < 1.0) {
        return Err(precondition(format!("r = {r} must lie in (0, 1)")));
    }
    if !(theta > -PI && theta <= PI) {
        return Err(precondition(format!("theta = {theta} must lie in (-pi, pi]")));
    }
    let ln_r = r.ln();
    let terms = freiman_terms(-ln_r);
    let (mut log_mod, mut log_real) = (0.0, 0.0);
    for j in (1..=terms).rev() {
        let rj = (j as f64 * ln_r).exp();
        let ang = j as f64 * theta;
        // |1 − r^j e^{ijθ}|² = 1 − 2 r^j cos(jθ) + r^{2j}
        let m2 = -2.0 * rj * ang.cos() + rj * rj;
        log_mod -= 0.5 * m2.ln_1p();
        log_real -= (-rj).ln_1p();
    }
    let t2 = theta * theta;
    let one_m = 1.0 - r;
    let expo = ALPHA * r * t2 / (one_m * (one_m * one_m + 2.0 * r * ALPHA * t2));
    Ok(Lemma1Check {
        r,
        theta,
        log_lhs: log_mod,
        log_rhs: log_real - expo,
    })
}

/// Integer parts of `(√n/c)·log((√n/c)/h)` and the same for `w`.
pub fn lemma_restrictions(n: u64, h: f64, w: f64) -> (i64, i64) {
    let sigma = scale(n);
    let f = |x: f64| (sigma * (sigma / x).ln()).floor() as i64;
    (f(h), f(w))
}

fn check_beta(n: u64, h: f64, w: f64) -> Result<()> {
    let cap = (n as f64).powf(0.24);
    for (name, v) in [("h", h), ("w", w)] {
        if !(v > 0.0) {
            return Err(precondition(format!("{name} must be positive")));
        }
        if v > cap {
            return Err(precondition(format!(
                "{name} = {v} exceeds n^0.24 = {cap:.4}; the restricted formula needs h, w = O(n^beta), beta < 1/4"
            )));
        }
    }
    Ok(())
}

/// `log` of the leading term of `p_{n,r,s}`, `HR(n)·e^{−h−w}`.
pub fn ln_restricted_asymptotic(n: u64, h: f64, w: f64) -> Result<f64> {
    if n == 0 {
        return Err(precondition("restricted_asymptotic needs n >= 1"));
    }
    check_beta(n, h, w)?;
    Ok(ln_hardy_ramanujan(n) - h - w)
}

pub fn restricted_asymptotic(n: u64, h: f64, w: f64) -> Result<f64> {
    ln_restricted_asymptotic(n, h, w).map(f64::exp)
}

/// One row of an exact-versus-asymptotic error sweep.
#[derive(Clone, Debug, Serialize)]
pub struct BandRow {
    pub n: u64,
    pub h: f64,
    pub w: f64,
    /// Exact count as a decimal string.
    pub exact: String,
    pub asymptotic: f64,
    /// `exact / asymptotic`.
    pub ratio: f64,
    /// Allowed `|ratio − 1|`.
    pub band: f64,
}

impl BandRow {
    pub fn within(&self) -> bool {
        (self.ratio - 1.0).abs() <= self.band
    }
}

/// `p(n)` against Hardy–Ramanujan with band `5·n^{−1/2}`.
pub fn hardy_ramanujan_band(n: u64) -> Result<BandRow> {
    if n == 0 {
        return Err(precondition("hardy_ramanujan needs n >= 1"));
    }
    let exact = count_partitions(n);
    let ln_a = ln_hardy_ramanujan(n);
    Ok(BandRow {
        n,
        h: 0.0,
        w: 0.0,
        exact: exact.to_str_radix(10),
        asymptotic: ln_a.exp(),
        ratio: (ln_big(&exact) - ln_a).exp(),
        band: BAND_CONSTANT / (n as f64).sqrt(),
    })
}

/// Exact `p_{n,r,s}` at the integer-part restrictions against
/// `HR(n)·e^{−h−w}`, band `5·n^{−1/2}(h+w+1)²`.
pub fn restricted_band(n: u64, h: f64, w: f64) -> Result<BandRow> {
    let ln_a = ln_restricted_asymptotic(n, h, w)?;
    let (r, s) = lemma_restrictions(n, h, w);
    if r <= 0 || s <= 0 {
        return Err(precondition(format!("degenerate restriction r = {r}, s = {s}")));
    }
    let exact = count_restricted(n, r as u64, s as u64);
    Ok(BandRow {
        n,
        h,
        w,
        exact: exact.to_str_radix(10),
        asymptotic: ln_a.exp(),
        ratio: (ln_big(&exact) - ln_a).exp(),
        band: BAND_CONSTANT * (h + w + 1.0).powi(2) / (n as f64).sqrt(),
    })
}

/// Exact `P(H₁ ≥ h, W₁ ≥ w)` against `e^{−h−w}`, band `5·n^{−1/2}(h+w+1)²`.
/// The `exact` column is the exact probability rendered as a float.
pub fn joint_tail_band(n: u64, h: f64, w: f64) -> Result<BandRow> {
    check_beta(n, h, w)?;
    let jt = joint_tail(n, h, w)?;
    let asym = (-h - w).exp();
    Ok(BandRow {
        n,
        h,
        w,
        exact: format!("{}", jt.value),
        asymptotic: asym,
        ratio: jt.value / asym,
        band: BAND_CONSTANT * (h + w + 1.0).powi(2) / (n as f64).sqrt(),
    })
}

/// `exp(−constant · log n / log log n)`.
pub fn headline_bound(n: u64, constant: f64) -> Result<f64> {
    if n < 16 {
        return Err(precondition(format!(
            "headline_bound needs n >= 16 (log log n > 1), got {n}"
        )));
    }
    let ln = (n as f64).ln();
    Ok((-constant * ln / ln.ln()).exp())
}

/// `2^{−2k} · C(2k, k)`.
pub fn rousseau_ali_lower(k: u64) -> Result<f64> {
    if k == 0 {
        return Err(precondition("rousseau_ali_lower needs k >= 1"));
    }
    let k = k as f64;
    Ok((ln_gamma(2.0 * k + 1.0) - 2.0 * ln_gamma(k + 1.0) - 2.0 * k * std::f64::consts::LN_2).exp())
}
