//! Exact partition counts in arbitrary precision: `p(n)`, the box-restricted
//! `p_{n,r,s}` and the exact joint tail of the tallest column and longest row.
//!
//! Nothing in here touches floating point except the final rendering of
//! ratios.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::asymptotics::C;
use crate::error::{precondition, Error, Result};

/// Arbitrary-precision nonnegative count.
pub type BigCount = BigUint;

/// Default degree bound for [`coeff_from_product`].
pub const DEFAULT_PRODUCT_BOUND: u64 = 200;

/// `p(0), p(1), …, p(n_max)` by Euler's pentagonal-number recurrence.
pub fn partition_numbers(n_max: usize) -> Vec<BigCount> {
    let mut p: Vec<BigUint> = Vec::with_capacity(n_max + 1);
    p.push(BigUint::one());
    for i in 1..=n_max {
        let (mut plus, mut minus) = (BigUint::zero(), BigUint::zero());
        for k in 1usize.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > i {
                break;
            }
            let g2 = k * (3 * k + 1) / 2;
            let acc = if k % 2 == 1 { &mut plus } else { &mut minus };
            *acc += &p[i - g1];
            if g2 <= i {
                *acc += &p[i - g2];
            }
        }
        p.push(plus - minus);
    }
    p
}

/// Exact `p(n)`, with `p(0) = 1`.
pub fn count_partitions(n: u64) -> BigCount {
    partition_numbers(n as usize).pop().unwrap()
}

/// Exact `p_{n,r,s}`: diagrams of area `n` with tallest column at most `r`
/// and longest row at most `s`.
///
/// Builds the Gaussian binomial `[r+s choose r]_q` one column height at a
/// time, `G_i = G_{i-1} · (1 − q^{s+i}) / (1 − q^i)`, truncated at degree
/// `n`. Every intermediate `G_i` has nonnegative coefficients, so the
/// subtraction never underflows. Cost is `O(min(r, s, n) · n)` big-integer
/// additions.
pub fn count_restricted(n: u64, r: u64, s: u64) -> BigCount {
    let r = r.min(n);
    let s = s.min(n);
    if n > r.saturating_mul(s) {
        return BigUint::zero();
    }
    let (short, long) = if r <= s { (r, s) } else { (s, r) };
    let n = n as usize;
    let (short, long) = (short as usize, long as usize);
    let mut a = vec![BigUint::zero(); n + 1];
    a[0] = BigUint::one();
    for i in 1..=short {
        for nu in i..=n {
            let (lo, hi) = a.split_at_mut(nu);
            hi[0] += &lo[nu - i];
        }
        let shift = long + i;
        if shift <= n {
            for nu in (shift..=n).rev() {
                let (lo, hi) = a.split_at_mut(nu);
                hi[0] -= &lo[nu - shift];
            }
        }
    }
    a.swap_remove(n)
}

/// `q^n` coefficient of `Π_{i≤r+s}(1−q^i) / (Π_{j≤r}(1−q^j) Π_{k≤s}(1−q^k))`
/// by signed polynomial arithmetic truncated at degree `n`, with the default
/// bound of 200.
pub fn coeff_from_product(n: u64, r: u64, s: u64) -> Result<BigCount> {
    coeff_from_product_bounded(n, r, s, DEFAULT_PRODUCT_BOUND)
}

pub fn coeff_from_product_bounded(n: u64, r: u64, s: u64, bound: u64) -> Result<BigCount> {
    if n > bound {
        return Err(Error::TruncationExceeded { n, bound });
    }
    let deg = n as usize;
    let mut poly = vec![BigInt::zero(); deg + 1];
    poly[0] = BigInt::one();
    // numerator: multiply by (1 − q^i), i = 1..=r+s
    for i in 1..=(r + s) as usize {
        if i > deg {
            break;
        }
        for nu in (i..=deg).rev() {
            let (lo, hi) = poly.split_at_mut(nu);
            hi[0] -= &lo[nu - i];
        }
    }
    // denominators: multiply by 1/(1 − q^j) = Σ q^{jt}
    for bound_j in [r, s] {
        for j in 1..=bound_j as usize {
            if j > deg {
                break;
            }
            for nu in j..=deg {
                let (lo, hi) = poly.split_at_mut(nu);
                hi[0] += &lo[nu - j];
            }
        }
    }
    let c = poly.swap_remove(deg);
    debug_assert!(!c.is_negative());
    Ok(c.to_biguint().expect("coefficient of a positive series"))
}

/// Natural log of a positive big integer, accurate to double precision.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().unwrap() as f64).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap();
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `num / den` as a float, computed through logarithms so that huge counts
/// never overflow.
pub fn ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    (ln_big(num) - ln_big(den)).exp()
}

/// Slanted index `⌈(√n/c) · log((√n/c)/x)⌉` of a positive level `x`.
pub fn slanted_index(n: u64, x: f64) -> i64 {
    let sigma = (n as f64).sqrt() / C;
    ceil_snapped(sigma * (sigma / x).ln())
}

/// Ceiling that treats values within a few ulps of an integer as that
/// integer, so exact lattice points survive rounding in the logarithm.
pub(crate) fn ceil_snapped(v: f64) -> i64 {
    let r = v.round();
    if (v - r).abs() <= 1e-12 * v.abs().max(1.0) {
        r as i64
    } else {
        v.ceil() as i64
    }
}

/// Exact value of `P(H₁ ≥ h, W₁ ≥ w) = p_{n,r,s} / p(n)`.
#[derive(Clone, Debug, Serialize)]
pub struct JointTail {
    pub n: u64,
    pub h: f64,
    pub w: f64,
    pub r: u64,
    pub s: u64,
    /// Reduced numerator of the exact ratio.
    #[serde(serialize_with = "ser_decimal")]
    pub numerator: BigUint,
    /// Reduced denominator of the exact ratio.
    #[serde(serialize_with = "ser_decimal")]
    pub denominator: BigUint,
    pub value: f64,
}

pub(crate) fn ser_decimal<S: serde::Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_str_radix(10))
}

/// `P(Λ₁ ≤ r, Λ'₁ ≤ s)` for the uniform random partition of `n`, with `r, s`
/// the ceilings of `(√n/c)·log((√n/c)/h)` and `(√n/c)·log((√n/c)/w)`.
pub fn joint_tail(n: u64, h: f64, w: f64) -> Result<JointTail> {
    if n == 0 {
        return Err(precondition("joint_tail needs n >= 1"));
    }
    if !(h > 0.0 && w > 0.0) {
        return Err(precondition("joint_tail needs h > 0 and w > 0"));
    }
    let r = slanted_index(n, h);
    let s = slanted_index(n, w);
    if r <= 0 || s <= 0 {
        return Err(precondition(format!(
            "degenerate restriction r = {r}, s = {s}: h and w must stay below sqrt(n)/c = {:.4}",
            (n as f64).sqrt() / C
        )));
    }
    let (r, s) = (r as u64, s as u64);
    let num = count_restricted(n, r, s);
    let den = count_partitions(n);
    let value = ratio_f64(&num, &den);
    let g = num.gcd(&den);
    Ok(JointTail {
        n,
        h,
        w,
        r,
        s,
        numerator: num / &g,
        denominator: den / &g,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::enumerate_partitions;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn small_partition_numbers() {
        let p = partition_numbers(10);
        let expect = [1u64, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
        for (a, b) in p.iter().zip(expect) {
            assert_eq!(*a, big(b));
        }
        assert_eq!(count_partitions(0), big(1));
        assert_eq!(count_partitions(5), big(7));
    }

    #[test]
    fn p100_matches_bounded_part_dp() {
        // independent route: parts ≤ m DP with m = n
        let n = 100usize;
        let mut t = vec![BigUint::zero(); n + 1];
        t[0] = BigUint::one();
        for part in 1..=n {
            for nu in part..=n {
                let (lo, hi) = t.split_at_mut(nu);
                hi[0] += &lo[nu - part];
            }
        }
        assert_eq!(t[n], big(190_569_292));
        assert_eq!(count_partitions(100), big(190_569_292));
    }

    #[test]
    fn restricted_examples() {
        assert_eq!(count_restricted(4, 2, 2), big(1));
        assert_eq!(count_restricted(5, 3, 2), big(1));
        assert_eq!(count_restricted(20, 20, 20), count_partitions(20));
        assert_eq!(count_restricted(0, 0, 0), big(1));
        assert_eq!(count_restricted(7, 2, 3), big(0));
        assert_eq!(count_restricted(3, 0, 5), big(0));
    }

    #[test]
    fn product_examples() {
        assert_eq!(coeff_from_product(4, 2, 2).unwrap(), big(1));
        assert_eq!(coeff_from_product(0, 3, 9).unwrap(), big(1));
        assert_eq!(
            coeff_from_product(30, 5, 7).unwrap(),
            count_restricted(30, 5, 7)
        );
        assert!(matches!(
            coeff_from_product(201, 3, 3),
            Err(Error::TruncationExceeded { .. })
        ));
    }

    #[test]
    fn restricted_against_product_exhaustive() {
        for n in 0..=30u64 {
            for r in 0..=n {
                for s in 0..=n {
                    let a = count_restricted(n, r, s);
                    assert_eq!(a, coeff_from_product(n, r, s).unwrap(), "({n},{r},{s})");
                    assert_eq!(a, count_restricted(n, s, r));
                }
            }
        }
    }

    #[test]
    fn restricted_matches_filtered_enumeration() {
        for n in 0..=16u32 {
            let mut grid = vec![vec![0u64; n as usize + 1]; n as usize + 1];
            enumerate_partitions(n, |p| {
                let (h, w) = (p.first().copied().unwrap_or(0) as usize, p.len());
                grid[h][w] += 1;
            });
            for r in 0..=n as usize {
                for s in 0..=n as usize {
                    let brute: u64 = (0..=r)
                        .flat_map(|h| (0..=s).map(move |w| (h, w)))
                        .map(|(h, w)| grid[h][w])
                        .sum();
                    assert_eq!(count_restricted(n as u64, r as u64, s as u64), big(brute));
                }
            }
        }
    }

    #[test]
    fn monotone_in_restrictions() {
        let n = 25;
        for r in 1..=n {
            for s in 1..=n {
                let here = count_restricted(n, r, s);
                assert!(here >= count_restricted(n, r - 1, s));
                assert!(here >= count_restricted(n, r, s - 1));
            }
        }
    }

    #[test]
    fn ln_big_is_accurate() {
        let x = count_partitions(1000);
        let digits = x.to_str_radix(10);
        let lead: f64 = digits[..17].parse().unwrap();
        let expect = lead.ln() + (digits.len() - 17) as f64 * std::f64::consts::LN_10;
        assert!((ln_big(&x) - expect).abs() < 1e-12 * expect);
        assert_eq!(ln_big(&big(1)), 0.0);
        assert!((ratio_f64(&big(1), &big(4)) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn joint_tail_small_exact() {
        let jt = joint_tail(100, 0.5, 0.5).unwrap();
        let num = count_restricted(100, jt.r, jt.s);
        let den = count_partitions(100);
        assert_eq!(&jt.numerator * &den, &num * &jt.denominator);
        assert!((jt.value - ratio_f64(&num, &den)).abs() < 1e-14);
        assert!(jt.value > 0.0 && jt.value < 1.0);
    }

    #[test]
    fn joint_tail_degenerate_edge() {
        let sigma = 100f64.sqrt() / C;
        assert!(joint_tail(100, sigma, 1.0).is_err());
        assert!(joint_tail(100, 1.0, 2.0 * sigma).is_err());
        assert!(joint_tail(100, 0.0, 1.0).is_err());
    }
}
