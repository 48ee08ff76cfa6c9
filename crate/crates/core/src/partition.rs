//! The [`Partition`] value type and the structural operations on Young
//! diagrams: conjugation, the Durfee square, the dominance order, the three
//! graphicality tests and exhaustive generation.
//!
//! Parts are stored largest first. Exhaustive generation runs in decreasing
//! lexicographic order, which is also the order used for reporting.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A weakly decreasing sequence of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
    weight: u64,
}

impl Partition {
    /// The empty partition of 0.
    pub fn empty() -> Self {
        Self {
            parts: Vec::new(),
            weight: 0,
        }
    }

    /// Validates `parts` and builds a partition.
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if let Some(i) = parts.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!(
                "parts not weakly decreasing at index {}",
                i + 1
            )));
        }
        if parts.last() == Some(&0) {
            return Err(Error::InvalidPartition("parts must be positive".into()));
        }
        let weight = parts.iter().map(|&p| u64::from(p)).sum();
        Ok(Self { parts, weight })
    }

    /// Builds a partition from parts in any order.
    pub fn from_unsorted(mut parts: Vec<u32>) -> Result<Self> {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self::new(parts)
    }

    /// Caller guarantees the invariants.
    pub(crate) fn from_parts_unchecked(parts: Vec<u32>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(parts.iter().all(|&p| p > 0));
        let weight = parts.iter().map(|&p| u64::from(p)).sum();
        Self { parts, weight }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// The total `n` of the parts.
    pub fn weight(&self) -> u64 {
        self.weight
    }

    /// Number of parts, `m(λ)`; also the length of the first row.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Largest part (height of the tallest column), 0 when empty.
    pub fn largest(&self) -> u32 {
        self.parts.first().copied().unwrap_or(0)
    }

    /// `i`-th part, 1-based, with missing parts read as 0.
    pub fn part(&self, i: usize) -> u32 {
        if i == 0 {
            return 0;
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Partition {
        Partition::from_parts_unchecked(conjugate_parts(&self.parts))
    }

    pub fn durfee(&self) -> usize {
        durfee(&self.parts)
    }

    /// `true` iff `lam ⪯ self` in the dominance order.
    pub fn dominates(&self, lam: &Partition) -> Result<bool> {
        dominates(self, lam)
    }

    pub fn is_graphical(&self) -> bool {
        nash_williams_graphical(self)
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

/// `λ'_i = |{j : λ_j ≥ i}|` for a weakly decreasing slice.
pub fn conjugate_parts(parts: &[u32]) -> Vec<u32> {
    let Some(&first) = parts.first() else {
        return Vec::new();
    };
    let mut out = Vec::with_capacity(first as usize);
    let mut j = parts.len();
    for i in 1..=first {
        while j > 0 && parts[j - 1] < i {
            j -= 1;
        }
        out.push(j as u32);
    }
    out
}

/// Durfee square size `max{i : λ_i ≥ i}` of a weakly decreasing slice.
pub fn durfee(parts: &[u32]) -> usize {
    parts
        .iter()
        .enumerate()
        .take_while(|&(i, &p)| p as usize > i)
        .count()
}

/// Partial-sum comparison of two weakly decreasing slices of any weights.
/// Returns `true` iff every prefix sum of `lower` is at most the matching
/// prefix sum of `upper`, missing parts read as 0.
pub(crate) fn prefix_dominated(lower: &[u32], upper: &[u32]) -> bool {
    let len = lower.len().max(upper.len());
    let (mut sl, mut su) = (0u64, 0u64);
    for i in 0..len {
        sl += u64::from(lower.get(i).copied().unwrap_or(0));
        su += u64::from(upper.get(i).copied().unwrap_or(0));
        if sl > su {
            return false;
        }
    }
    true
}

/// `true` iff `lam ⪯ mu`. Both must have the same weight.
pub fn dominates(mu: &Partition, lam: &Partition) -> Result<bool> {
    if mu.weight != lam.weight {
        return Err(Error::IncomparableWeights {
            left: mu.weight,
            right: lam.weight,
        });
    }
    Ok(prefix_dominated(&lam.parts, &mu.parts))
}

/// Nash-Williams form of the graphicality test on a raw slice of parts.
pub fn nash_williams_parts(parts: &[u32]) -> bool {
    let weight: u64 = parts.iter().map(|&p| u64::from(p)).sum();
    if weight % 2 == 1 {
        return false;
    }
    let d = durfee(parts);
    // λ'_i for i ≤ D only needs the count of parts ≥ i.
    let mut j = parts.len();
    let (mut conj_sum, mut part_sum) = (0u64, 0u64);
    for i in 1..=d {
        while j > 0 && (parts[j - 1] as usize) < i {
            j -= 1;
        }
        conj_sum += j as u64;
        part_sum += u64::from(parts[i - 1]);
        if conj_sum < part_sum + i as u64 {
            return false;
        }
    }
    true
}

pub fn nash_williams_graphical(p: &Partition) -> bool {
    nash_williams_parts(&p.parts)
}

/// Classical Erdős–Gallai inequalities
/// `Σ_{j≤i} λ_j ≤ i(i−1) + Σ_{j>i} min(λ_j, i)` for every `i`.
pub fn erdos_gallai_graphical(p: &Partition) -> bool {
    if p.weight % 2 == 1 {
        return false;
    }
    let parts = &p.parts;
    let m = parts.len();
    let mut lhs = 0u64;
    for i in 1..=m {
        lhs += u64::from(parts[i - 1]);
        let i64_ = i as u64;
        let tail: u64 = parts[i..].iter().map(|&x| u64::from(x).min(i64_)).sum();
        if lhs > i64_ * (i64_ - 1) + tail {
            return false;
        }
    }
    true
}

/// Constructive Havel–Hakimi reduction: repeatedly connect the vertex of
/// largest remaining degree to the next-largest ones.
pub fn havel_hakimi_realizable(p: &Partition) -> bool {
    if p.weight % 2 == 1 {
        return false;
    }
    let mut degrees: Vec<u32> = p.parts.clone();
    loop {
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        while degrees.last() == Some(&0) {
            degrees.pop();
        }
        let Some((&d, rest)) = degrees.split_first() else {
            return true;
        };
        let d = d as usize;
        if d > rest.len() {
            return false;
        }
        let mut next: Vec<u32> = Vec::with_capacity(rest.len());
        for (i, &x) in rest.iter().enumerate() {
            if i < d {
                if x == 0 {
                    return false;
                }
                next.push(x - 1);
            } else {
                next.push(x);
            }
        }
        degrees = next;
    }
}

/// A pair of degree tuples for the bipartite (Gale–Ryser) test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreePairCheck {
    alpha: Vec<u32>,
    beta: Vec<u32>,
}

impl DegreePairCheck {
    pub fn new(alpha: Vec<u32>, beta: Vec<u32>) -> Result<Self> {
        for (name, t) in [("alpha", &alpha), ("beta", &beta)] {
            if t.windows(2).any(|w| w[0] < w[1]) || t.contains(&0) {
                return Err(Error::InvalidPartition(format!(
                    "{name} must be weakly decreasing positive integers"
                )));
            }
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> &[u32] {
        &self.alpha
    }

    pub fn beta(&self) -> &[u32] {
        &self.beta
    }
}

/// Gale–Ryser: a bipartite graph with these degree sequences exists iff the
/// sums agree and `α ⪯ β'`.
pub fn gale_ryser_bipartite(c: &DegreePairCheck) -> bool {
    let sa: u64 = c.alpha.iter().map(|&x| u64::from(x)).sum();
    let sb: u64 = c.beta.iter().map(|&x| u64::from(x)).sum();
    sa == sb && prefix_dominated(&c.alpha, &conjugate_parts(&c.beta))
}

/// Visits every partition of `n` in decreasing lexicographic order and
/// returns the number of visits, which is `p(n)`.
///
/// The successor rule is constant amortized time, so `n = 90` (about
/// 5.7e7 partitions) takes seconds.
pub fn enumerate_partitions<F: FnMut(&[u32])>(n: u32, mut visit: F) -> u64 {
    if n == 0 {
        visit(&[]);
        return 1;
    }
    let mut buf = vec![1u32; n as usize + 1];
    run_descending(&mut buf, 0, n, n, &mut visit)
}

/// Visits the partitions of `n` whose largest part is exactly `largest`,
/// in decreasing lexicographic order. Together over `largest = 1..=n` these
/// cover every partition of `n` once, which is how exhaustive sweeps are
/// split across threads.
pub fn enumerate_with_largest_part<F: FnMut(&[u32])>(n: u32, largest: u32, mut visit: F) -> u64 {
    if largest == 0 || largest > n {
        if n == 0 && largest == 0 {
            visit(&[]);
            return 1;
        }
        return 0;
    }
    let mut buf = vec![1u32; (n - largest) as usize + 2];
    buf[0] = largest;
    run_descending(&mut buf, 1, n - largest, largest, &mut visit)
}

/// Parallel exhaustive fold over the partitions of `n`, split by largest
/// part. `fold` is applied per part-range and the results are combined with
/// `combine`; the result does not depend on the thread count as long as
/// `combine` is associative and commutative.
pub fn par_fold_partitions<T, F, C>(n: u32, identity: T, fold: F, combine: C) -> T
where
    T: Send + Sync + Clone,
    F: Fn(&mut T, &[u32]) + Sync,
    C: Fn(T, T) -> T + Sync,
{
    if n == 0 {
        let mut acc = identity;
        fold(&mut acc, &[]);
        return acc;
    }
    // Largest parts near n/4 dominate the work; reversing keeps big jobs early.
    (1..=n)
        .rev()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|m| {
            let mut acc = identity.clone();
            enumerate_with_largest_part(n, m, |p| fold(&mut acc, p));
            acc
        })
        .reduce(|| identity.clone(), &combine)
}

/// Collects every partition of `n` in decreasing lexicographic order.
pub fn all_partitions(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    enumerate_partitions(n, |p| out.push(Partition::from_parts_unchecked(p.to_vec())));
    out
}

/// Zoghbi–Stojmenović successor rule on `buf[offset..]`, which holds the
/// partitions of `rest` with parts at most `cap`. `buf[..offset]` is a fixed
/// prefix included in every visited slice. `buf[offset..]` must be at least
/// `rest + 1` long and filled with 1s.
fn run_descending<F: FnMut(&[u32])>(
    buf: &mut [u32],
    offset: usize,
    rest: u32,
    cap: u32,
    visit: &mut F,
) -> u64 {
    if rest == 0 {
        visit(&buf[..offset]);
        return 1;
    }
    let cap = cap.min(rest);
    let x = &mut buf[offset..];
    // First partition in decreasing lex order: (cap, cap, ..., remainder, 1, ...).
    let full = (rest / cap) as usize;
    let rem = rest % cap;
    for v in x.iter_mut() {
        *v = 1;
    }
    for v in x.iter_mut().take(full) {
        *v = cap;
    }
    // `h` is the 1-based index of the last part > 1, `m` the number of parts.
    let (mut m, mut h) = if rem == 0 {
        (full, if cap > 1 { full } else { 0 })
    } else {
        x[full] = rem;
        (full + 1, if rem > 1 { full + 1 } else { full })
    };
    let mut count = 1u64;
    visit(&buf[..offset + m]);
    while h > 0 {
        let x = &mut buf[offset..];
        if x[h - 1] == 2 {
            m += 1;
            x[h - 1] = 1;
            h -= 1;
        } else {
            let r = x[h - 1] - 1;
            let mut t = (m - h + 1) as u32;
            x[h - 1] = r;
            while t >= r {
                h += 1;
                x[h - 1] = r;
                t -= r;
            }
            if t == 0 {
                m = h;
            } else {
                m = h + 1;
                if t > 1 {
                    h += 1;
                    x[h - 1] = t;
                }
            }
        }
        count += 1;
        visit(&buf[..offset + m]);
    }
    count
}
