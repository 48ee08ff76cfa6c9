//! Dense tables of restricted partition counts, shared by the exact sampler
//! and the counting cross-checks, with a small versioned on-disk cache.
//!
//! Entries are stored as fixed-width little-endian `u64` limbs in one flat
//! buffer; the width is that of `p(n_max)`, the largest entry.
//!
//! Cache file layout (all integers little-endian):
//!
//! ```text
//! magic    4 bytes  b"PRCT"
//! version  u32      1
//! n_max    u64
//! mode     u8       1 = by-largest-part, 2 = by-height-and-width
//! count    u64      number of records
//! records  count × (len: u32, len bytes of the integer, least significant first)
//! ```

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use serde::Serialize;

use crate::count::partition_numbers;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"PRCT";
pub const CACHE_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableMode {
    /// `entry(ν, m)`: partitions of `ν` with every part at most `m`.
    ByLargestPart,
    /// `entry(ν, r, s)`: `p_{ν,r,s}`, tallest column ≤ r, longest row ≤ s.
    ByHeightAndWidth,
}

impl TableMode {
    fn code(self) -> u8 {
        match self {
            TableMode::ByLargestPart => 1,
            TableMode::ByHeightAndWidth => 2,
        }
    }

    fn from_code(c: u8) -> Option<Self> {
        match c {
            1 => Some(TableMode::ByLargestPart),
            2 => Some(TableMode::ByHeightAndWidth),
            _ => None,
        }
    }

    fn slug(self) -> &'static str {
        match self {
            TableMode::ByLargestPart => "largest-part",
            TableMode::ByHeightAndWidth => "height-width",
        }
    }
}

/// Immutable table of exact restricted counts up to `n_max`.
#[derive(Clone, Debug)]
pub struct RestrictedCountTable {
    n_max: u32,
    mode: TableMode,
    width: usize,
    limbs: Vec<u64>,
}

impl RestrictedCountTable {
    pub fn build(n_max: u32, mode: TableMode) -> Self {
        match mode {
            TableMode::ByLargestPart => Self::build_largest_part(n_max),
            TableMode::ByHeightAndWidth => Self::build_height_width(n_max),
        }
    }

    fn width_for(n_max: u32) -> usize {
        let p = partition_numbers(n_max as usize).pop().unwrap();
        (p.bits().div_ceil(64) as usize).max(1)
    }

    fn build_largest_part(n_max: u32) -> Self {
        let width = Self::width_for(n_max);
        let n = n_max as usize;
        let entries = (n + 1) * (n + 2) / 2;
        let mut t = Self {
            n_max,
            mode: TableMode::ByLargestPart,
            width,
            limbs: vec![0; entries * width],
        };
        t.limbs[0] = 1; // T(0, 0)
        let mut tmp = vec![0u64; width];
        for nu in 1..=n {
            // T(ν, 0) = 0; T(ν, m) = T(ν, m−1) + T(ν−m, min(m, ν−m))
            for m in 1..=nu {
                let rest = nu - m;
                let a = tri(nu, m - 1);
                let b = tri(rest, m.min(rest));
                add_limbs(&mut tmp, t.slot(a), t.slot(b));
                let dst = tri(nu, m);
                t.slot_mut(dst).copy_from_slice(&tmp);
            }
        }
        t
    }

    fn build_height_width(n_max: u32) -> Self {
        let width = Self::width_for(n_max);
        let n = n_max as usize;
        let side = n + 1;
        let mut t = Self {
            n_max,
            mode: TableMode::ByHeightAndWidth,
            width,
            limbs: vec![0; side * side * side * width],
        };
        let idx = |nu: usize, r: usize, s: usize| (nu * side + r) * side + s;
        for r in 0..side {
            for s in 0..side {
                t.slot_mut(idx(0, r, s))[0] = 1;
            }
        }
        let mut tmp = vec![0u64; width];
        for nu in 1..side {
            for r in 1..side {
                for s in 1..side {
                    // peel the largest part: either it is < r, or it is r and
                    // the rest has parts ≤ r and at most s − 1 of them
                    let a = idx(nu, r - 1, s);
                    if nu >= r {
                        let b = idx(nu - r, r, s - 1);
                        add_limbs(&mut tmp, t.slot(a), t.slot(b));
                    } else {
                        tmp.copy_from_slice(t.slot(a));
                    }
                    t.slot_mut(idx(nu, r, s)).copy_from_slice(&tmp);
                }
            }
        }
        t
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn mode(&self) -> TableMode {
        self.mode
    }

    /// Number of stored entries.
    pub fn len(&self) -> usize {
        self.limbs.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.limbs.is_empty()
    }

    fn slot(&self, i: usize) -> &[u64] {
        &self.limbs[i * self.width..(i + 1) * self.width]
    }

    fn slot_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.limbs[i * self.width..(i + 1) * self.width]
    }

    /// Limbs of `T(ν, m)`, `m ≤ ν`, in by-largest-part mode.
    pub(crate) fn largest_part_limbs(&self, nu: usize, m: usize) -> &[u64] {
        debug_assert_eq!(self.mode, TableMode::ByLargestPart);
        self.slot(tri(nu, m.min(nu)))
    }

    /// Number of partitions of `nu` with all parts at most `m`.
    pub fn entry(&self, nu: u32, m: u32) -> Result<BigUint> {
        if self.mode != TableMode::ByLargestPart {
            return Err(Error::Precondition(
                "entry(ν, m) needs a by-largest-part table".into(),
            ));
        }
        self.check_range(nu)?;
        Ok(limbs_to_big(self.largest_part_limbs(nu as usize, m as usize)))
    }

    /// `p_{ν,r,s}`.
    pub fn entry3(&self, nu: u32, r: u32, s: u32) -> Result<BigUint> {
        if self.mode != TableMode::ByHeightAndWidth {
            return Err(Error::Precondition(
                "entry(ν, r, s) needs a by-height-and-width table".into(),
            ));
        }
        self.check_range(nu)?;
        let side = self.n_max as usize + 1;
        let (r, s) = (r.min(self.n_max) as usize, s.min(self.n_max) as usize);
        Ok(limbs_to_big(self.slot((nu as usize * side + r) * side + s)))
    }

    fn check_range(&self, nu: u32) -> Result<()> {
        if nu > self.n_max {
            return Err(Error::TableTooSmall {
                needed: nu.into(),
                available: self.n_max.into(),
            });
        }
        Ok(())
    }

    /// File name used for this table inside a cache directory.
    pub fn cache_file_name(n_max: u32, mode: TableMode) -> String {
        format!("counts-v{CACHE_VERSION}-{}-{n_max}.bin", mode.slug())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        // write to a sibling file first so readers never see a torn table
        let tmp = path.with_extension("partial");
        {
            let mut w = BufWriter::new(fs::File::create(&tmp)?);
            w.write_all(MAGIC)?;
            w.write_all(&CACHE_VERSION.to_le_bytes())?;
            w.write_all(&u64::from(self.n_max).to_le_bytes())?;
            w.write_all(&[self.mode.code()])?;
            w.write_all(&(self.len() as u64).to_le_bytes())?;
            for i in 0..self.len() {
                let bytes = limbs_to_big(self.slot(i)).to_bytes_le();
                w.write_all(&(bytes.len() as u32).to_le_bytes())?;
                w.write_all(&bytes)?;
            }
            w.flush()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(fs::File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::CacheFormat("bad magic".into()));
        }
        let version = u32::from_le_bytes(read_array(&mut r)?);
        if version != CACHE_VERSION {
            return Err(Error::CacheFormat(format!("unsupported version {version}")));
        }
        let n_max = u64::from_le_bytes(read_array(&mut r)?);
        let n_max = u32::try_from(n_max).map_err(|_| Error::CacheFormat("n_max overflow".into()))?;
        let [code] = read_array::<1>(&mut r)?;
        let mode = TableMode::from_code(code)
            .ok_or_else(|| Error::CacheFormat(format!("unknown mode {code}")))?;
        let count = u64::from_le_bytes(read_array(&mut r)?) as usize;
        let side = n_max as usize + 1;
        let expected = match mode {
            TableMode::ByLargestPart => side * (side + 1) / 2,
            TableMode::ByHeightAndWidth => side * side * side,
        };
        if count != expected {
            return Err(Error::CacheFormat(format!(
                "record count {count} does not match n_max {n_max}"
            )));
        }
        let width = Self::width_for(n_max);
        let mut limbs = vec![0u64; count * width];
        let mut bytes = Vec::new();
        for i in 0..count {
            let len = u32::from_le_bytes(read_array(&mut r)?) as usize;
            if len > width * 8 {
                return Err(Error::CacheFormat(format!("record {i} too wide")));
            }
            bytes.resize(len, 0);
            r.read_exact(&mut bytes)?;
            for (j, chunk) in bytes.chunks(8).enumerate() {
                let mut word = [0u8; 8];
                word[..chunk.len()].copy_from_slice(chunk);
                limbs[i * width + j] = u64::from_le_bytes(word);
            }
        }
        Ok(Self {
            n_max,
            mode,
            width,
            limbs,
        })
    }

    /// Loads the table from `cache_dir` when present, otherwise builds it and
    /// writes it there. With no cache directory the table is just built.
    pub fn load_or_build(n_max: u32, mode: TableMode, cache_dir: Option<&Path>) -> Result<Self> {
        let Some(dir) = cache_dir else {
            return Ok(Self::build(n_max, mode));
        };
        let path: PathBuf = dir.join(Self::cache_file_name(n_max, mode));
        if path.exists() {
            let t = Self::load(&path)?;
            if t.n_max == n_max && t.mode == mode {
                return Ok(t);
            }
            return Err(Error::CacheFormat(format!(
                "{} holds a different table",
                path.display()
            )));
        }
        let t = Self::build(n_max, mode);
        t.save(&path)?;
        Ok(t)
    }
}

fn read_array<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

#[inline]
fn tri(nu: usize, m: usize) -> usize {
    nu * (nu + 1) / 2 + m
}

fn add_limbs(dst: &mut [u64], a: &[u64], b: &[u64]) {
    let mut carry = false;
    for ((d, &x), &y) in dst.iter_mut().zip(a).zip(b) {
        let (s1, c1) = x.overflowing_add(y);
        let (s2, c2) = s1.overflowing_add(carry as u64);
        *d = s2;
        carry = c1 || c2;
    }
    debug_assert!(!carry, "table entry overflowed its width");
}

pub(crate) fn limbs_to_big(limbs: &[u64]) -> BigUint {
    let mut digits = Vec::with_capacity(limbs.len() * 2);
    for &l in limbs {
        digits.push(l as u32);
        digits.push((l >> 32) as u32);
    }
    BigUint::new(digits)
}

/// Compares two equal-width little-endian limb slices.
#[inline]
pub(crate) fn cmp_limbs(a: &[u64], b: &[u64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        match x.cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::count::{count_partitions, count_restricted};

    #[test]
    fn largest_part_entries() {
        let t = RestrictedCountTable::build(60, TableMode::ByLargestPart);
        for nu in 0..=60u32 {
            assert_eq!(t.entry(nu, nu).unwrap(), count_partitions(nu.into()));
            for m in 0..=nu {
                assert_eq!(
                    t.entry(nu, m).unwrap(),
                    count_restricted(nu.into(), m.into(), nu.into())
                );
                if m > 0 {
                    assert!(t.entry(nu, m).unwrap() >= t.entry(nu, m - 1).unwrap());
                }
            }
        }
        assert!(matches!(t.entry(61, 3), Err(Error::TableTooSmall { .. })));
        assert!(t.entry3(3, 1, 1).is_err());
    }

    #[test]
    fn height_width_peel_table_matches_row_method() {
        let t = RestrictedCountTable::build(24, TableMode::ByHeightAndWidth);
        for nu in 0..=24u32 {
            for r in 0..=24u32 {
                for s in 0..=24u32 {
                    assert_eq!(
                        t.entry3(nu, r, s).unwrap(),
                        count_restricted(nu.into(), r.into(), s.into())
                    );
                }
            }
        }
    }

    #[test]
    fn wide_entries_survive_the_cache() {
        let dir = std::env::temp_dir().join(format!("prct-test-{}", std::process::id()));
        let t = RestrictedCountTable::load_or_build(300, TableMode::ByLargestPart, Some(&dir))
            .unwrap();
        let path = dir.join(RestrictedCountTable::cache_file_name(300, TableMode::ByLargestPart));
        assert!(path.exists());
        let back = RestrictedCountTable::load_or_build(300, TableMode::ByLargestPart, Some(&dir))
            .unwrap();
        assert_eq!(back.limbs, t.limbs);
        assert_eq!(back.entry(300, 300).unwrap(), count_partitions(300));

        let mut raw = fs::read(&path).unwrap();
        raw[0] = b'X';
        fs::write(&path, &raw).unwrap();
        assert!(matches!(
            RestrictedCountTable::load(&path),
            Err(Error::CacheFormat(_))
        ));
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn limb_compare() {
        use std::cmp::Ordering::*;
        assert_eq!(cmp_limbs(&[5, 1], &[7, 0]), Greater);
        assert_eq!(cmp_limbs(&[5, 1], &[7, 1]), Less);
        assert_eq!(cmp_limbs(&[7, 1], &[7, 1]), Equal);
    }
}
