//! Exact counts: p(n), partitions with bounded parts, and t-cores.
//!
//! Counts are built as dense tables indexed by `n` and can be persisted to a
//! cache directory. The cache format is a small versioned binary envelope
//! around decimal-string big integers:
//!
//! ```text
//! magic   b"CCTB"
//! version u16 LE  (= 1)
//! kind    u8      (0 = p, 1 = bounded, 2 = t-core)
//! has_t   u8
//! limit_n u64 LE
//! limit_t u64 LE  (0 when has_t = 0)
//! count   u64 LE
//! count x { len u32 LE, ascii decimal digits }
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::partition::{enumerate_partitions, is_t_core};
use crate::BigCount;

/// Largest `n` the enumeration oracles accept.
pub const BRUTE_FORCE_GUARD: u32 = 40;

/// Generalized pentagonal numbers `k(3k-1)/2` and `k(3k+1)/2` up to `limit`,
/// paired with the sign `(-1)^k`.
fn pentagonal_terms(limit: usize) -> Vec<(usize, bool)> {
    let mut out = Vec::new();
    for k in 1usize.. {
        let first = k * (3 * k - 1) / 2;
        if first > limit {
            break;
        }
        let negative = k % 2 == 1;
        out.push((first, negative));
        let second = k * (3 * k + 1) / 2;
        if second <= limit {
            out.push((second, negative));
        }
    }
    out
}

/// `p(0), .., p(n)` by Euler's pentagonal recurrence.
pub fn partition_counts(n: u32) -> Vec<BigCount> {
    let n = n as usize;
    let pent = pentagonal_terms(n);
    let mut p: Vec<BigUint> = Vec::with_capacity(n + 1);
    p.push(BigUint::one());
    for m in 1..=n {
        let mut plus = BigUint::zero();
        let mut minus = BigUint::zero();
        for &(g, euler_negative) in pent.iter().take_while(|(g, _)| *g <= m) {
            // p(m) = sum_k (-1)^(k+1) [p(m - g1) + p(m - g2)]
            if euler_negative {
                plus += &p[m - g];
            } else {
                minus += &p[m - g];
            }
        }
        p.push(plus - minus);
    }
    p
}

pub fn partition_count(n: u32) -> BigCount {
    partition_counts(n).pop().unwrap()
}

/// `p_t(0), .., p_t(n)`: partitions with every part at most `t`.
pub fn bounded_partition_counts(t: u32, n: u32) -> Vec<BigCount> {
    assert!(t >= 1, "part bound must be positive");
    let n = n as usize;
    let mut dp = vec![BigUint::zero(); n + 1];
    dp[0] = BigUint::one();
    for part in 1..=(t as usize).min(n) {
        for m in part..=n {
            let (lo, hi) = dp.split_at_mut(m);
            hi[0] += &lo[m - part];
        }
    }
    dp
}

pub fn bounded_partition_count(t: u32, n: u32) -> BigCount {
    bounded_partition_counts(t, n).pop().unwrap()
}

/// Coefficients of `prod_{m>=1} (1 - x^m)^t` up to `x^degree`.
fn euler_power(t: u32, degree: usize) -> Vec<BigInt> {
    let mut sparse: Vec<(usize, i8)> = vec![(0, 1)];
    sparse.extend(
        pentagonal_terms(degree)
            .into_iter()
            .map(|(g, negative)| (g, if negative { -1 } else { 1 })),
    );
    let mut acc = vec![BigInt::zero(); degree + 1];
    acc[0] = BigInt::one();
    for _ in 0..t {
        let mut next = vec![BigInt::zero(); degree + 1];
        for (i, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for &(g, s) in sparse.iter().take_while(|(g, _)| i + g <= degree) {
                if s > 0 {
                    next[i + g] += a;
                } else {
                    next[i + g] -= a;
                }
            }
        }
        acc = next;
    }
    acc
}

fn into_count(value: BigInt) -> BigCount {
    let (sign, mag) = value.into_parts();
    assert!(sign != Sign::Minus, "negative count");
    mag
}

/// `c_t(0), .., c_t(n)`, the q-expansion of `prod (1 - q^{tm})^t / prod (1 - q^m)`.
pub fn tcore_counts(t: u32, n: u32) -> Vec<BigCount> {
    assert!(t >= 1, "core modulus must be positive");
    let p = partition_counts(n);
    let outer = euler_power(t, n as usize / t as usize);
    (0..=n as usize)
        .map(|m| {
            let mut acc = BigInt::zero();
            for (j, a) in outer.iter().enumerate() {
                let shift = j * t as usize;
                if shift > m {
                    break;
                }
                if !a.is_zero() {
                    acc += a * BigInt::from(p[m - shift].clone());
                }
            }
            into_count(acc)
        })
        .collect()
}

/// `c_t(n)` from the single coefficient of the product at `q^n`.
pub fn tcore_count(t: u32, n: u32) -> BigCount {
    let p = partition_counts(n);
    tcore_count_with(t, n, &p)
}

/// `c_t(n)` reusing a precomputed `p(0..=n)` table.
pub fn tcore_count_with(t: u32, n: u32, p: &[BigCount]) -> BigCount {
    assert!(t >= 1, "core modulus must be positive");
    assert!(p.len() > n as usize, "partition table too short");
    let n = n as usize;
    let t = t as usize;
    let outer = euler_power(t as u32, n / t);
    let mut acc = BigInt::zero();
    for (j, a) in outer.iter().enumerate() {
        if !a.is_zero() {
            acc += a * BigInt::from(p[n - j * t].clone());
        }
    }
    into_count(acc)
}

/// Counts t-cores of `n` by enumerating every partition of `n`.
pub fn tcore_count_bruteforce(t: u32, n: u32) -> Result<BigCount> {
    if n > BRUTE_FORCE_GUARD {
        return Err(Error::GuardExceeded {
            what: "t-core enumeration oracle",
            n: n as u64,
            limit: BRUTE_FORCE_GUARD as u64,
        });
    }
    let count = enumerate_partitions(n)
        .iter()
        .filter(|lambda| is_t_core(lambda, t))
        .count();
    Ok(BigUint::from(count))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CountKind {
    P,
    PBounded,
    TCore,
}

impl CountKind {
    fn code(self) -> u8 {
        match self {
            CountKind::P => 0,
            CountKind::PBounded => 1,
            CountKind::TCore => 2,
        }
    }

    fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(CountKind::P),
            1 => Some(CountKind::PBounded),
            2 => Some(CountKind::TCore),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CountKind::P => "p",
            CountKind::PBounded => "pt",
            CountKind::TCore => "core",
        }
    }
}

/// A dense, immutable table of counts for `n = 0..=limit_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    kind: CountKind,
    limit_n: u32,
    limit_t: Option<u32>,
    entries: Vec<BigCount>,
}

const MAGIC: &[u8; 4] = b"CCTB";
const FORMAT_VERSION: u16 = 1;

impl CountTable {
    pub fn build(kind: CountKind, limit_n: u32, limit_t: Option<u32>) -> Result<Self> {
        let entries = match (kind, limit_t) {
            (CountKind::P, None) => partition_counts(limit_n),
            (CountKind::PBounded, Some(t)) if t >= 1 => bounded_partition_counts(t, limit_n),
            (CountKind::TCore, Some(t)) if t >= 1 => tcore_counts(t, limit_n),
            _ => {
                return Err(Error::Precondition(format!(
                    "table kind {} needs {}",
                    kind.name(),
                    if kind == CountKind::P { "no t" } else { "t >= 1" }
                )))
            }
        };
        Ok(Self {
            kind,
            limit_n,
            limit_t,
            entries,
        })
    }

    pub fn kind(&self) -> CountKind {
        self.kind
    }

    pub fn limit_n(&self) -> u32 {
        self.limit_n
    }

    pub fn limit_t(&self) -> Option<u32> {
        self.limit_t
    }

    pub fn entries(&self) -> &[BigCount] {
        &self.entries
    }

    pub fn get(&self, n: u32) -> Option<&BigCount> {
        self.entries.get(n as usize)
    }

    /// File name this table is stored under inside a cache directory.
    pub fn file_name(kind: CountKind, limit_n: u32, limit_t: Option<u32>) -> String {
        match limit_t {
            Some(t) => format!("{}-t{t}-n{limit_n}.v{FORMAT_VERSION}.cct", kind.name()),
            None => format!("{}-n{limit_n}.v{FORMAT_VERSION}.cct", kind.name()),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.push(self.kind.code());
        out.push(self.limit_t.is_some() as u8);
        out.extend_from_slice(&(self.limit_n as u64).to_le_bytes());
        out.extend_from_slice(&(self.limit_t.unwrap_or(0) as u64).to_le_bytes());
        out.extend_from_slice(&(self.entries.len() as u64).to_le_bytes());
        for e in &self.entries {
            let digits = e.to_str_radix(10);
            out.extend_from_slice(&(digits.len() as u32).to_le_bytes());
            out.extend_from_slice(digits.as_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        let bad = |reason: &str| Error::CacheFormat {
            path: path.to_path_buf(),
            reason: reason.to_string(),
        };
        let mut cur = Cursor { bytes, pos: 0 };
        if cur.take(4).ok_or_else(|| bad("truncated"))? != MAGIC {
            return Err(bad("bad magic"));
        }
        let version = u16::from_le_bytes(cur.array().ok_or_else(|| bad("truncated"))?);
        if version != FORMAT_VERSION {
            return Err(bad(&format!("unsupported version {version}")));
        }
        let kind = cur
            .take(1)
            .and_then(|b| CountKind::from_code(b[0]))
            .ok_or_else(|| bad("bad kind"))?;
        let has_t = cur.take(1).ok_or_else(|| bad("truncated"))?[0] != 0;
        let limit_n = u64::from_le_bytes(cur.array().ok_or_else(|| bad("truncated"))?);
        let limit_t = u64::from_le_bytes(cur.array().ok_or_else(|| bad("truncated"))?);
        let count = u64::from_le_bytes(cur.array().ok_or_else(|| bad("truncated"))?);
        if count != limit_n + 1 {
            return Err(bad("entry count does not match limit"));
        }
        let mut entries = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let len = u32::from_le_bytes(cur.array().ok_or_else(|| bad("truncated"))?);
            let digits = cur.take(len as usize).ok_or_else(|| bad("truncated"))?;
            let value =
                BigUint::parse_bytes(digits, 10).ok_or_else(|| bad("bad decimal entry"))?;
            entries.push(value);
        }
        if cur.pos != bytes.len() {
            return Err(bad("trailing bytes"));
        }
        Ok(Self {
            kind,
            limit_n: limit_n as u32,
            limit_t: has_t.then_some(limit_t as u32),
            entries,
        })
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Option<&'a [u8]> {
        let slice = self.bytes.get(self.pos..self.pos + len)?;
        self.pos += len;
        Some(slice)
    }

    fn array<const L: usize>(&mut self) -> Option<[u8; L]> {
        self.take(L).map(|s| s.try_into().unwrap())
    }
}

/// Directory-backed store of [`CountTable`]s.
#[derive(Clone, Debug)]
pub struct CountCache {
    dir: PathBuf,
}

impl CountCache {
    pub const DEFAULT_DIR: &'static str = "./.charcensus-cache";

    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, kind: CountKind, limit_n: u32, limit_t: Option<u32>) -> PathBuf {
        self.dir.join(CountTable::file_name(kind, limit_n, limit_t))
    }

    /// Load the table if present, otherwise build and persist it.
    pub fn load_or_build(
        &self,
        kind: CountKind,
        limit_n: u32,
        limit_t: Option<u32>,
    ) -> Result<CountTable> {
        let path = self.path(kind, limit_n, limit_t);
        if path.exists() {
            let table = CountTable::from_bytes(&fs::read(&path)?, &path)?;
            if table.kind == kind && table.limit_n == limit_n && table.limit_t == limit_t {
                return Ok(table);
            }
            log::warn!("cache key mismatch in {}, rebuilding", path.display());
        }
        let table = CountTable::build(kind, limit_n, limit_t)?;
        self.store(&table)?;
        Ok(table)
    }

    pub fn store(&self, table: &CountTable) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path(table.kind, table.limit_n, table.limit_t);
        let tmp = path.with_extension("tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&table.to_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(())
    }
}
