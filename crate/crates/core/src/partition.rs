//! Integer partitions and Young-diagram combinatorics.
//!
//! Border strips are located through first-column hook lengths (beta
//! numbers): a hook of length `t` in row `i` exists exactly when
//! `beta[i] - t` is a nonnegative position not occupied by another bead, and
//! removing the strip moves that bead down by `t`.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// A weakly decreasing sequence of positive parts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
    size: u32,
}

impl Partition {
    /// The unique partition of zero.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Build a partition from parts in any order; zero parts are dropped.
    pub fn from_parts(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let size = parts.iter().sum();
        Self { parts, size }
    }

    /// Build from parts that are already weakly decreasing and positive.
    pub fn from_sorted(parts: Vec<u32>) -> Result<Self, Error> {
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!("{parts:?}")));
        }
        let size = parts.iter().sum();
        Ok(Self { parts, size })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn largest_part(&self) -> u32 {
        self.parts.first().copied().unwrap_or(0)
    }

    /// Whether some part equals `t`.
    pub fn has_part(&self, t: u32) -> bool {
        self.parts.binary_search_by(|p| t.cmp(p)).is_ok()
    }

    /// Part multiplicities as `(part, count)` pairs, largest part first.
    pub fn multiplicities(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((q, m)) if *q == p => *m += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// The transposed diagram.
    pub fn conjugate(&self) -> Self {
        let width = self.largest_part() as usize;
        let mut cols = vec![0u32; width];
        for &p in &self.parts {
            for c in cols.iter_mut().take(p as usize) {
                *c += 1;
            }
        }
        Self {
            parts: cols,
            size: self.size,
        }
    }

    /// First-column hook lengths, top row first (strictly decreasing).
    pub fn beta_numbers(&self) -> Vec<u32> {
        let rows = self.parts.len() as u32;
        self.parts
            .iter()
            .enumerate()
            .map(|(i, &p)| p + rows - 1 - i as u32)
            .collect()
    }

    fn from_beta_numbers(mut beta: Vec<u32>) -> Self {
        beta.sort_unstable_by(|a, b| b.cmp(a));
        let rows = beta.len() as u32;
        let parts = beta
            .iter()
            .enumerate()
            .map(|(i, &b)| b - (rows - 1 - i as u32))
            .collect();
        Self::from_parts(parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("]")
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Parses the bracketed text form, e.g. `"[4,2,1]"` or `"[]"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::InvalidPartition(s.to_string());
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(bad)?
            .trim();
        if inner.is_empty() {
            return Ok(Self::empty());
        }
        let parts = inner
            .split(',')
            .map(|x| x.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_sorted(parts).map_err(|_| bad())
    }
}

/// A hook in a Young diagram, addressed by its corner box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hook {
    pub row: usize,
    pub col: usize,
    pub length: u32,
    pub height: u32,
}

/// The result of removing one border strip.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StripRemoval {
    pub hook: Hook,
    pub remainder: Partition,
    /// `(-1)^height`
    pub sign: i8,
}

/// All partitions of `n` in reverse-lexicographic order.
pub fn enumerate_partitions(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fill(n, n, &mut current, &mut out);
    out
}

fn fill(remaining: u32, max_part: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition {
            parts: current.clone(),
            size: current.iter().sum(),
        });
        return;
    }
    for part in (1..=max_part.min(remaining)).rev() {
        current.push(part);
        fill(remaining - part, part, current, out);
        current.pop();
    }
}

/// Every hook of the diagram in row-major order.
pub fn hooks(lambda: &Partition) -> Vec<Hook> {
    let conj = lambda.conjugate();
    let mut out = Vec::with_capacity(lambda.size() as usize);
    for (row, &part) in lambda.parts().iter().enumerate() {
        for col in 0..part as usize {
            let arm = part - col as u32 - 1;
            let leg = conj.parts()[col] - row as u32 - 1;
            out.push(Hook {
                row,
                col,
                length: arm + leg + 1,
                height: leg,
            });
        }
    }
    out
}

/// One hook length per box, in row-major box order.
pub fn hook_multiset(lambda: &Partition) -> Vec<u32> {
    hooks(lambda).into_iter().map(|h| h.length).collect()
}

/// Every border strip of length `t`, ordered by the row of its hook corner.
pub fn strips_of_length(lambda: &Partition, t: u32) -> Vec<StripRemoval> {
    assert!(t >= 1, "strip length must be positive");
    let beta = lambda.beta_numbers();
    let mut out = Vec::new();
    for (row, &b) in beta.iter().enumerate() {
        if b < t {
            continue;
        }
        let target = b - t;
        // beta is strictly decreasing, so beads above `target` are a prefix.
        if beta.binary_search_by(|x| target.cmp(x)).is_ok() {
            continue;
        }
        let height = beta[row + 1..].iter().take_while(|&&x| x > target).count() as u32;
        let beads_below = beta.iter().filter(|&&x| x < target).count() as u32;
        let col = (target - beads_below) as usize;
        let mut moved = beta.clone();
        moved[row] = target;
        out.push(StripRemoval {
            hook: Hook {
                row,
                col,
                length: t,
                height,
            },
            remainder: Partition::from_beta_numbers(moved),
            sign: if height.is_multiple_of(2) { 1 } else { -1 },
        });
    }
    out
}

/// Whether no hook length of `lambda` is divisible by `t`.
pub fn is_t_core(lambda: &Partition, t: u32) -> bool {
    assert!(t >= 1, "core modulus must be positive");
    // A hook of length divisible by t exists iff a hook of length t exists.
    strips_of_length(lambda, t).is_empty()
}
