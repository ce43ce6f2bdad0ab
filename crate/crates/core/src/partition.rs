//! Set partitions of `[r] = {1, …, r}`, their block signatures, and the
//! Möbius coefficients of the partition lattice counted from the bottom
//! element `1|2|…|r`.

use std::fmt;
use std::str::FromStr;

use num_traits::One;
use thiserror::Error;

use crate::exact::{factorial_u, BigInt};

/// Default upper bound on `r` for explicit enumeration (Bell(12) = 4 213 597).
pub const DEFAULT_PARTITION_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("ground set size {r} outside 1..={cap}")]
    OutOfRange { r: usize, cap: usize },
    #[error("invalid blocks: {0}")]
    InvalidBlocks(String),
    #[error("ground sets differ ({0} vs {1})")]
    MismatchedGroundSets(usize, usize),
    #[error("signature weight {weight} does not match r = {r}")]
    InconsistentSignature { r: usize, weight: usize },
    #[error("cannot parse partition {0:?}")]
    Parse(String),
}

/// A partition of `[r]`. Blocks are sorted internally and ordered by their
/// least element, so derived equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    r: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn from_blocks(r: usize, blocks: Vec<Vec<usize>>) -> Result<Self, PartitionError> {
        let mut seen = vec![false; r + 1];
        let mut blocks = blocks;
        for block in &mut blocks {
            if block.is_empty() {
                return Err(PartitionError::InvalidBlocks("empty block".into()));
            }
            block.sort_unstable();
            for &e in block.iter() {
                if e == 0 || e > r {
                    return Err(PartitionError::InvalidBlocks(format!("element {e} not in 1..={r}")));
                }
                if std::mem::replace(&mut seen[e], true) {
                    return Err(PartitionError::InvalidBlocks(format!("element {e} repeated")));
                }
            }
        }
        if let Some(missing) = (1..=r).find(|&e| !seen[e]) {
            return Err(PartitionError::InvalidBlocks(format!("element {missing} missing")));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Self { r, blocks })
    }

    /// Builds the partition whose block labels are given by a restricted
    /// growth string (`rgs[i]` is the block of element `i + 1`).
    pub fn from_restricted_growth(rgs: &[usize]) -> Self {
        let nblocks = rgs.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); nblocks];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i + 1);
        }
        Self { r: rgs.len(), blocks }
    }

    /// `1|2|…|r`
    pub fn bottom(r: usize) -> Self {
        Self { r, blocks: (1..=r).map(|e| vec![e]).collect() }
    }

    /// `12…r`
    pub fn top(r: usize) -> Self {
        Self { r, blocks: if r == 0 { vec![] } else { vec![(1..=r).collect()] } }
    }

    pub fn ground_size(&self) -> usize {
        self.r
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().map(Vec::len)
    }

    pub fn signature(&self) -> Signature {
        Signature::from_block_sizes(self.r, self.block_sizes())
    }

    fn block_of(&self) -> Vec<usize> {
        let mut owner = vec![0; self.r + 1];
        for (bi, block) in self.blocks.iter().enumerate() {
            for &e in block {
                owner[e] = bi;
            }
        }
        owner
    }

    /// `self ≼ other`: every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Self) -> Result<bool, PartitionError> {
        if self.r != other.r {
            return Err(PartitionError::MismatchedGroundSets(self.r, other.r));
        }
        let owner = other.block_of();
        Ok(self
            .blocks
            .iter()
            .all(|b| b.iter().all(|&e| owner[e] == owner[b[0]])))
    }

    /// `self ≺ other`
    pub fn strictly_refines(&self, other: &Self) -> Result<bool, PartitionError> {
        Ok(self.refines(other)? && self != other)
    }

    /// Möbius value μ(0̂, π) = Π_i [(-1)^{i-1}(i-1)!]^{s_i(π)}.
    pub fn mobius_coefficient(&self) -> BigInt {
        mobius_coefficient(self)
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.r > 9 { "," } else { "" };
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| b.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep))
            .collect();
        f.write_str(&parts.join("|"))
    }
}

/// Parses `"12|345"`, or `"1,2|3,10"` when elements have several digits.
/// The ground set is `1..=max element`.
impl FromStr for SetPartition {
    type Err = PartitionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || PartitionError::Parse(s.to_string());
        let s = s.trim();
        if s.is_empty() {
            return Err(err());
        }
        let comma = s.contains(',');
        let mut blocks = Vec::new();
        for part in s.split('|') {
            let part = part.trim();
            let block: Vec<usize> = if comma {
                part.split(',')
                    .map(|e| e.trim().parse().map_err(|_| err()))
                    .collect::<Result<_, _>>()?
            } else {
                part.chars()
                    .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(err))
                    .collect::<Result<_, _>>()?
            };
            blocks.push(block);
        }
        let r = blocks.iter().flatten().copied().max().unwrap_or(0);
        Self::from_blocks(r, blocks)
    }
}

/// Streams the partitions of `[r]` in lexicographic order of their restricted
/// growth strings, starting from `0,0,…,0` (the single block `12…r`).
#[derive(Debug, Clone)]
pub struct Partitions {
    rgs: Vec<usize>,
    // running maximum of rgs[..=i]
    maxes: Vec<usize>,
    done: bool,
}

impl Partitions {
    pub fn new(r: usize) -> Self {
        Self { rgs: vec![0; r], maxes: vec![0; r], done: r == 0 }
    }
}

impl Iterator for Partitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        let out = SetPartition::from_restricted_growth(&self.rgs);
        let r = self.rgs.len();
        // advance: rightmost position (not the first) that can still grow
        let mut i = r;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.rgs[i] <= self.maxes[i - 1] {
                self.rgs[i] += 1;
                self.maxes[i] = self.maxes[i - 1].max(self.rgs[i]);
                for j in (i + 1)..r {
                    self.rgs[j] = 0;
                    self.maxes[j] = self.maxes[i];
                }
                break;
            }
        }
        Some(out)
    }
}

/// All partitions of `[r]` for `1 <= r <= DEFAULT_PARTITION_CAP`.
pub fn enumerate_partitions(r: usize) -> Result<Vec<SetPartition>, PartitionError> {
    enumerate_partitions_capped(r, DEFAULT_PARTITION_CAP)
}

pub fn enumerate_partitions_capped(r: usize, cap: usize) -> Result<Vec<SetPartition>, PartitionError> {
    if r == 0 || r > cap {
        return Err(PartitionError::OutOfRange { r, cap });
    }
    let mut all: Vec<_> = Partitions::new(r).collect();
    all.sort();
    Ok(all)
}

pub fn mobius_coefficient(pi: &SetPartition) -> BigInt {
    pi.block_sizes().fold(BigInt::one(), |acc, size| {
        let v = factorial_u(size as u64 - 1);
        if size % 2 == 0 {
            -acc * v
        } else {
            acc * v
        }
    })
}

/// Block-size counts `(s_1, …, s_r)` of a partition of `[r]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    counts: Vec<usize>,
}

impl Signature {
    /// `counts[i]` is the number of blocks of size `i + 1`.
    pub fn new(counts: Vec<usize>) -> Self {
        let mut counts = counts;
        while counts.last() == Some(&0) {
            counts.pop();
        }
        Self { counts }
    }

    pub fn from_block_sizes(r: usize, sizes: impl IntoIterator<Item = usize>) -> Self {
        let mut counts = vec![0; r];
        for s in sizes {
            counts[s - 1] += 1;
        }
        Self::new(counts)
    }

    /// Blocks of size `i` (1-based).
    pub fn count(&self, size: usize) -> usize {
        size.checked_sub(1).and_then(|i| self.counts.get(i)).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Σ i·s_i
    pub fn weight(&self) -> usize {
        self.counts.iter().enumerate().map(|(i, c)| (i + 1) * c).sum()
    }

    pub fn num_blocks(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Block sizes in non-increasing order.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.num_blocks());
        for (i, &c) in self.counts.iter().enumerate().rev() {
            out.extend(std::iter::repeat_n(i + 1, c));
        }
        out
    }
}

/// Number of set partitions of `[r]` with the given signature,
/// `r! / Π (i!)^{s_i} s_i!`.
pub fn signature_count(r: usize, sig: &Signature) -> Result<BigInt, PartitionError> {
    let weight = sig.weight();
    if weight != r {
        return Err(PartitionError::InconsistentSignature { r, weight });
    }
    let mut denom = BigInt::one();
    for (i, &c) in sig.counts.iter().enumerate() {
        denom *= factorial_u(i as u64 + 1).pow(c as u32) * factorial_u(c as u64);
    }
    Ok(factorial_u(r as u64) / denom)
}

/// Every signature of weight `r` (equivalently, every integer partition of
/// `r`), in a fixed deterministic order.
pub fn signatures(r: usize) -> Vec<Signature> {
    fn rec(remaining: usize, max_part: usize, parts: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining == 0 {
            out.push(parts.clone());
            return;
        }
        for p in (1..=remaining.min(max_part)).rev() {
            parts.push(p);
            rec(remaining - p, p, parts, out);
            parts.pop();
        }
    }
    let mut raw = Vec::new();
    rec(r, r, &mut Vec::new(), &mut raw);
    raw.into_iter()
        .map(|parts| Signature::from_block_sizes(r, parts))
        .collect()
}

/// Signed count Σ over partitions of the given signature of their Möbius
/// coefficient; convenient when only the signature matters.
pub fn mobius_for_signature(sig: &Signature) -> BigInt {
    let mut acc = BigInt::one();
    for (i, &c) in sig.counts.iter().enumerate() {
        let base = factorial_u(i as u64);
        let term = if i % 2 == 1 { -base } else { base };
        acc *= term.pow(c as u32);
    }
    acc
}
