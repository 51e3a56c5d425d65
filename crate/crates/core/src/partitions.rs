//! Young diagrams: enumeration, contents, conjugation and hook-length dimensions.
//!
//! Cell `(i, j)` (1-based row and column) has content `j - i`. The empty
//! diagram has size 0 and an empty content multiset.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("parts must be weakly decreasing and positive: {0:?}")]
    NotAPartition(Vec<usize>),
    #[error("the empty diagram has no hook-length dimension")]
    EmptyDiagram,
}

/// A weakly decreasing sequence of positive integers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self, PartitionError> {
        let ordered = parts.windows(2).all(|w| w[0] >= w[1]);
        if !ordered || parts.contains(&0) {
            return Err(PartitionError::NotAPartition(parts));
        }
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// Sorts and drops zeros, so any multiset of part sizes is accepted.
    pub fn from_unsorted(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of cells.
    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of rows, `ℓ(λ)`.
    pub fn length(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn conjugate(&self) -> Partition {
        let width = self.parts.first().copied().unwrap_or(0);
        let parts = (1..=width)
            .map(|j| self.parts.iter().filter(|&&p| p >= j).count())
            .collect();
        Partition { parts }
    }

    /// Cells as 1-based `(row, column)` pairs in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, &len)| (1..=len).map(move |j| (i + 1, j)))
    }

    /// Content multiset `{column - row}` listed in row-major order.
    pub fn contents(&self) -> Vec<i64> {
        self.cells().map(|(i, j)| j as i64 - i as i64).collect()
    }

    pub fn hook_lengths(&self) -> Vec<usize> {
        let conj = self.conjugate();
        self.cells()
            .map(|(i, j)| self.parts[i - 1] - j + conj.parts[j - 1] - i + 1)
            .collect()
    }

    /// `dim V^λ = d! / Π hooks`.
    pub fn hook_dimension(&self) -> Result<BigInt, PartitionError> {
        if self.is_empty() {
            return Err(PartitionError::EmptyDiagram);
        }
        let hooks: BigInt = self.hook_lengths().iter().map(|&h| BigInt::from(h)).product();
        Ok(factorial(self.size()) / hooks)
    }

    /// Multiplicities `m_i` of each part size `i`, indexed from 1.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut m = vec![0; self.parts.first().copied().unwrap_or(0) + 1];
        for &p in &self.parts {
            m[p] += 1;
        }
        m
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = PartitionError;

    fn try_from(parts: Vec<usize>) -> Result<Self, Self::Error> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "ε");
        }
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition{self}")
    }
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// All partitions of `d` with at most `max_rows` parts, in lexicographically
/// descending order: `(4), (3,1), (2,2), (2,1,1), (1,1,1,1)`.
///
/// `d = 0` yields the single empty diagram.
pub fn enumerate_partitions(d: usize, max_rows: Option<usize>) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    let rows = max_rows.unwrap_or(usize::MAX);
    fill(d, d, rows, &mut current, &mut out);
    out
}

fn fill(remaining: usize, max_part: usize, rows_left: usize, current: &mut Vec<usize>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition { parts: current.clone() });
        return;
    }
    if rows_left == 0 {
        return;
    }
    for part in (1..=max_part.min(remaining)).rev() {
        // the remaining rows must be able to hold what is left
        if part.saturating_mul(rows_left) < remaining {
            break;
        }
        current.push(part);
        fill(remaining - part, part, rows_left - 1, current, out);
        current.pop();
    }
}

/// Partitions of every size `0..=max_size`, grouped by size.
pub fn partitions_up_to(max_size: usize) -> Vec<Vec<Partition>> {
    (0..=max_size).map(|d| enumerate_partitions(d, None)).collect()
}
