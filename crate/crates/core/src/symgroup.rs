//! Brute-force ground truth in the symmetric group.
//!
//! Points are 0-based internally; `Display` prints 1-based cycle notation.
//! Composition is right to left: `(σ∘τ)(i) = σ(τ(i))`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::content::ContentFunctionSpec;
use crate::partitions::{enumerate_partitions, factorial, Partition};

/// Default cap on estimated elementary steps for the brute-force counters.
pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "CUE_HURWITZ_BUDGET";

/// Largest degree for which [`character_table`] will run.
pub const CHARACTER_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("permutations of degree {0} and {1} cannot be combined")]
    DegreeMismatch(usize, usize),
    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("estimated {estimate} steps exceeds the budget of {budget}")]
    BudgetExceeded { estimate: u128, budget: u128 },
    #[error("character table of S_{d} exceeds the cap {cap}")]
    CapExceeded { d: usize, cap: usize },
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// `images[i]` is the image of point `i`.
    pub fn new(images: Vec<usize>) -> Result<Self, OracleError> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x >= images.len() || seen[x] {
                return Err(OracleError::NotAPermutation(images));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(d: usize) -> Self {
        Permutation {
            images: (0..d).collect(),
        }
    }

    /// The transposition swapping points `a` and `b` (0-based, `a ≠ b`).
    pub fn transposition(d: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..d).collect();
        images.swap(a, b);
        Permutation { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x] = i;
        }
        Permutation { images }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self, OracleError> {
        if self.degree() != other.degree() {
            return Err(OracleError::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(self.compose_unchecked(other))
    }

    fn compose_unchecked(&self, other: &Self) -> Self {
        Permutation {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    /// Cycle lengths as a partition of the degree.
    pub fn cycle_type(&self) -> Partition {
        let mut seen = vec![false; self.degree()];
        let mut lengths = Vec::new();
        for start in 0..self.degree() {
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i];
                len += 1;
            }
            if len > 0 {
                lengths.push(len);
            }
        }
        Partition::from_unsorted(lengths)
    }

    /// Every permutation of `0..d`, in lexicographic order of images.
    pub fn all(d: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..d).collect();
        loop {
            out.push(Permutation {
                images: current.clone(),
            });
            // next lexicographic permutation
            let Some(i) = (1..d).rev().find(|&i| current[i - 1] < current[i]) else {
                break;
            };
            let j = (i..d).rev().find(|&j| current[j] > current[i - 1]).unwrap();
            current.swap(i - 1, j);
            current[i..].reverse();
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.degree()];
        let mut wrote = false;
        for start in 0..self.degree() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            write!(f, "(")?;
            let mut i = start;
            let mut first = true;
            while !seen[i] {
                seen[i] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{}", i + 1)?;
                first = false;
                i = self.images[i];
            }
            write!(f, ")")?;
            wrote = true;
        }
        if !wrote {
            write!(f, "()")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{self}")
    }
}

/// `π1 ∘ π2 ∘ π1⁻¹ ∘ π2⁻¹`.
pub fn commutator(p1: &Permutation, p2: &Permutation) -> Result<Permutation, OracleError> {
    p1.compose(p2)?.compose(&p1.inverse())?.compose(&p2.inverse())
}

/// Union-find over `0..d` with path halving.
#[derive(Debug, Clone)]
struct Orbits {
    parent: Vec<usize>,
}

impl Orbits {
    fn new(d: usize) -> Self {
        Orbits {
            parent: (0..d).collect(),
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    fn absorb(&mut self, p: &Permutation) {
        for (i, &x) in p.images.iter().enumerate() {
            self.union(i, x);
        }
    }

    /// Each point labelled by the smallest point of its orbit.
    fn labels(mut self) -> Vec<u8> {
        (0..self.parent.len()).map(|i| self.find(i) as u8).collect()
    }
}

fn join_is_transitive(a: &[u8], b: &[u8]) -> bool {
    let mut orbits = Orbits::new(a.len());
    for (i, (&x, &y)) in a.iter().zip(b).enumerate() {
        orbits.union(i, x as usize);
        orbits.union(i, y as usize);
    }
    (0..a.len()).all(|i| orbits.find(i) == 0)
}

fn join_labels(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut orbits = Orbits::new(a.len());
    for (i, (&x, &y)) in a.iter().zip(b).enumerate() {
        orbits.union(i, x as usize);
        orbits.union(i, y as usize);
    }
    orbits.labels()
}

/// Whether the group generated by `gens` has a single orbit on `0..d`.
pub fn is_transitive(gens: &[Permutation], d: usize) -> Result<bool, OracleError> {
    if d == 0 {
        return Err(OracleError::ZeroDegree);
    }
    let mut orbits = Orbits::new(d);
    for g in gens {
        if g.degree() != d {
            return Err(OracleError::DegreeMismatch(g.degree(), d));
        }
        orbits.absorb(g);
    }
    Ok((0..d).all(|i| orbits.find(i) == 0))
}

/// Block lengths of a monotone factorization: `e` blocks are strictly
/// monotone chains, `h` blocks weakly monotone.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct MonotonePattern {
    #[serde(rename = "e", default)]
    pub strict_blocks: Vec<usize>,
    #[serde(rename = "h", default)]
    pub weak_blocks: Vec<usize>,
}

impl MonotonePattern {
    pub fn new(strict_blocks: Vec<usize>, weak_blocks: Vec<usize>) -> Self {
        MonotonePattern {
            strict_blocks,
            weak_blocks,
        }
    }

    pub fn total_length(&self) -> usize {
        self.strict_blocks.iter().chain(&self.weak_blocks).sum()
    }

    /// The content function `Π e_{s_i} Π h_{t_j}` matching this pattern.
    pub fn content_spec(&self) -> ContentFunctionSpec {
        ContentFunctionSpec::new(self.strict_blocks.clone(), self.weak_blocks.clone())
    }

    fn blocks(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.strict_blocks
            .iter()
            .map(|&s| (s, true))
            .chain(self.weak_blocks.iter().map(|&t| (t, false)))
    }
}

/// Step budget for the brute-force counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_steps: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_steps: DEFAULT_BUDGET,
        }
    }
}

impl Budget {
    pub fn new(max_steps: u128) -> Self {
        Budget { max_steps }
    }

    /// The default, overridden by `CUE_HURWITZ_BUDGET` when it parses.
    pub fn from_env() -> Self {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(Budget::new)
            .unwrap_or_default()
    }
}

/// Number of monotone chains of the given length on `d` points: the larger
/// elements `k = 1..d-1` (0-based) each admit `k` partners, so this is
/// `e_len` (strict) or `h_len` (weak) of `1, 2, .., d-1`.
fn chain_count(d: usize, len: usize, strict: bool) -> u128 {
    // dp[r] = number of chains of length r using larger elements seen so far
    let mut dp = vec![0u128; len + 1];
    dp[0] = 1;
    for k in 1..d {
        let w = k as u128;
        if strict {
            for r in (1..=len).rev() {
                dp[r] = dp[r].saturating_add(dp[r - 1].saturating_mul(w));
            }
        } else {
            for r in 1..=len {
                dp[r] = dp[r].saturating_add(dp[r - 1].saturating_mul(w));
            }
        }
    }
    dp[len]
}

/// Estimated elementary steps for counting `pattern` on `d` points.
pub fn estimate_steps(d: usize, pattern: &MonotonePattern) -> u128 {
    let fact = (1..=d as u128).fold(1u128, |a, k| a.saturating_mul(k));
    let chains = pattern
        .blocks()
        .fold(1u128, |a, (len, strict)| a.saturating_mul(chain_count(d, len, strict)));
    fact.saturating_mul(fact).saturating_add(chains.saturating_mul(fact))
}

fn check_budget(d: usize, pattern: &MonotonePattern, budget: Budget) -> Result<(), OracleError> {
    if d == 0 {
        return Err(OracleError::ZeroDegree);
    }
    let estimate = estimate_steps(d, pattern);
    if estimate > budget.max_steps {
        return Err(OracleError::BudgetExceeded {
            estimate,
            budget: budget.max_steps,
        });
    }
    Ok(())
}

/// Key for a chain or pair: its product together with the orbit labelling of
/// the group its factors generate.
type Keyed = HashMap<(Permutation, Vec<u8>), u128>;

/// Chains of one block, keyed by product and orbit labelling.
fn block_distribution(d: usize, len: usize, strict: bool) -> Keyed {
    fn descend(
        d: usize,
        remaining: usize,
        min_k: usize,
        strict: bool,
        product: Permutation,
        orbits: Orbits,
        out: &mut Keyed,
    ) {
        if remaining == 0 {
            *out.entry((product, orbits.labels())).or_insert(0) += 1;
            return;
        }
        for k in min_k..d {
            for j in 0..k {
                let tau = Permutation::transposition(d, j, k);
                let mut next_orbits = orbits.clone();
                next_orbits.union(j, k);
                let next_min = if strict { k + 1 } else { k };
                descend(
                    d,
                    remaining - 1,
                    next_min,
                    strict,
                    product.compose_unchecked(&tau),
                    next_orbits,
                    out,
                );
            }
        }
    }
    let mut out = Keyed::new();
    descend(d, len, 1, strict, Permutation::identity(d), Orbits::new(d), &mut out);
    out
}

/// Distribution of `τ_1 τ_2 ⋯ τ_r` over all admissible block chains.
fn chain_distribution(d: usize, pattern: &MonotonePattern) -> Keyed {
    let mut acc = Keyed::new();
    acc.insert((Permutation::identity(d), Orbits::new(d).labels()), 1);
    for (len, strict) in pattern.blocks() {
        let block = block_distribution(d, len, strict);
        let mut next = Keyed::new();
        for ((p1, o1), c1) in &acc {
            for ((p2, o2), c2) in &block {
                let key = (p1.compose_unchecked(p2), join_labels(o1, o2));
                *next.entry(key).or_insert(0) += c1 * c2;
            }
        }
        acc = next;
    }
    acc
}

/// Tuples `(π1, π2, chains)` with `[π1, π2] τ_1 ⋯ τ_r = ι`, no transitivity
/// requirement.
pub fn count_monotone_disconnected(d: usize, pattern: &MonotonePattern, budget: Budget) -> Result<BigInt, OracleError> {
    check_budget(d, pattern, budget)?;
    let mut by_product: HashMap<Permutation, u128> = HashMap::new();
    for ((p, _), c) in chain_distribution(d, pattern) {
        *by_product.entry(p).or_insert(0) += c;
    }
    let perms = Permutation::all(d);
    let total: u128 = perms
        .par_iter()
        .map(|p1| {
            let p1_inv = p1.inverse();
            perms
                .iter()
                .map(|p2| {
                    // the chain product must equal [π1, π2]⁻¹ = π2 π1 π2⁻¹ π1⁻¹
                    let needed = p2
                        .compose_unchecked(p1)
                        .compose_unchecked(&p2.inverse())
                        .compose_unchecked(&p1_inv);
                    by_product.get(&needed).copied().unwrap_or(0)
                })
                .sum::<u128>()
        })
        .sum();
    Ok(BigInt::from(total))
}

/// As [`count_monotone_disconnected`], keeping only tuples whose factors
/// `π1, π2, τ_1, .., τ_r` generate a transitive subgroup.
pub fn count_monotone_connected(d: usize, pattern: &MonotonePattern, budget: Budget) -> Result<BigInt, OracleError> {
    check_budget(d, pattern, budget)?;
    let mut by_product: HashMap<Permutation, Vec<(Vec<u8>, u128)>> = HashMap::new();
    for ((p, labels), c) in chain_distribution(d, pattern) {
        by_product.entry(p).or_default().push((labels, c));
    }
    let perms = Permutation::all(d);
    let total: u128 = perms
        .par_iter()
        .map(|p1| {
            let p1_inv = p1.inverse();
            let mut sum = 0u128;
            for p2 in &perms {
                let needed = p2
                    .compose_unchecked(p1)
                    .compose_unchecked(&p2.inverse())
                    .compose_unchecked(&p1_inv);
                let Some(chains) = by_product.get(&needed) else {
                    continue;
                };
                let mut orbits = Orbits::new(d);
                orbits.absorb(p1);
                orbits.absorb(p2);
                let pair_labels = orbits.labels();
                sum += chains
                    .iter()
                    .filter(|(labels, _)| join_is_transitive(&pair_labels, labels))
                    .map(|(_, c)| c)
                    .sum::<u128>();
            }
            sum
        })
        .sum();
    Ok(BigInt::from(total))
}

/// `z_α = Π i^{m_i} m_i!`, the centralizer order of the class `α`.
pub fn centralizer_order(alpha: &Partition) -> BigInt {
    alpha
        .multiplicities()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &m)| BigInt::from(i).pow(m as u32) * factorial(m))
        .product()
}

/// `|C_α| = d! / z_α`.
pub fn class_size(alpha: &Partition) -> BigInt {
    factorial(alpha.size()) / centralizer_order(alpha)
}

/// Irreducible characters of `S_d`, rows and columns both indexed by
/// [`enumerate_partitions`] order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterTable {
    d: usize,
    partitions: Vec<Partition>,
    values: Vec<Vec<i64>>,
}

impl CharacterTable {
    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    fn index(&self, p: &Partition) -> Option<usize> {
        self.partitions.iter().position(|q| q == p)
    }

    /// `χ^λ_α`, or `None` if either partition is not of size `d`.
    pub fn value(&self, lambda: &Partition, alpha: &Partition) -> Option<i64> {
        Some(self.values[self.index(lambda)?][self.index(alpha)?])
    }

    pub fn row(&self, lambda: &Partition) -> Option<&[i64]> {
        self.index(lambda).map(|i| self.values[i].as_slice())
    }
}

/// Murnaghan–Nakayama on beta-sets: removing a rim hook of length `r` moves
/// one bead from `b` to `b - r`, with sign `(-1)^{beads strictly between}`.
fn mn_character(beta: &mut Vec<usize>, alpha: &[usize], memo: &mut HashMap<(Vec<usize>, usize), i64>) -> i64 {
    let Some((&r, rest)) = alpha.split_first() else {
        return 1;
    };
    let key = (beta.clone(), alpha.len());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let mut total = 0i64;
    for idx in 0..beta.len() {
        let b = beta[idx];
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let target = b - r;
        let between = beta.iter().filter(|&&x| x > target && x < b).count();
        beta[idx] = target;
        let sub = mn_character(beta, rest, memo);
        beta[idx] = b;
        total += if between % 2 == 0 { sub } else { -sub };
    }
    memo.insert(key, total);
    total
}

/// Character value `χ^λ_α` by the Murnaghan–Nakayama rule.
pub fn character(lambda: &Partition, alpha: &Partition) -> i64 {
    if lambda.size() != alpha.size() {
        return 0;
    }
    let len = lambda.length();
    let mut beta: Vec<usize> = lambda
        .parts()
        .iter()
        .enumerate()
        .map(|(i, &p)| p + len - 1 - i)
        .collect();
    let mut memo = HashMap::new();
    mn_character(&mut beta, alpha.parts(), &mut memo)
}

pub fn character_table(d: usize) -> Result<CharacterTable, OracleError> {
    if d == 0 {
        return Err(OracleError::ZeroDegree);
    }
    if d > CHARACTER_CAP {
        return Err(OracleError::CapExceeded { d, cap: CHARACTER_CAP });
    }
    let partitions = enumerate_partitions(d, None);
    let values = partitions
        .par_iter()
        .map(|lambda| partitions.iter().map(|alpha| character(lambda, alpha)).collect())
        .collect();
    Ok(CharacterTable { d, partitions, values })
}
