//! Symmetric functions evaluated on content multisets.
//!
//! `e_r(λ)` and `h_r(λ)` are the elementary and complete symmetric polynomials
//! of the contents of `λ`. They are obtained from the content power sums by
//! Newton's identities, once per diagram.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{from_bigint, int, QSeries, Rational};
use crate::partitions::{enumerate_partitions, Partition};
use crate::quasimodular::euler_phi;

/// `f = Π e_{s_i} · Π h_{t_j}` evaluated on contents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ContentFunctionSpec {
    #[serde(rename = "e", default)]
    pub e_degrees: Vec<usize>,
    #[serde(rename = "h", default)]
    pub h_degrees: Vec<usize>,
}

impl ContentFunctionSpec {
    pub fn new(e_degrees: Vec<usize>, h_degrees: Vec<usize>) -> Self {
        ContentFunctionSpec { e_degrees, h_degrees }
    }

    pub fn total_degree(&self) -> usize {
        self.e_degrees.iter().sum::<usize>() + self.h_degrees.iter().sum::<usize>()
    }

    pub fn max_degree(&self) -> usize {
        self.e_degrees.iter().chain(&self.h_degrees).copied().max().unwrap_or(0)
    }

    pub fn evaluate(&self, profile: &ContentProfile) -> BigInt {
        let mut acc = BigInt::one();
        for &s in &self.e_degrees {
            acc *= profile.e(s);
        }
        for &t in &self.h_degrees {
            acc *= profile.h(t);
        }
        acc
    }

    /// Every spec with positive block degrees summing to `total`, one per
    /// pair of multisets (e-degrees, h-degrees), each listed in decreasing order.
    pub fn all_of_total_degree(total: usize) -> Vec<ContentFunctionSpec> {
        let mut out = Vec::new();
        for e_total in 0..=total {
            for e in enumerate_partitions(e_total, None) {
                for h in enumerate_partitions(total - e_total, None) {
                    out.push(ContentFunctionSpec::new(e.parts().to_vec(), h.parts().to_vec()));
                }
            }
        }
        out
    }
}

/// `e_0..e_R` and `h_0..h_R` of one content multiset.
#[derive(Debug, Clone)]
pub struct ContentProfile {
    size: usize,
    elementary: Vec<BigInt>,
    complete: Vec<BigInt>,
}

impl ContentProfile {
    pub fn new(lambda: &Partition, max_degree: usize) -> Self {
        Self::from_contents(&lambda.contents(), max_degree)
    }

    pub fn from_contents(contents: &[i64], max_degree: usize) -> Self {
        let power_sums: Vec<BigInt> = (0..=max_degree)
            .map(|k| contents.iter().map(|&c| BigInt::from(c).pow(k as u32)).sum())
            .collect();
        let mut elementary = vec![BigInt::one()];
        let mut complete = vec![BigInt::one()];
        for k in 1..=max_degree {
            // k e_k = Σ (-1)^{i-1} e_{k-i} p_i,  k h_k = Σ h_{k-i} p_i
            let mut e_acc = BigInt::zero();
            let mut h_acc = BigInt::zero();
            for i in 1..=k {
                let term = &elementary[k - i] * &power_sums[i];
                if i % 2 == 1 {
                    e_acc += term;
                } else {
                    e_acc -= term;
                }
                h_acc += &complete[k - i] * &power_sums[i];
            }
            elementary.push(e_acc / k);
            complete.push(h_acc / k);
        }
        ContentProfile {
            size: contents.len(),
            elementary,
            complete,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn max_degree(&self) -> usize {
        self.elementary.len() - 1
    }

    pub fn e(&self, r: usize) -> &BigInt {
        &self.elementary[r]
    }

    pub fn h(&self, r: usize) -> &BigInt {
        &self.complete[r]
    }
}

pub fn elementary_on_contents(lambda: &Partition, r: usize) -> BigInt {
    ContentProfile::new(lambda, r).e(r).clone()
}

pub fn complete_on_contents(lambda: &Partition, r: usize) -> BigInt {
    ContentProfile::new(lambda, r).h(r).clone()
}

/// `(x)_λ = Π (x + c(□))`.
pub fn content_pochhammer(lambda: &Partition, x: &Rational) -> Rational {
    lambda.contents().into_iter().map(|c| x + int(c)).product()
}

/// `[x]_λ = Π (1 + x c(□))`.
pub fn renormalized_content_polynomial(lambda: &Partition, x: &Rational) -> Rational {
    lambda
        .contents()
        .into_iter()
        .map(|c| Rational::one() + x * int(c))
        .product()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContentSide {
    /// `[ħ]_λ = Σ ħ^r e_r(λ)`.
    Elementary,
    /// `1/[ħ]_λ = Σ (-ħ)^r h_r(λ)`.
    Complete,
}

/// `[ħ]_λ` or its reciprocal as a series in `ħ` truncated at `ħ^order`.
///
/// The complete side stores the signed coefficients `(-1)^r h_r(λ)`.
pub fn renormalized_content_series(lambda: &Partition, side: ContentSide, order: usize) -> QSeries {
    let profile = ContentProfile::new(lambda, order);
    let coeffs = (0..=order)
        .map(|r| match side {
            ContentSide::Elementary => from_bigint(profile.e(r).clone()),
            ContentSide::Complete => {
                let h = from_bigint(profile.h(r).clone());
                if r % 2 == 0 {
                    h
                } else {
                    -h
                }
            }
        })
        .collect();
    QSeries::from_rationals(coeffs)
}

/// `Σ_{|λ| ≤ D} q^{|λ|} f(λ)`, the numerator of the q-bracket.
///
/// The empty diagram contributes `f` evaluated on the empty content multiset,
/// which is 1 when every block has degree 0 and 0 otherwise.
pub fn q_bracket_numerator(spec: &ContentFunctionSpec, order: usize) -> QSeries {
    q_bracket_numerators(std::slice::from_ref(spec), order)
        .pop()
        .expect("one spec in, one series out")
}

/// Numerators for several specs sharing one pass over the partitions.
pub fn q_bracket_numerators(specs: &[ContentFunctionSpec], order: usize) -> Vec<QSeries> {
    let max_degree = specs.iter().map(ContentFunctionSpec::max_degree).max().unwrap_or(0);
    let per_size: Vec<Vec<BigInt>> = (0..=order)
        .into_par_iter()
        .map(|d| {
            let mut sums = vec![BigInt::zero(); specs.len()];
            for lambda in enumerate_partitions(d, None) {
                let profile = ContentProfile::new(&lambda, max_degree);
                for (acc, spec) in sums.iter_mut().zip(specs) {
                    *acc += spec.evaluate(&profile);
                }
            }
            sums
        })
        .collect();
    (0..specs.len())
        .map(|i| QSeries::from_rationals(per_size.iter().map(|sums| from_bigint(sums[i].clone())).collect()))
        .collect()
}

/// The Bloch–Okounkov q-bracket `⟨f⟩_q = φ(q) Σ_λ q^{|λ|} f(λ)`, truncated at `q^order`.
pub fn q_bracket(spec: &ContentFunctionSpec, order: usize) -> QSeries {
    euler_phi(order)
        .checked_mul(&q_bracket_numerator(spec, order))
        .expect("same order")
}

/// [`q_bracket`] for several specs at once.
pub fn q_brackets(specs: &[ContentFunctionSpec], order: usize) -> Vec<QSeries> {
    let phi = euler_phi(order);
    q_bracket_numerators(specs, order)
        .into_iter()
        .map(|s| phi.checked_mul(&s).expect("same order"))
        .collect()
}
