//! Monotone simple Hurwitz numbers with torus target from content sums.
//!
//! The disconnected count for a pattern `(s; t)` on `d` sheets is
//! `d! Σ_{λ ⊢ d} Π e_{s_i}(λ) Π h_{t_j}(λ)`. Connected counts come from the
//! logarithm of the bivariate generating series
//! `1 + E(q, ħ) = Σ_{d, s, t} q^d ħ^{|s|+|t|} u^s (-v)^t H^{d•}(s; t) / d!`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{from_bigint, AlgebraError, BiSeries, ParamPoly, Rational, Series};
use crate::content::{q_bracket_numerators, ContentFunctionSpec, ContentProfile};
use crate::partitions::{enumerate_partitions, factorial};
use crate::symgroup::MonotonePattern;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HurwitzError {
    #[error("genus must be at least 1")]
    ZeroGenus,
    #[error("connected coefficient {0} is not an integer")]
    NonIntegral(String),
    #[error("the series passed as E has a nonzero constant term")]
    NonzeroConstant,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// `d! Σ_{λ ⊢ d} Π e_{s_i}(λ) Π h_{t_j}(λ)`.
pub fn disconnected_count_content(d: usize, pattern: &MonotonePattern) -> BigInt {
    let spec = pattern.content_spec();
    let sum: BigInt = enumerate_partitions(d, None)
        .par_iter()
        .map(|lambda| spec.evaluate(&ContentProfile::new(lambda, spec.max_degree())))
        .sum();
    factorial(d) * sum
}

/// Connected count read off `log(1 + E)`, with `E` built to the size of
/// the pattern.
pub fn connected_count_content(d: usize, pattern: &MonotonePattern) -> Result<BigInt, HurwitzError> {
    let (m, n) = (pattern.strict_blocks.len(), pattern.weak_blocks.len());
    let r = pattern.total_length();
    let one_plus_e = assemble_bivariate_disconnected(d, r, m, n);
    let f = one_plus_e.log()?;
    let exps: Vec<u32> = pattern
        .strict_blocks
        .iter()
        .chain(&pattern.weak_blocks)
        .map(|&x| x as u32)
        .collect();
    let mut c = f.coeff(d, r).coeff(&exps) * from_bigint(factorial(d));
    let weak_total: usize = pattern.weak_blocks.iter().sum();
    if weak_total % 2 == 1 {
        c = -c;
    }
    if !c.is_integer() {
        return Err(HurwitzError::NonIntegral(c.to_string()));
    }
    Ok(c.to_integer())
}

/// All vectors of `parts` nonnegative integers summing to `total`.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn spec_of(s: &[usize], t: &[usize]) -> ContentFunctionSpec {
    let sorted = |xs: &[usize]| {
        let mut v: Vec<usize> = xs.iter().copied().filter(|&x| x > 0).collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    };
    ContentFunctionSpec::new(sorted(s), sorted(t))
}

/// Every `(s; t)` of total length at most `max_total`, together with the
/// distinct content functions they need.
struct PatternIndex {
    specs: Vec<ContentFunctionSpec>,
    /// `(total, exponent vector s ++ t, index into specs, |t|)`
    entries: Vec<(usize, Vec<u32>, usize, usize)>,
}

impl PatternIndex {
    fn new(max_total: usize, m: usize, n: usize, only_total: Option<usize>) -> Self {
        let mut lookup: HashMap<ContentFunctionSpec, usize> = HashMap::new();
        let mut specs = Vec::new();
        let mut entries = Vec::new();
        for total in 0..=max_total {
            if only_total.is_some_and(|t| t != total) {
                continue;
            }
            for comp in compositions(total, m + n) {
                let (s, t) = comp.split_at(m);
                let spec = spec_of(s, t);
                let idx = *lookup.entry(spec.clone()).or_insert_with(|| {
                    specs.push(spec);
                    specs.len() - 1
                });
                let exps = comp.iter().map(|&x| x as u32).collect();
                entries.push((total, exps, idx, t.iter().sum()));
            }
        }
        PatternIndex { specs, entries }
    }
}

/// Parameter polynomial `Σ_{(s;t)} u^s (-v)^t · H^{d•}(s; t)` over
/// `|s| + |t| = 2g - 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenusCoefficient {
    pub d: usize,
    pub g: usize,
    pub poly: ParamPoly,
}

#[derive(Serialize)]
struct GenusCoefficientJson {
    d: usize,
    g: usize,
    poly: serde_json::Value,
}

impl GenusCoefficient {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GenusCoefficientJson {
            d: self.d,
            g: self.g,
            poly: self.poly.to_json(),
        })
        .expect("plain data serializes")
    }
}

pub fn disconnected_genus_poly(d: usize, g: usize, m: usize, n: usize) -> Result<GenusCoefficient, HurwitzError> {
    if g == 0 {
        return Err(HurwitzError::ZeroGenus);
    }
    let r = 2 * g - 2;
    let index = PatternIndex::new(r, m, n, Some(r));
    let max_degree = index
        .specs
        .iter()
        .map(ContentFunctionSpec::max_degree)
        .max()
        .unwrap_or(0);
    let sums: Vec<BigInt> = enumerate_partitions(d, None)
        .par_iter()
        .map(|lambda| {
            let profile = ContentProfile::new(lambda, max_degree);
            index.specs.iter().map(|s| s.evaluate(&profile)).collect::<Vec<_>>()
        })
        .reduce(
            || vec![BigInt::zero(); index.specs.len()],
            |a, b| a.into_iter().zip(b).map(|(x, y)| x + y).collect(),
        );
    let fact = factorial(d);
    let mut poly = ParamPoly::zero(m, n);
    for (_, exps, idx, weak) in &index.entries {
        let mut c = from_bigint(&fact * &sums[*idx]);
        if weak % 2 == 1 {
            c = -c;
        }
        poly = poly.checked_add(&ParamPoly::monomial(m, n, exps.clone(), c))?;
    }
    Ok(GenusCoefficient { d, g, poly })
}

/// `1 + E(q, ħ)` truncated at `q^q_order ħ^h_order`.
///
/// The coefficient of `q^d ħ^r` is `Σ_{λ ⊢ d} Σ_{|s|+|t|=r} u^s (-v)^t Π e_{s_i}(λ) Π h_{t_j}(λ)`;
/// the empty diagram supplies the constant 1.
pub fn assemble_bivariate_disconnected(q_order: usize, h_order: usize, m: usize, n: usize) -> BiSeries {
    let index = PatternIndex::new(h_order, m, n, None);
    let numerators = q_bracket_numerators(&index.specs, q_order);
    let mut out = BiSeries::zero(q_order, h_order, m, n);
    for d in 0..=q_order {
        let mut layer: Vec<ParamPoly> = vec![ParamPoly::zero(m, n); h_order + 1];
        for (total, exps, idx, weak) in &index.entries {
            let mut c: Rational = numerators[*idx].coeff(d).clone();
            if c.is_zero() {
                continue;
            }
            if weak % 2 == 1 {
                c = -c;
            }
            layer[*total] = layer[*total]
                .checked_add(&ParamPoly::monomial(m, n, exps.clone(), c))
                .expect("same signature");
        }
        for (r, p) in layer.into_iter().enumerate() {
            out.set_coeff(d, r, p);
        }
    }
    out
}

/// `log(1 + E)` for a series `E` with zero constant term.
pub fn connected_from_disconnected(e: &BiSeries) -> Result<BiSeries, HurwitzError> {
    if !e.coeff(0, 0).as_constant().is_some_and(|c| c.is_zero()) {
        return Err(HurwitzError::NonzeroConstant);
    }
    let (m, n) = e.signature();
    let one = BiSeries::one(e.q_order(), e.h_order(), m, n);
    Ok(one.checked_add(e)?.log()?)
}

/// `E_g(q)` (disconnected) or `F_g(q)` (connected): the `ħ^{2g-2}` layer.
///
/// `E_1` includes the constant term 1, so `φ(q) E_1(q) = 1`.
pub fn genus_generating_function(
    g: usize,
    connected: bool,
    q_order: usize,
    m: usize,
    n: usize,
) -> Result<Series<ParamPoly>, HurwitzError> {
    if g == 0 {
        return Err(HurwitzError::ZeroGenus);
    }
    let r = 2 * g - 2;
    let one_plus_e = assemble_bivariate_disconnected(q_order, r, m, n);
    let series = if connected { one_plus_e.log()? } else { one_plus_e };
    Ok(series.h_layer(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat, Coeff, QSeries};
    use crate::quasimodular::{divisor_sigma, euler_phi};

    fn pat(e: &[usize], h: &[usize]) -> MonotonePattern {
        MonotonePattern::new(e.to_vec(), h.to_vec())
    }

    #[test]
    fn content_count_examples() {
        assert_eq!(disconnected_count_content(2, &pat(&[], &[2])), BigInt::from(4));
        assert_eq!(disconnected_count_content(3, &pat(&[], &[])), BigInt::from(18));
        for d in 1..=8 {
            assert!(disconnected_count_content(d, &pat(&[1], &[])).is_zero());
        }
        assert_eq!(connected_count_content(2, &pat(&[], &[2])).unwrap(), BigInt::from(4));
        assert_eq!(connected_count_content(2, &pat(&[], &[])).unwrap(), BigInt::from(3));
        assert_eq!(connected_count_content(1, &pat(&[], &[])).unwrap(), BigInt::from(1));
    }

    #[test]
    fn compositions_enumerate() {
        assert_eq!(compositions(2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(compositions(0, 0), vec![Vec::<usize>::new()]);
        assert!(compositions(1, 0).is_empty());
        assert_eq!(compositions(4, 3).len(), 15);
    }

    #[test]
    fn genus_poly_examples() {
        for (m, n) in [(0, 0), (1, 0), (0, 2), (1, 1)] {
            for d in 1..=5 {
                let g1 = disconnected_genus_poly(d, 1, m, n).unwrap();
                let expected = factorial(d) * BigInt::from(enumerate_partitions(d, None).len());
                assert_eq!(g1.poly, ParamPoly::constant(m, n, from_bigint(expected)));
            }
        }
        let v2 = disconnected_genus_poly(2, 2, 0, 1).unwrap().poly;
        assert_eq!(v2, ParamPoly::monomial(0, 1, vec![2], int(4)));
        assert!(disconnected_genus_poly(2, 2, 1, 0).unwrap().poly.is_zero_elem());
        assert!(disconnected_genus_poly(3, 2, 0, 0).unwrap().poly.is_zero_elem());
        assert_eq!(disconnected_genus_poly(2, 0, 0, 1), Err(HurwitzError::ZeroGenus));
    }

    #[test]
    fn genus_poly_json() {
        let c = disconnected_genus_poly(2, 2, 0, 1).unwrap();
        assert_eq!(
            serde_json::to_string(&c.to_json()).unwrap(),
            r#"{"d":2,"g":2,"poly":{"m":0,"n":1,"terms":[{"coeff":"4","exp":[2]}]}}"#
        );
    }

    #[test]
    fn bivariate_examples() {
        let e = assemble_bivariate_disconnected(6, 3, 0, 1);
        for d in 0..=6 {
            let p = enumerate_partitions(d, None).len() as i64;
            assert_eq!(e.coeff(d, 0).as_constant(), Some(int(p)));
            assert!(e.coeff(d, 1).is_zero_elem());
            assert!(e.coeff(d, 3).is_zero_elem());
        }
        assert_eq!(*e.coeff(2, 2), ParamPoly::monomial(0, 1, vec![2], int(2)));
    }

    #[test]
    fn bivariate_layers_match_genus_polys() {
        let (m, n) = (1, 1);
        let e = assemble_bivariate_disconnected(5, 4, m, n);
        for d in 1..=5 {
            for g in 1..=3 {
                let expected = disconnected_genus_poly(d, g, m, n).unwrap().poly;
                let got = e.coeff(d, 2 * g - 2).scaled(&from_bigint(factorial(d)));
                assert_eq!(got, expected, "d = {d}, g = {g}");
            }
        }
    }

    #[test]
    fn genus_one_closed_forms() {
        let order = 12;
        let e1 = genus_generating_function(1, false, order, 0, 1)
            .unwrap()
            .evaluate_params(&[], &[int(1)]);
        assert!(euler_phi(order).checked_mul(&e1).unwrap().is_one_series());
        let f1 = genus_generating_function(1, true, order, 0, 1)
            .unwrap()
            .evaluate_params(&[], &[int(1)]);
        let minus_log_phi = euler_phi(order).log().unwrap().scale(&int(-1));
        assert_eq!(f1, minus_log_phi);
        for d in 1..=order {
            assert_eq!(*f1.coeff(d), from_bigint(divisor_sigma(1, d)) / int(d as i64));
        }
        assert_eq!(*f1.coeff(4), rat(7, 4));
        assert_eq!(*e1.coeff(4), int(5));
    }

    #[test]
    fn connected_layer_at_d2() {
        let e = assemble_bivariate_disconnected(3, 2, 0, 1);
        let minus_one = e.checked_sub(&BiSeries::one(3, 2, 0, 1)).unwrap();
        let f = connected_from_disconnected(&minus_one).unwrap();
        assert_eq!(*f.coeff(2, 2), ParamPoly::monomial(0, 1, vec![2], int(2)));
        assert!(connected_from_disconnected(&e).is_err());
        let empty = BiSeries::zero(3, 2, 0, 1);
        assert!(connected_from_disconnected(&empty).unwrap().is_zero());
    }

    #[test]
    fn genus_two_commutator_series() {
        let e2 = genus_generating_function(2, false, 6, 0, 1)
            .unwrap()
            .evaluate_params(&[], &[int(1)]);
        assert_eq!(*e2.coeff(2), int(2));
        let f2 = genus_generating_function(2, true, 6, 0, 1).unwrap();
        assert_eq!(*f2.coeff(2), ParamPoly::monomial(0, 1, vec![2], int(2)));
        // F_2 = E_2 / E_1 at the level of series in q
        let e1 = genus_generating_function(1, false, 6, 0, 1)
            .unwrap()
            .evaluate_params(&[], &[int(1)]);
        let ratio: QSeries = e2.checked_mul(&e1.inverse().unwrap()).unwrap();
        assert_eq!(f2.evaluate_params(&[], &[int(1)]), ratio);
    }
}
