//! Eisenstein series, the Euler function, and exact fitting of q-series as
//! polynomials in `E2, E4, E6`.
//!
//! A fit solves for the coefficients of every monomial `E2^a E4^b E6^c` with
//! `2a + 4b + 6c ≤ W` from an initial window of q-coefficients, then checks the
//! prediction against every remaining coefficient of the input.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    format_rational, from_bigint, parse_rational, solve_linear_exact, AlgebraError, LinearSolution, ParamPoly, QSeries,
    Rational, Series,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FitError {
    #[error("not quasimodular at weight cap {weight_cap}: first mismatch at q^{first_mismatch}")]
    NotQuasimodularAtCap { weight_cap: u32, first_mismatch: usize },
    #[error("series of order {order} is too short for {needed} coefficients")]
    InsufficientCoefficients { order: usize, needed: usize },
    #[error("fit at weight cap {weight_cap} stays underdetermined with {free_variables} free coefficients")]
    Underdetermined { weight_cap: u32, free_variables: usize },
    #[error("weight cap must be even, got {0}")]
    OddWeight(u32),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Eisenstein {
    E2,
    E4,
    E6,
}

impl Eisenstein {
    /// `E_{2k}` for `k = 1, 2, 3`.
    pub fn from_index(k: u32) -> Option<Self> {
        match k {
            1 => Some(Eisenstein::E2),
            2 => Some(Eisenstein::E4),
            3 => Some(Eisenstein::E6),
            _ => None,
        }
    }

    fn normalization(self) -> i64 {
        match self {
            Eisenstein::E2 => -24,
            Eisenstein::E4 => 240,
            Eisenstein::E6 => -504,
        }
    }

    fn divisor_power(self) -> u32 {
        match self {
            Eisenstein::E2 => 1,
            Eisenstein::E4 => 3,
            Eisenstein::E6 => 5,
        }
    }
}

/// `σ_k(n) = Σ_{d | n} d^k`.
pub fn divisor_sigma(k: u32, n: usize) -> BigInt {
    (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .map(|d| BigInt::from(d).pow(k))
        .sum()
}

/// `E_{2k}(q) = 1 + c_k Σ σ_{2k-1}(n) q^n` with `c = -24, 240, -504`.
pub fn eisenstein(which: Eisenstein, order: usize) -> QSeries {
    let c = BigInt::from(which.normalization());
    let mut coeffs = vec![Rational::from_integer(BigInt::from(1))];
    for n in 1..=order {
        coeffs.push(from_bigint(&c * divisor_sigma(which.divisor_power(), n)));
    }
    QSeries::from_rationals(coeffs)
}

/// `φ(q) = Π_{n ≥ 1} (1 - q^n)`.
pub fn euler_phi(order: usize) -> QSeries {
    let mut coeffs = vec![BigInt::zero(); order + 1];
    coeffs[0] = BigInt::from(1);
    for n in 1..=order {
        for k in (n..=order).rev() {
            let shifted = coeffs[k - n].clone();
            coeffs[k] -= shifted;
        }
    }
    QSeries::from_rationals(coeffs.into_iter().map(from_bigint).collect())
}

/// Exponent triple `(a, b, c)` of `E2^a E4^b E6^c`.
pub type Monomial = (u32, u32, u32);

pub fn monomial_weight(&(a, b, c): &Monomial) -> u32 {
    2 * a + 4 * b + 6 * c
}

/// Monomials of weight at most `weight_cap`, ordered by weight then by `(c, b)`.
pub fn basis_monomials(weight_cap: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for w in (0..=weight_cap).step_by(2) {
        for c in 0..=w / 6 {
            for b in 0..=(w - 6 * c) / 4 {
                let rest = w - 6 * c - 4 * b;
                out.push((rest / 2, b, c));
            }
        }
    }
    out
}

pub fn basis_dimension(weight_cap: u32) -> usize {
    basis_monomials(weight_cap).len()
}

fn power(base: &QSeries, exponent: u32) -> QSeries {
    let mut acc = QSeries::ones(base.order());
    for _ in 0..exponent {
        acc = acc.checked_mul(base).expect("same order");
    }
    acc
}

struct BasisCache {
    e2: Vec<QSeries>,
    e4: Vec<QSeries>,
    e6: Vec<QSeries>,
}

impl BasisCache {
    fn new(weight_cap: u32, order: usize) -> Self {
        let powers = |which: Eisenstein, max: u32| -> Vec<QSeries> {
            let base = eisenstein(which, order);
            (0..=max).map(|k| power(&base, k)).collect()
        };
        BasisCache {
            e2: powers(Eisenstein::E2, weight_cap / 2),
            e4: powers(Eisenstein::E4, weight_cap / 4),
            e6: powers(Eisenstein::E6, weight_cap / 6),
        }
    }

    fn expand(&self, &(a, b, c): &Monomial) -> QSeries {
        self.e2[a as usize]
            .checked_mul(&self.e4[b as usize])
            .and_then(|s| s.checked_mul(&self.e6[c as usize]))
            .expect("same order")
    }
}

/// Every monomial of weight at most `weight_cap`, expanded to `q^order`.
pub fn quasimodular_basis(weight_cap: u32, order: usize) -> Result<Vec<(Monomial, QSeries)>, FitError> {
    if !weight_cap.is_multiple_of(2) {
        return Err(FitError::OddWeight(weight_cap));
    }
    let cache = BasisCache::new(weight_cap, order);
    Ok(basis_monomials(weight_cap)
        .into_iter()
        .map(|m| {
            let s = cache.expand(&m);
            (m, s)
        })
        .collect())
}

/// Polynomial in `E2, E4, E6` with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QuasimodularForm {
    terms: BTreeMap<Monomial, Rational>,
}

impl QuasimodularForm {
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut out = QuasimodularForm::default();
        for (m, c) in terms {
            if c.is_zero() {
                continue;
            }
            let slot = out.terms.entry(m).or_insert_with(Rational::zero);
            *slot += c;
            if slot.is_zero() {
                out.terms.remove(&m);
            }
        }
        out
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    /// Largest weight among the stored monomials.
    pub fn weight_cap(&self) -> u32 {
        self.terms.keys().map(monomial_weight).max().unwrap_or(0)
    }

    /// Weights that actually occur, for reporting mixed-weight forms.
    pub fn weights(&self) -> BTreeSet<u32> {
        self.terms.keys().map(monomial_weight).collect()
    }

    pub fn expand(&self, order: usize) -> QSeries {
        let cache = BasisCache::new(self.weight_cap(), order);
        let mut acc = QSeries::zeros(order);
        for (m, c) in &self.terms {
            acc = acc.checked_add(&cache.expand(m).scale(c)).expect("same order");
        }
        acc
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(QuasimodularFormJson::from(self)).expect("plain data serializes")
    }

    pub fn from_json(json: QuasimodularFormJson) -> Result<Self, AlgebraError> {
        let mut terms = Vec::new();
        for t in json.terms {
            terms.push(((t.e2, t.e4, t.e6), parse_rational(&t.coeff)?));
        }
        Ok(Self::from_terms(terms))
    }
}

/// JSON form `{"terms": [{"e2": a, "e4": b, "e6": c, "coeff": "p/q"}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasimodularFormJson {
    pub terms: Vec<FormTermJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormTermJson {
    pub e2: u32,
    pub e4: u32,
    pub e6: u32,
    pub coeff: String,
}

impl From<&QuasimodularForm> for QuasimodularFormJson {
    fn from(f: &QuasimodularForm) -> Self {
        QuasimodularFormJson {
            terms: f
                .terms
                .iter()
                .map(|(&(e2, e4, e6), c)| FormTermJson {
                    e2,
                    e4,
                    e6,
                    coeff: format_rational(c),
                })
                .collect(),
        }
    }
}

/// Successful fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub form: QuasimodularForm,
    /// The weight cap of the basis that was solved against.
    pub weight_cap: u32,
    /// Number of leading coefficients used to solve for the form.
    pub fit_coefficients: usize,
    /// Number of coefficients past the fitting window that were checked exactly.
    pub validated_coefficients: usize,
}

fn first_inconsistent_row(basis: &[(Monomial, QSeries)], target: &QSeries, rows: usize) -> usize {
    let build = |k: usize| -> (Vec<Vec<Rational>>, Vec<Rational>) {
        let a = (0..k)
            .map(|i| basis.iter().map(|(_, s)| s.coeff(i).clone()).collect())
            .collect();
        let b = (0..k).map(|i| target.coeff(i).clone()).collect();
        (a, b)
    };
    // inconsistency is monotone in the number of rows
    let (mut lo, mut hi) = (0usize, rows);
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        let (a, b) = build(mid);
        match solve_linear_exact(&a, &b) {
            Ok(LinearSolution::Inconsistent) => hi = mid,
            _ => lo = mid,
        }
    }
    hi - 1
}

/// Fit `series` against all monomials of weight at most `weight_cap`.
///
/// Coefficients `q^0..q^{n_fit-1}` determine the form; the next `n_validate`
/// must then match exactly, and so must every later coefficient the series
/// carries. An underdetermined window is widened one coefficient at a time
/// while the validation window still fits.
pub fn fit_quasimodular(
    series: &QSeries,
    weight_cap: u32,
    n_fit: usize,
    n_validate: usize,
) -> Result<FitReport, FitError> {
    let available = series.order() + 1;
    if n_fit + n_validate > available {
        return Err(FitError::InsufficientCoefficients {
            order: series.order(),
            needed: n_fit + n_validate,
        });
    }
    let basis = quasimodular_basis(weight_cap, series.order())?;
    if basis.len() > n_fit {
        return Err(FitError::InsufficientCoefficients {
            order: series.order(),
            needed: basis.len() + n_validate,
        });
    }

    let mut n_fit = n_fit;
    loop {
        let a: Vec<Vec<Rational>> = (0..n_fit)
            .map(|i| basis.iter().map(|(_, s)| s.coeff(i).clone()).collect())
            .collect();
        let b: Vec<Rational> = (0..n_fit).map(|i| series.coeff(i).clone()).collect();
        match solve_linear_exact(&a, &b)? {
            LinearSolution::Unique(x) => {
                let form = QuasimodularForm::from_terms(basis.iter().map(|(m, _)| *m).zip(x));
                let expanded = form.expand(series.order());
                if let Some(k) = (n_fit..available).find(|&k| expanded.coeff(k) != series.coeff(k)) {
                    return Err(FitError::NotQuasimodularAtCap {
                        weight_cap,
                        first_mismatch: k,
                    });
                }
                return Ok(FitReport {
                    form,
                    weight_cap,
                    fit_coefficients: n_fit,
                    validated_coefficients: available - n_fit,
                });
            }
            LinearSolution::Inconsistent => {
                return Err(FitError::NotQuasimodularAtCap {
                    weight_cap,
                    first_mismatch: first_inconsistent_row(&basis, series, n_fit),
                });
            }
            LinearSolution::Underdetermined { free_variables, .. } => {
                if n_fit + 1 + n_validate > available {
                    return Err(FitError::Underdetermined {
                        weight_cap,
                        free_variables,
                    });
                }
                n_fit += 1;
            }
        }
    }
}

/// Try weight caps `start, start + 2, ...` up to `ceiling`, stopping at the
/// first cap whose fit validates. Caps whose basis no longer leaves room for
/// `n_validate` checks are skipped.
pub fn fit_adaptive(series: &QSeries, start_cap: u32, ceiling: u32, n_validate: usize) -> Result<FitReport, FitError> {
    let start = start_cap + start_cap % 2;
    let available = series.order() + 1;
    let mut last_err = FitError::InsufficientCoefficients {
        order: series.order(),
        needed: basis_dimension(start) + n_validate,
    };
    for cap in (start..=ceiling).step_by(2) {
        let dim = basis_dimension(cap);
        if dim + n_validate > available {
            break;
        }
        match fit_quasimodular(series, cap, dim, n_validate) {
            Ok(report) => return Ok(report),
            Err(e @ (FitError::NotQuasimodularAtCap { .. } | FitError::Underdetermined { .. })) => {
                last_err = e;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err)
}

/// Fit each monomial coefficient of a parameter-valued series separately.
pub fn fit_param_series(
    series: &Series<ParamPoly>,
    start_cap: u32,
    ceiling: u32,
    n_validate: usize,
) -> Vec<(Vec<u32>, Result<FitReport, FitError>)> {
    let monomials: BTreeSet<Vec<u32>> = series
        .coeffs()
        .iter()
        .flat_map(|p| p.terms().map(|(e, _)| e.clone()))
        .collect();
    monomials
        .into_iter()
        .map(|e| {
            let component = series.map(|p| p.coeff(&e));
            let result = fit_adaptive(&component, start_cap, ceiling, n_validate);
            (e, result)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat};

    #[test]
    fn eisenstein_leading_coefficients() {
        assert_eq!(*eisenstein(Eisenstein::E2, 3).coeff(1), int(-24));
        assert_eq!(*eisenstein(Eisenstein::E4, 3).coeff(1), int(240));
        assert_eq!(*eisenstein(Eisenstein::E6, 3).coeff(2), int(-16632));
        assert_eq!(*eisenstein(Eisenstein::E2, 3).coeff(0), int(1));
    }

    #[test]
    fn eisenstein_matches_lambert_series() {
        // Σ n^k q^n / (1 - q^n) expanded term by term
        let order = 20;
        for (which, k, c) in [
            (Eisenstein::E2, 1u32, -24i64),
            (Eisenstein::E4, 3, 240),
            (Eisenstein::E6, 5, -504),
        ] {
            let mut coeffs = vec![BigInt::zero(); order + 1];
            coeffs[0] = BigInt::from(1);
            for n in 1..=order {
                let nk = BigInt::from(n).pow(k) * c;
                let mut m = n;
                while m <= order {
                    coeffs[m] += &nk;
                    m += n;
                }
            }
            let expected = QSeries::from_rationals(coeffs.into_iter().map(from_bigint).collect());
            assert_eq!(eisenstein(which, order), expected);
        }
    }

    #[test]
    fn e4_squared_is_e8() {
        // the weight-8 space is one dimensional: E4^2 = 1 + 480 Σ σ_7(n) q^n
        let order = 15;
        let e4 = eisenstein(Eisenstein::E4, order);
        let sq = e4.checked_mul(&e4).unwrap();
        for n in 1..=order {
            assert_eq!(*sq.coeff(n), from_bigint(divisor_sigma(7, n) * 480));
        }
    }

    #[test]
    fn euler_phi_examples() {
        let phi = euler_phi(30);
        assert_eq!(*phi.coeff(0), int(1));
        assert_eq!(*phi.coeff(1), int(-1));
        // pentagonal number theorem
        for (k, c) in phi.coeffs().iter().enumerate() {
            let mut expected = 0i64;
            for j in -10i64..=10 {
                if (j * (3 * j - 1) / 2) as usize == k && j * (3 * j - 1) >= 0 {
                    expected += if j % 2 == 0 { 1 } else { -1 };
                }
            }
            assert_eq!(*c, int(expected), "q^{k}");
        }
        let partitions = QSeries::from_rationals(
            (0..=30)
                .map(|d| int(crate::partitions::enumerate_partitions(d, None).len() as i64))
                .collect(),
        );
        assert!(phi.checked_mul(&partitions).unwrap().is_one_series());
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(basis_monomials(0), vec![(0, 0, 0)]);
        assert_eq!(basis_dimension(4), 4);
        assert_eq!(basis_dimension(6), 7);
        assert_eq!(basis_dimension(12), 23);
        let basis = quasimodular_basis(4, 5).unwrap();
        let monos: BTreeSet<Monomial> = basis.iter().map(|(m, _)| *m).collect();
        assert_eq!(
            monos,
            [(0, 0, 0), (1, 0, 0), (2, 0, 0), (0, 1, 0)].into_iter().collect()
        );
        assert!(quasimodular_basis(3, 5).is_err());
    }

    #[test]
    fn fitting_a_basis_element() {
        let e2 = eisenstein(Eisenstein::E2, 30);
        let report = fit_quasimodular(&e2, 2, 2, 15).unwrap();
        assert_eq!(report.form.terms().len(), 1);
        assert_eq!(report.form.terms()[&(1, 0, 0)], int(1));
        assert_eq!(report.validated_coefficients, 29);
    }

    #[test]
    fn fitting_a_constant_at_any_cap() {
        let one = QSeries::ones(30);
        for cap in [0, 2, 4, 6] {
            let report = fit_adaptive(&one, cap, cap, 15).unwrap();
            assert_eq!(report.form, QuasimodularForm::from_terms([((0, 0, 0), int(1))]));
        }
    }

    #[test]
    fn fitted_form_re_expands_to_input() {
        let order = 40;
        let e2 = eisenstein(Eisenstein::E2, order);
        let e4 = eisenstein(Eisenstein::E4, order);
        let e6 = eisenstein(Eisenstein::E6, order);
        let target = e2
            .checked_mul(&e4)
            .unwrap()
            .scale(&rat(5, 7))
            .checked_sub(&e6.scale(&rat(1, 3)))
            .unwrap()
            .checked_add(&e2.scale(&int(2)))
            .unwrap();
        let report = fit_adaptive(&target, 0, 24, 15).unwrap();
        assert_eq!(report.weight_cap, 6);
        let residual = report.form.expand(order).checked_sub(&target).unwrap();
        assert!(residual.is_zero());
        assert_eq!(report.form.weights(), [2, 6].into_iter().collect());
    }

    #[test]
    fn generic_series_is_rejected_with_mismatch_index() {
        let junk = QSeries::from_rationals((0..=30).map(|k| int((k * k + 1) as i64)).collect());
        match fit_quasimodular(&junk, 2, 2, 15) {
            Err(FitError::NotQuasimodularAtCap { first_mismatch, .. }) => assert_eq!(first_mismatch, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            fit_adaptive(&junk, 0, 24, 15),
            Err(FitError::NotQuasimodularAtCap { .. })
        ));
    }

    #[test]
    fn inconsistent_window_reports_first_bad_row() {
        // 1 + 7q: the constant and E2 agree on q^0 but no combination of
        // {1, E2, E2^2, E4} matches four coefficients of 1 + 7q + 0 q^2 + ...
        let mut s = QSeries::ones(30);
        s.set_coeff(1, int(7));
        let err = fit_quasimodular(&s, 4, 10, 15).unwrap_err();
        assert!(matches!(err, FitError::NotQuasimodularAtCap { weight_cap: 4, .. }));
    }

    #[test]
    fn insufficient_coefficients() {
        let s = QSeries::ones(10);
        assert!(matches!(
            fit_quasimodular(&s, 2, 2, 15),
            Err(FitError::InsufficientCoefficients { .. })
        ));
    }

    #[test]
    fn form_json_round_trip() {
        let form = QuasimodularForm::from_terms([((1, 0, 0), rat(-1, 12)), ((0, 1, 0), int(3))]);
        let text = serde_json::to_string(&form.to_json()).unwrap();
        assert_eq!(
            text,
            r#"{"terms":[{"coeff":"3","e2":0,"e4":1,"e6":0},{"coeff":"-1/12","e2":1,"e4":0,"e6":0}]}"#
        );
        let back: QuasimodularFormJson = serde_json::from_str(&text).unwrap();
        assert_eq!(QuasimodularForm::from_json(back).unwrap(), form);
    }
}
