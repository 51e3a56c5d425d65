use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{int, param_poly::ParamPoly, AlgebraError, Coeff, Rational};

/// Truncated power series `c_0 + c_1 t + ... + c_D t^D` over a coefficient ring.
///
/// The truncation order `D` is part of the value. Binary operations on series
/// of different orders fail instead of silently truncating to the minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct Series<C> {
    coeffs: Vec<C>,
}

/// Univariate series over the rationals.
pub type QSeries = Series<Rational>;

impl<C: Coeff> Series<C> {
    /// Builds a series from its coefficients; the order is `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the constant coefficient");
        Series { coeffs }
    }

    /// The zero series of the given order, with coefficients shaped like `template`.
    pub fn zero(order: usize, template: &C) -> Self {
        Series {
            coeffs: vec![template.zero_like(); order + 1],
        }
    }

    pub fn constant(order: usize, value: C) -> Self {
        let mut s = Self::zero(order, &value);
        s.coeffs[0] = value;
        s
    }

    pub fn one(order: usize, template: &C) -> Self {
        Self::constant(order, template.one_like())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    /// Coefficient of `t^k`; panics past the truncation order.
    pub fn coeff(&self, k: usize) -> &C {
        &self.coeffs[k]
    }

    pub fn set_coeff(&mut self, k: usize, value: C) {
        self.coeffs[k] = value;
    }

    pub fn coeff_mut(&mut self, k: usize) -> &mut C {
        &mut self.coeffs[k]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Coeff::is_zero_elem)
    }

    /// Explicitly change the truncation order, padding with zeros or dropping terms.
    pub fn truncated(&self, order: usize) -> Self {
        let template = self.coeffs[0].zero_like();
        let mut coeffs: Vec<C> = self.coeffs.iter().take(order + 1).cloned().collect();
        coeffs.resize(order + 1, template);
        Series { coeffs }
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        Series {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    fn check_order(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.order() == other.order() {
            Ok(())
        } else {
            Err(AlgebraError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_order(other)?;
        Ok(Series {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.plus(b)).collect(),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_order(other)?;
        Ok(Series {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.minus(b)).collect(),
        })
    }

    /// Cauchy product truncated at the common order.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_order(other)?;
        let order = self.order();
        let mut coeffs = Vec::with_capacity(order + 1);
        for n in 0..=order {
            let mut acc = self.coeffs[0].zero_like();
            for k in 0..=n {
                if self.coeffs[k].is_zero_elem() || other.coeffs[n - k].is_zero_elem() {
                    continue;
                }
                acc = acc.plus(&self.coeffs[k].times(&other.coeffs[n - k]));
            }
            coeffs.push(acc);
        }
        Ok(Series { coeffs })
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        self.map(|c| c.scaled(factor))
    }

    pub fn scale_by(&self, factor: &C) -> Self {
        self.map(|c| c.times(factor))
    }

    /// Multiplicative inverse; the constant term must be a unit of the coefficient ring.
    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        let inv0 = self.coeffs[0].inverse()?;
        let order = self.order();
        let mut out: Vec<C> = Vec::with_capacity(order + 1);
        out.push(inv0.clone());
        for n in 1..=order {
            let mut acc = inv0.zero_like();
            for k in 1..=n {
                if self.coeffs[k].is_zero_elem() {
                    continue;
                }
                acc = acc.plus(&self.coeffs[k].times(&out[n - k]));
            }
            out.push(acc.times(&inv0).negated());
        }
        Ok(Series { coeffs: out })
    }

    /// Logarithm by the log-derivative recurrence `n b_n a_0 = n a_n - sum k b_k a_{n-k}`.
    ///
    /// The constant term must have a logarithm in the coefficient ring (for
    /// rationals that means it equals 1).
    pub fn log(&self) -> Result<Self, AlgebraError> {
        let a = &self.coeffs;
        let b0 = a[0].log()?;
        let inv0 = a[0].inverse()?;
        let order = self.order();
        let mut b: Vec<C> = Vec::with_capacity(order + 1);
        b.push(b0);
        for n in 1..=order {
            let mut acc = a[n].scaled(&int(n as i64));
            for k in 1..n {
                if b[k].is_zero_elem() || a[n - k].is_zero_elem() {
                    continue;
                }
                acc = acc.minus(&b[k].times(&a[n - k]).scaled(&int(k as i64)));
            }
            let bn = acc.times(&inv0).scaled(&Rational::new(1.into(), (n as i64).into()));
            b.push(bn);
        }
        Ok(Series { coeffs: b })
    }

    /// Exponential by `n b_n = sum_{k=1}^n k a_k b_{n-k}`.
    pub fn exp(&self) -> Result<Self, AlgebraError> {
        let a = &self.coeffs;
        let order = self.order();
        let mut b: Vec<C> = Vec::with_capacity(order + 1);
        b.push(a[0].exp()?);
        for n in 1..=order {
            let mut acc = a[0].zero_like();
            for k in 1..=n {
                if a[k].is_zero_elem() {
                    continue;
                }
                acc = acc.plus(&a[k].times(&b[n - k]).scaled(&int(k as i64)));
            }
            b.push(acc.scaled(&Rational::new(1.into(), (n as i64).into())));
        }
        Ok(Series { coeffs: b })
    }
}

impl<C: Coeff> Coeff for Series<C> {
    fn zero_like(&self) -> Self {
        Series::zero(self.order(), &self.coeffs[0])
    }

    fn one_like(&self) -> Self {
        Series::one(self.order(), &self.coeffs[0])
    }

    fn is_zero_elem(&self) -> bool {
        Series::is_zero(self)
    }

    fn plus(&self, other: &Self) -> Self {
        self.checked_add(other).expect("nested series orders agree")
    }

    fn minus(&self, other: &Self) -> Self {
        self.checked_sub(other).expect("nested series orders agree")
    }

    fn times(&self, other: &Self) -> Self {
        self.checked_mul(other).expect("nested series orders agree")
    }

    fn negated(&self) -> Self {
        self.map(Coeff::negated)
    }

    fn scaled(&self, factor: &Rational) -> Self {
        self.scale(factor)
    }

    fn inverse(&self) -> Result<Self, AlgebraError> {
        Series::inverse(self)
    }

    fn log(&self) -> Result<Self, AlgebraError> {
        Series::log(self)
    }

    fn exp(&self) -> Result<Self, AlgebraError> {
        Series::exp(self)
    }
}

impl QSeries {
    pub fn from_rationals(coeffs: Vec<Rational>) -> Self {
        Series::from_coeffs(coeffs)
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Series::from_coeffs(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zeros(order: usize) -> Self {
        Series::zero(order, &Rational::zero())
    }

    pub fn ones(order: usize) -> Self {
        Series::one(order, &Rational::zero())
    }

    /// The monomial `t^k` (zero if `k` exceeds the order).
    pub fn monomial(order: usize, k: usize, coeff: Rational) -> Self {
        let mut s = Self::zeros(order);
        if k <= order {
            s.coeffs[k] = coeff;
        }
        s
    }

    /// Evaluate the truncated polynomial at a rational point.
    pub fn evaluate(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn to_json(&self) -> QSeriesJson {
        QSeriesJson {
            order: self.order(),
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn from_json(json: QSeriesJson) -> Result<Self, AlgebraError> {
        if json.coeffs.len() != json.order + 1 {
            return Err(AlgebraError::DimensionMismatch(format!(
                "series of order {} needs {} coefficients, got {}",
                json.order,
                json.order + 1,
                json.coeffs.len()
            )));
        }
        Ok(Series::from_coeffs(json.coeffs))
    }
}

impl<C: Coeff> Series<Series<C>> {
    /// Swap the roles of the outer and inner variables.
    pub fn transpose(&self) -> Series<Series<C>> {
        let inner_order = self.coeffs[0].order();
        let outer_order = self.order();
        let mut out = Vec::with_capacity(inner_order + 1);
        for j in 0..=inner_order {
            let layer: Vec<C> = (0..=outer_order).map(|i| self.coeffs[i].coeffs[j].clone()).collect();
            out.push(Series::from_coeffs(layer));
        }
        Series { coeffs: out }
    }
}

/// JSON form `{"D": int, "coeffs": ["p/q", ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QSeriesJson {
    #[serde(rename = "D")]
    pub order: usize,
    #[serde(with = "super::rational_vec_serde")]
    pub coeffs: Vec<Rational>,
}

/// Truncated series in `q` and `ħ` with parameter-polynomial coefficients.
///
/// Stored as a series in `q` whose coefficients are series in `ħ`, so that
/// `coeff(d, r)` is the coefficient of `q^d ħ^r`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiSeries {
    inner: Series<Series<ParamPoly>>,
    m: usize,
    n: usize,
}

impl BiSeries {
    pub fn zero(q_order: usize, h_order: usize, m: usize, n: usize) -> Self {
        let layer = Series::zero(h_order, &ParamPoly::zero(m, n));
        BiSeries {
            inner: Series::zero(q_order, &layer),
            m,
            n,
        }
    }

    pub fn one(q_order: usize, h_order: usize, m: usize, n: usize) -> Self {
        let mut s = Self::zero(q_order, h_order, m, n);
        s.set_coeff(0, 0, ParamPoly::one(m, n));
        s
    }

    pub fn from_layers(layers: Series<Series<ParamPoly>>, m: usize, n: usize) -> Self {
        BiSeries { inner: layers, m, n }
    }

    pub fn q_order(&self) -> usize {
        self.inner.order()
    }

    pub fn h_order(&self) -> usize {
        self.inner.coeff(0).order()
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn coeff(&self, d: usize, r: usize) -> &ParamPoly {
        self.inner.coeff(d).coeff(r)
    }

    pub fn set_coeff(&mut self, d: usize, r: usize, value: ParamPoly) {
        assert_eq!(value.signature(), (self.m, self.n));
        self.inner.coeff_mut(d).set_coeff(r, value);
    }

    /// The `ħ`-series multiplying `q^d`.
    pub fn q_layer(&self, d: usize) -> &Series<ParamPoly> {
        self.inner.coeff(d)
    }

    /// The `q`-series multiplying `ħ^r`.
    pub fn h_layer(&self, r: usize) -> Series<ParamPoly> {
        Series::from_coeffs((0..=self.q_order()).map(|d| self.coeff(d, r).clone()).collect())
    }

    pub fn layers(&self) -> &Series<Series<ParamPoly>> {
        &self.inner
    }

    fn check(&self, other: &Self) -> Result<(), AlgebraError> {
        if (self.m, self.n) != (other.m, other.n) {
            return Err(AlgebraError::SignatureMismatch(self.m, self.n, other.m, other.n));
        }
        if self.q_order() != other.q_order() {
            return Err(AlgebraError::OrderMismatch {
                left: self.q_order(),
                right: other.q_order(),
            });
        }
        if self.h_order() != other.h_order() {
            return Err(AlgebraError::OrderMismatch {
                left: self.h_order(),
                right: other.h_order(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        Ok(self.with(self.inner.checked_add(&other.inner)?))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        Ok(self.with(self.inner.checked_sub(&other.inner)?))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        Ok(self.with(self.inner.checked_mul(&other.inner)?))
    }

    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        Ok(self.with(self.inner.inverse()?))
    }

    pub fn log(&self) -> Result<Self, AlgebraError> {
        Ok(self.with(self.inner.log()?))
    }

    pub fn exp(&self) -> Result<Self, AlgebraError> {
        Ok(self.with(self.inner.exp()?))
    }

    pub fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    /// Substitute numeric parameter values, leaving a rational series in `q` and `ħ`.
    pub fn evaluate_params(&self, u: &[Rational], v: &[Rational]) -> Series<Series<Rational>> {
        self.inner.map(|layer| layer.map(|p| p.evaluate(u, v)))
    }

    fn with(&self, inner: Series<Series<ParamPoly>>) -> Self {
        BiSeries {
            inner,
            m: self.m,
            n: self.n,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let coeffs: Vec<Vec<serde_json::Value>> = (0..=self.q_order())
            .map(|d| (0..=self.h_order()).map(|r| self.coeff(d, r).to_json()).collect())
            .collect();
        serde_json::json!({
            "q_order": self.q_order(),
            "h_order": self.h_order(),
            "m": self.m,
            "n": self.n,
            "coeffs": coeffs,
        })
    }
}

impl Series<ParamPoly> {
    pub fn evaluate_params(&self, u: &[Rational], v: &[Rational]) -> QSeries {
        self.map(|p| p.evaluate(u, v))
    }
}

impl Series<Rational> {
    pub fn is_one_series(&self) -> bool {
        One::is_one(&self.coeffs[0]) && self.coeffs[1..].iter().all(Zero::is_zero)
    }
}
