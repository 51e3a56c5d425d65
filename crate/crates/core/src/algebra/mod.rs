//! Coefficient rings: exact rationals, sparse parameter polynomials, and
//! truncated power series in one and two variables.
//!
//! Every ring implements [`Coeff`], so series can be nested: a [`QSeries`] is a
//! `Series<Rational>`, the `ħ`-layers of a [`BiSeries`] are `Series<ParamPoly>`,
//! and a [`BiSeries`] is a series in `q` whose coefficients are those layers.

mod linsolve;
mod param_poly;
mod series;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

pub use linsolve::{solve_linear_exact, LinearSolution};
pub use param_poly::ParamPoly;
pub use series::{BiSeries, QSeries, QSeriesJson, Series};

/// Exact rational number, always stored in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("truncation order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("parameter signature mismatch: ({0}, {1}) vs ({2}, {3})")]
    SignatureMismatch(usize, usize, usize, usize),
    #[error("constant term is not a unit")]
    NonUnitConstant,
    #[error("logarithm requires constant term 1")]
    LogConstantNotOne,
    #[error("exponential requires constant term 0")]
    ExpConstantNotZero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("cannot parse rational {0:?}")]
    BadRational(String),
}

/// Ring operations needed by the truncated series code.
///
/// Zero and one are produced from an existing value because series carry an
/// order and parameter polynomials carry a signature.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn scaled(&self, factor: &Rational) -> Self;
    fn inverse(&self) -> Result<Self, AlgebraError>;
    fn log(&self) -> Result<Self, AlgebraError>;
    fn exp(&self) -> Result<Self, AlgebraError>;

    fn is_one_elem(&self) -> bool {
        *self == self.one_like()
    }
}

impl Coeff for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }

    fn one_like(&self) -> Self {
        Rational::one()
    }

    fn is_zero_elem(&self) -> bool {
        Zero::is_zero(self)
    }

    fn plus(&self, other: &Self) -> Self {
        self + other
    }

    fn minus(&self, other: &Self) -> Self {
        self - other
    }

    fn times(&self, other: &Self) -> Self {
        self * other
    }

    fn negated(&self) -> Self {
        -self
    }

    fn scaled(&self, factor: &Rational) -> Self {
        self * factor
    }

    fn inverse(&self) -> Result<Self, AlgebraError> {
        if Zero::is_zero(self) {
            Err(AlgebraError::NonUnitConstant)
        } else {
            Ok(self.recip())
        }
    }

    fn log(&self) -> Result<Self, AlgebraError> {
        if One::is_one(self) {
            Ok(Rational::zero())
        } else {
            Err(AlgebraError::LogConstantNotOne)
        }
    }

    fn exp(&self) -> Result<Self, AlgebraError> {
        if Zero::is_zero(self) {
            Ok(Rational::one())
        } else {
            Err(AlgebraError::ExpConstantNotZero)
        }
    }
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn from_bigint(value: BigInt) -> Rational {
    Rational::from_integer(value)
}

/// Canonical text form: `"p/q"`, or `"p"` when the denominator is 1.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

pub fn parse_rational(text: &str) -> Result<Rational, AlgebraError> {
    let trimmed = text.trim();
    let parsed: Result<Rational, _> = trimmed.parse();
    match parsed {
        Ok(r) if !r.denom().is_zero() => Ok(r),
        _ => Err(AlgebraError::BadRational(text.to_string())),
    }
}

pub(crate) mod rational_vec_serde {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&format_rational(v))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| parse_rational(t).map_err(D::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_round_trip() {
        assert_eq!(format_rational(&rat(6, -4)), "-3/2");
        assert_eq!(format_rational(&int(5)), "5");
        assert_eq!(parse_rational("-3/2").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn rational_log_exp_domain() {
        assert_eq!(Coeff::log(&int(1)).unwrap(), int(0));
        assert_eq!(Coeff::log(&int(2)), Err(AlgebraError::LogConstantNotOne));
        assert_eq!(Coeff::exp(&int(0)).unwrap(), int(1));
        assert_eq!(Coeff::inverse(&int(0)), Err(AlgebraError::NonUnitConstant));
        assert_eq!(Coeff::inverse(&int(2)).unwrap(), rat(1, 2));
    }
}
