use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{format_rational, parse_rational, AlgebraError, Coeff, Rational};

/// Sparse polynomial over the rationals in `u_1..u_m, v_1..v_n`.
///
/// Exponent vectors have length `m + n`, u-exponents first. Zero
/// coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamPoly {
    m: usize,
    n: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl ParamPoly {
    pub fn zero(m: usize, n: usize) -> Self {
        ParamPoly {
            m,
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(m: usize, n: usize) -> Self {
        Self::constant(m, n, Rational::one())
    }

    pub fn constant(m: usize, n: usize, value: Rational) -> Self {
        Self::monomial(m, n, vec![0; m + n], value)
    }

    /// `coeff * u^exps[..m] * v^exps[m..]`.
    pub fn monomial(m: usize, n: usize, exps: Vec<u32>, coeff: Rational) -> Self {
        assert_eq!(exps.len(), m + n, "exponent vector length must be m + n");
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exps, coeff);
        }
        ParamPoly { m, n, terms }
    }

    /// The variable `u_i` (0-based).
    pub fn u(m: usize, n: usize, i: usize) -> Self {
        let mut e = vec![0; m + n];
        e[i] = 1;
        Self::monomial(m, n, e, Rational::one())
    }

    /// The variable `v_j` (0-based).
    pub fn v(m: usize, n: usize, j: usize) -> Self {
        let mut e = vec![0; m + n];
        e[m + j] = 1;
        Self::monomial(m, n, e, Rational::one())
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    /// Value as a plain rational when the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_homogeneous_of_degree(&self, degree: u32) -> bool {
        self.terms.keys().all(|e| e.iter().sum::<u32>() == degree)
    }

    fn add_term(&mut self, exps: Vec<u32>, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    fn check_signature(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.signature() == other.signature() {
            Ok(())
        } else {
            Err(AlgebraError::SignatureMismatch(self.m, self.n, other.m, other.n))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_signature(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_signature(other)?;
        let mut out = Self::zero(self.m, self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Substitute `u = values_u`, `v = values_v`.
    pub fn evaluate(&self, values_u: &[Rational], values_v: &[Rational]) -> Rational {
        assert_eq!(values_u.len(), self.m);
        assert_eq!(values_v.len(), self.n);
        let vals: Vec<&Rational> = values_u.iter().chain(values_v).collect();
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in vals.iter().zip(e) {
                for _ in 0..k {
                    term *= *x;
                }
            }
            acc += term;
        }
        acc
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ParamPolyJson::from(self)).expect("plain data serializes")
    }

    pub fn from_json(json: ParamPolyJson) -> Result<Self, AlgebraError> {
        let mut out = Self::zero(json.m, json.n);
        for t in json.terms {
            if t.exp.len() != json.m + json.n {
                return Err(AlgebraError::DimensionMismatch(format!(
                    "exponent vector of length {} in a ({}, {}) polynomial",
                    t.exp.len(),
                    json.m,
                    json.n
                )));
            }
            out.add_term(t.exp, parse_rational(&t.coeff)?);
        }
        Ok(out)
    }
}

impl Coeff for ParamPoly {
    fn zero_like(&self) -> Self {
        Self::zero(self.m, self.n)
    }

    fn one_like(&self) -> Self {
        Self::one(self.m, self.n)
    }

    fn is_zero_elem(&self) -> bool {
        self.terms.is_empty()
    }

    fn plus(&self, other: &Self) -> Self {
        self.checked_add(other).expect("parameter signatures agree")
    }

    fn minus(&self, other: &Self) -> Self {
        self.plus(&other.negated())
    }

    fn times(&self, other: &Self) -> Self {
        self.checked_mul(other).expect("parameter signatures agree")
    }

    fn negated(&self) -> Self {
        ParamPoly {
            m: self.m,
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    fn scaled(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return self.zero_like();
        }
        ParamPoly {
            m: self.m,
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * factor)).collect(),
        }
    }

    fn inverse(&self) -> Result<Self, AlgebraError> {
        match self.as_constant() {
            Some(c) if !c.is_zero() => Ok(Self::constant(self.m, self.n, c.recip())),
            _ => Err(AlgebraError::NonUnitConstant),
        }
    }

    fn log(&self) -> Result<Self, AlgebraError> {
        match self.as_constant() {
            Some(c) if One::is_one(&c) => Ok(self.zero_like()),
            _ => Err(AlgebraError::LogConstantNotOne),
        }
    }

    fn exp(&self) -> Result<Self, AlgebraError> {
        if self.terms.is_empty() {
            Ok(self.one_like())
        } else {
            Err(AlgebraError::ExpConstantNotZero)
        }
    }
}

/// JSON form `{"m": int, "n": int, "terms": [{"exp": [ints], "coeff": "p/q"}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamPolyJson {
    pub m: usize,
    pub n: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub coeff: String,
}

impl From<&ParamPoly> for ParamPolyJson {
    fn from(p: &ParamPoly) -> Self {
        ParamPolyJson {
            m: p.m,
            n: p.n,
            terms: p
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    exp: e.clone(),
                    coeff: format_rational(c),
                })
                .collect(),
        }
    }
}
