//! Multivariate hypergeometric series of two matrix arguments and the CUE
//! moment and cumulant series built from it.
//!
//! The series is
//! `G_N(z, A, B | x; y) = 1 + Σ_d z^d Σ_{λ ∈ Y_N^d} s_λ(A) s_λ(B) Π (x_i)_λ / Π (y_j)_λ`,
//! with matrix arguments given by their eigenvalue lists. Schur polynomials
//! are evaluated by the Jacobi–Trudi determinant in complete homogeneous
//! polynomials obtained from power sums, over any [`Scalar`].

use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Num, One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{from_bigint, int, AlgebraError, BiSeries, ParamPoly, QSeries, Rational, Series};
use crate::partitions::{enumerate_partitions, factorial, Partition};
use crate::symgroup::{character_table, OracleError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HypergeomError {
    #[error("lower parameter {parameter} = {value} vanishes on cell {cell:?} of {partition}")]
    ZeroDenominator {
        parameter: usize,
        value: String,
        partition: Partition,
        /// 1-based `(row, column)`.
        cell: (usize, usize),
    },
    #[error("eigenvalue lists have lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("tail bound needs N > (d - 1) max |v_j|")]
    OutsideConvergence,
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Field elements the Schur and determinant code runs over.
pub trait Scalar: Clone + Num + Neg<Output = Self> + Send + Sync {
    fn from_i64(k: i64) -> Self;
    /// Size used to choose pivots; only comparisons between entries matter.
    fn pivot_weight(&self) -> f64;
}

impl Scalar for Rational {
    fn from_i64(k: i64) -> Self {
        int(k)
    }

    fn pivot_weight(&self) -> f64 {
        // any nonzero pivot is exact; prefer the shortest
        if self.is_zero() {
            0.0
        } else {
            1.0 / (1 + self.numer().bits() + self.denom().bits()) as f64
        }
    }
}

impl Scalar for Complex64 {
    fn from_i64(k: i64) -> Self {
        Complex64::new(k as f64, 0.0)
    }

    fn pivot_weight(&self) -> f64 {
        self.norm()
    }
}

/// Determinant by Gaussian elimination with partial pivoting on `pivot_weight`.
pub fn determinant<S: Scalar>(matrix: &[Vec<S>]) -> S {
    let n = matrix.len();
    let mut m: Vec<Vec<S>> = matrix.to_vec();
    let mut det = S::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                m[i][col]
                    .pivot_weight()
                    .partial_cmp(&m[j][col].pivot_weight())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("nonempty range");
        if m[pivot][col].is_zero() {
            return S::zero();
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det = det * p.clone();
        for i in col + 1..n {
            if m[i][col].is_zero() {
                continue;
            }
            let factor = m[i][col].clone() / p.clone();
            let (upper, lower) = m.split_at_mut(i);
            for (target, pivot) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *target = target.clone() - factor.clone() * pivot.clone();
            }
        }
    }
    det
}

/// `p_1..p_k` of `values`, with index 0 holding the number of values.
pub fn power_sums<S: Scalar>(values: &[S], k_max: usize) -> Vec<S> {
    let mut out = vec![S::from_i64(values.len() as i64)];
    let mut powers: Vec<S> = values.to_vec();
    for k in 1..=k_max {
        if k > 1 {
            for (p, v) in powers.iter_mut().zip(values) {
                *p = p.clone() * v.clone();
            }
        }
        out.push(powers.iter().cloned().fold(S::zero(), |a, b| a + b));
    }
    out
}

/// `h_0..h_k` from power sums by Newton's identity `k h_k = Σ_{i=1}^k p_i h_{k-i}`.
pub fn complete_from_power_sums<S: Scalar>(p: &[S], k_max: usize) -> Vec<S> {
    let mut h = vec![S::one()];
    for k in 1..=k_max {
        let mut acc = S::zero();
        for i in 1..=k {
            acc = acc + p[i].clone() * h[k - i].clone();
        }
        h.push(acc / S::from_i64(k as i64));
    }
    h
}

/// Jacobi–Trudi `det[h_{λ_i - i + j}]` in `n_vars` variables; zero when
/// `ℓ(λ) > n_vars`. `h` must reach index `λ_1 + ℓ(λ) - 1`.
pub fn schur_from_complete<S: Scalar>(lambda: &Partition, h: &[S], n_vars: usize) -> S {
    let len = lambda.length();
    if len > n_vars {
        return S::zero();
    }
    if len == 0 {
        return S::one();
    }
    let parts = lambda.parts();
    let matrix: Vec<Vec<S>> = (0..len)
        .map(|i| {
            (0..len)
                .map(|j| {
                    let idx = parts[i] as i64 - i as i64 + j as i64;
                    if idx < 0 {
                        S::zero()
                    } else {
                        h[idx as usize].clone()
                    }
                })
                .collect()
        })
        .collect();
    determinant(&matrix)
}

/// `s_λ(values)`.
pub fn schur<S: Scalar>(lambda: &Partition, values: &[S]) -> S {
    let k = lambda.parts().first().copied().unwrap_or(0) + lambda.length();
    let h = complete_from_power_sums(&power_sums(values, k), k);
    schur_from_complete(lambda, &h, values.len())
}

/// Raw parameters `x_1..x_m` over `y_1..y_n`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HypergeomParams<S> {
    pub upper: Vec<S>,
    pub lower: Vec<S>,
}

impl<S: Scalar> HypergeomParams<S> {
    pub fn new(upper: Vec<S>, lower: Vec<S>) -> Self {
        HypergeomParams { upper, lower }
    }

    /// Every parameter shifted by `delta`.
    pub fn shifted(&self, delta: i64) -> Self {
        let shift = |xs: &[S]| xs.iter().map(|x| x.clone() + S::from_i64(delta)).collect();
        HypergeomParams {
            upper: shift(&self.upper),
            lower: shift(&self.lower),
        }
    }

    /// `Π (x_i)_λ / Π (y_j)_λ`, or the first vanishing lower factor as
    /// `(parameter index, 1-based cell)`.
    fn pochhammer_ratio(&self, lambda: &Partition) -> Result<S, (usize, (usize, usize))> {
        // cell by cell, so floating-point runs do not overflow at high order
        let mut ratio = S::one();
        for (i, j) in lambda.cells() {
            let c = S::from_i64(j as i64 - i as i64);
            let mut num = S::one();
            let mut den = S::one();
            for x in &self.upper {
                num = num * (x.clone() + c.clone());
            }
            for (k, y) in self.lower.iter().enumerate() {
                let f = y.clone() + c.clone();
                if f.is_zero() {
                    return Err((k, (i, j)));
                }
                den = den * f;
            }
            ratio = ratio * num / den;
        }
        Ok(ratio)
    }
}

fn series_coefficients<S: Scalar + std::fmt::Display>(
    params: &HypergeomParams<S>,
    a: &[S],
    b: &[S],
    order: usize,
) -> Result<Vec<S>, HypergeomError> {
    if a.len() != b.len() {
        return Err(HypergeomError::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    let k = order + n;
    let ha = complete_from_power_sums(&power_sums(a, k), k);
    let hb = complete_from_power_sums(&power_sums(b, k), k);
    let mut out = vec![S::one()];
    for d in 1..=order {
        let mut acc = S::zero();
        for lambda in enumerate_partitions(d, Some(n)) {
            let ratio =
                params
                    .pochhammer_ratio(&lambda)
                    .map_err(|(parameter, cell)| HypergeomError::ZeroDenominator {
                        parameter,
                        value: params.lower[parameter].to_string(),
                        partition: lambda.clone(),
                        cell,
                    })?;
            acc = acc + schur_from_complete(&lambda, &ha, n) * schur_from_complete(&lambda, &hb, n) * ratio;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Exact `G_N(z, A, B | x; y)` to `z^order`, with `N = |A| = |B|`.
pub fn hypergeom_series(
    params: &HypergeomParams<Rational>,
    a: &[Rational],
    b: &[Rational],
    order: usize,
) -> Result<QSeries, HypergeomError> {
    Ok(QSeries::from_rationals(series_coefficients(params, a, b, order)?))
}

/// Partial sum of `G_N(z, A, B | x; y)` through `z^order` at a complex point.
pub fn hypergeom_value(
    params: &HypergeomParams<Complex64>,
    a: &[Complex64],
    b: &[Complex64],
    z: Complex64,
    order: usize,
) -> Result<Complex64, HypergeomError> {
    let coeffs = series_coefficients(params, a, b, order)?;
    Ok(coeffs.iter().rev().fold(Complex64::zero(), |acc, c| acc * z + c))
}

/// `Π_{i,j} 1 / (1 - z a_i b_j)` expanded to `z^order`.
pub fn cauchy_product_series(a: &[Rational], b: &[Rational], order: usize) -> QSeries {
    let mut acc = QSeries::ones(order);
    for x in a {
        for y in b {
            let w = x * y;
            let mut pow = Rational::one();
            let geometric = QSeries::from_rationals(
                (0..=order)
                    .map(|_| {
                        let c = pow.clone();
                        pow *= &w;
                        c
                    })
                    .collect(),
            );
            acc = acc.checked_mul(&geometric).expect("same order");
        }
    }
    acc
}

/// `e_0..e_N` of `values` by the product `Π (1 + a_i t)`.
pub fn elementary_symmetric(values: &[Rational]) -> Vec<Rational> {
    let mut e = vec![Rational::one()];
    for a in values {
        e.push(Rational::zero());
        for k in (1..e.len()).rev() {
            let add = &e[k - 1] * a;
            e[k] += add;
        }
    }
    e
}

fn binomial(n: usize, k: usize) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `1 + Σ_{d=1}^{N} sign^d z^d e_d(A) e_d(B) / binom(N, d)` to `z^order`.
///
/// `alternating = true` gives the evaluation `E det(I - z A U B U*)`.
pub fn mss_polynomial(a: &[Rational], b: &[Rational], order: usize, alternating: bool) -> QSeries {
    let n = a.len();
    let (ea, eb) = (elementary_symmetric(a), elementary_symmetric(b));
    let mut out = QSeries::zeros(order);
    out.set_coeff(0, int(1));
    for d in 1..=n.min(order) {
        let mut c = &ea[d] * &eb[d] / from_bigint(binomial(n, d));
        if alternating && d % 2 == 1 {
            c = -c;
        }
        out.set_coeff(d, c);
    }
    out
}

/// `Π_{□} (1 + c(□) x)` as an integer polynomial in `x`, truncated at `x^order`.
fn renormalized_product(lambda: &Partition, order: usize) -> Vec<BigInt> {
    let mut poly = vec![BigInt::zero(); order + 1];
    poly[0] = BigInt::one();
    for c in lambda.contents() {
        if c == 0 {
            continue;
        }
        for k in (1..=order).rev() {
            let add = &poly[k - 1] * c;
            poly[k] += add;
        }
    }
    poly
}

/// Reciprocal of a power series with constant term 1, integer coefficients.
fn reciprocal_unit(poly: &[BigInt]) -> Vec<BigInt> {
    let mut inv = vec![BigInt::one()];
    for k in 1..poly.len() {
        let s: BigInt = (1..=k).map(|i| &poly[i] * &inv[k - i]).sum();
        inv.push(-s);
    }
    inv
}

fn substitute(coeffs: &[BigInt], m: usize, n: usize, var: usize) -> Series<ParamPoly> {
    Series::from_coeffs(
        coeffs
            .iter()
            .enumerate()
            .map(|(r, c)| {
                let mut e = vec![0u32; m + n];
                e[var] = r as u32;
                ParamPoly::monomial(m, n, e, from_bigint(c.clone()))
            })
            .collect(),
    )
}

/// `1 + Σ_{d ≤ d_max} q^d K_N^d / d!`, each `K_N^d / d! = Σ_{λ ⊢ d} Π [u_i ħ]_λ / Π [v_j ħ]_λ`
/// expanded to `ħ^h_order`.
///
/// The full set of diagrams of size `d` is used, which matches the CUE for `N ≥ d`.
pub fn cue_moment_series(m: usize, n: usize, d_max: usize, h_order: usize) -> BiSeries {
    let mut out = BiSeries::one(d_max, h_order, m, n);
    let layers: Vec<Series<ParamPoly>> = (1..=d_max)
        .into_par_iter()
        .map(|d| {
            let mut acc = Series::zero(h_order, &ParamPoly::zero(m, n));
            for lambda in enumerate_partitions(d, None) {
                let plus = renormalized_product(&lambda, h_order);
                let minus = reciprocal_unit(&plus);
                let mut term = Series::one(h_order, &ParamPoly::zero(m, n));
                for i in 0..m {
                    term = term.checked_mul(&substitute(&plus, m, n, i)).expect("same order");
                }
                for j in 0..n {
                    term = term.checked_mul(&substitute(&minus, m, n, m + j)).expect("same order");
                }
                acc = acc.checked_add(&term).expect("same order");
            }
            acc
        })
        .collect();
    for (d, layer) in (1..=d_max).zip(layers) {
        for r in 0..=h_order {
            out.set_coeff(d, r, layer.coeff(r).clone());
        }
    }
    out
}

/// `log` of [`cue_moment_series`]: the `q^d` layer is `L_N^d / d!`.
pub fn cue_cumulant_series(m: usize, n: usize, d_max: usize, h_order: usize) -> Result<BiSeries, HypergeomError> {
    Ok(cue_moment_series(m, n, d_max, h_order).log()?)
}

/// `K_N^d = d! Σ_{λ ∈ Y_N^d} Π [u_i / N]_λ / Π [v_j / N]_λ` exactly.
pub fn evaluate_moment_exact(
    u: &[Rational],
    v: &[Rational],
    d: usize,
    big_n: usize,
) -> Result<Rational, HypergeomError> {
    let nn = int(big_n as i64);
    let params = HypergeomParams::new(
        u.iter().map(|x| x / &nn).collect::<Vec<_>>(),
        v.iter().map(|x| x / &nn).collect::<Vec<_>>(),
    );
    let mut acc = Rational::zero();
    for lambda in enumerate_partitions(d, Some(big_n)) {
        let mut num = Rational::one();
        let mut den = Rational::one();
        for (i, j) in lambda.cells() {
            let c = int(j as i64 - i as i64);
            for x in &params.upper {
                num *= Rational::one() + x * &c;
            }
            for (k, y) in params.lower.iter().enumerate() {
                let f = Rational::one() + y * &c;
                if f.is_zero() {
                    return Err(HypergeomError::ZeroDenominator {
                        parameter: k,
                        value: v[k].to_string(),
                        partition: lambda.clone(),
                        cell: (i, j),
                    });
                }
                den *= f;
            }
        }
        acc += num / den;
    }
    Ok(acc * from_bigint(factorial(d)))
}

/// `d! Σ_{r ≤ R} [q^d ħ^r](u, v) N^{-r}` from a moment series.
pub fn truncated_moment_value(series: &BiSeries, d: usize, u: &[Rational], v: &[Rational], big_n: usize) -> Rational {
    let x = int(big_n as i64).recip();
    let layer = series.q_layer(d).evaluate_params(u, v);
    layer.evaluate(&x) * from_bigint(factorial(d))
}

/// Bound on `|K_N^d - truncated_moment_value|` for a series cut at `ħ^R`.
///
/// Each diagram's `ħ`-series is dominated coefficientwise by
/// `Π_i (1 + |u_i| (d-1) x)^d Π_j (1 - |v_j| (d-1) x)^{-d}`, so the tail of that
/// majorant at `x = 1/N`, times `d! p(d)`, bounds the error.
pub fn moment_tail_bound(
    u: &[Rational],
    v: &[Rational],
    d: usize,
    big_n: usize,
    h_order: usize,
) -> Result<Rational, HypergeomError> {
    let x = int(big_n as i64).recip();
    let spread = int(d.saturating_sub(1) as i64);
    let mut closed = Rational::one();
    let mut series = QSeries::ones(h_order);
    let power = |base: QSeries| -> QSeries {
        let mut acc = QSeries::ones(h_order);
        for _ in 0..d {
            acc = acc.checked_mul(&base).expect("same order");
        }
        acc
    };
    for ui in u {
        let a = ui.abs() * &spread;
        closed *= (Rational::one() + &a * &x).pow(d as i32);
        let mut lin = QSeries::ones(h_order);
        if h_order >= 1 {
            lin.set_coeff(1, a);
        }
        series = series.checked_mul(&power(lin)).expect("same order");
    }
    for vj in v {
        let b = vj.abs() * &spread;
        let base = Rational::one() - &b * &x;
        if !base.is_positive() {
            return Err(HypergeomError::OutsideConvergence);
        }
        closed /= base.pow(d as i32);
        let mut lin = QSeries::ones(h_order);
        if h_order >= 1 {
            lin.set_coeff(1, -b);
        }
        series = series.checked_mul(&power(lin).inverse()?).expect("same order");
    }
    let tail = closed - series.evaluate(&x);
    let count = enumerate_partitions(d, Some(big_n)).len() as i64;
    Ok(tail * int(count) * from_bigint(factorial(d)))
}

/// `E[p_α(U_N) p_β(U_N^*)] = Σ_{λ ∈ Y_N^d} χ^λ_α χ^λ_β`.
pub fn diaconis_expectation(alpha: &Partition, beta: &Partition, big_n: usize) -> Result<BigInt, HypergeomError> {
    if alpha.size() != beta.size() {
        return Ok(BigInt::zero());
    }
    let d = alpha.size();
    if d == 0 {
        return Ok(BigInt::one());
    }
    let table = character_table(d)?;
    let mut acc = BigInt::zero();
    for lambda in table.partitions().iter().filter(|l| l.length() <= big_n) {
        let a = table.value(lambda, alpha).expect("size d");
        let b = table.value(lambda, beta).expect("size d");
        acc += BigInt::from(a) * b;
    }
    Ok(acc)
}
