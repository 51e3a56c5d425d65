//! Floating-point cross-checks: Haar unitaries, the HCIZ determinant
//! formula, Khatri–Gross–Richards proportionality and Monte Carlo Schur norms.
//!
//! Sample `i` of a run with seed `s` draws from `ChaCha20Rng::seed_from_u64(s)`
//! switched to stream `i`, so results do not depend on thread scheduling.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::hypergeom::{
    complete_from_power_sums, determinant, hypergeom_value, schur_from_complete, HypergeomError, HypergeomParams,
};
use crate::partitions::{factorial, Partition};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("eigenvalue lists have lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("Vandermonde determinant is near singular: {0}")]
    NearSingular(String),
    #[error("entry series diverges at |z a_i b_j| = {0}")]
    Divergent(f64),
    #[error("z = 0 makes the determinant side degenerate")]
    ZeroZ,
    #[error("ℓ(λ) = {length} exceeds N = {n}")]
    TooManyRows { length: usize, n: usize },
    #[error(transparent)]
    Hypergeom(#[from] HypergeomError),
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        ComplexMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.n + j] = value;
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `max |(U*U - I)_{ij}|`.
    pub fn unitarity_residual(&self) -> f64 {
        let g = self.adjoint().mul(self);
        let id = Self::identity(self.n);
        g.data
            .iter()
            .zip(&id.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `Tr(U^k)` for `k = 1..=k_max`, index 0 holding `N`.
    pub fn trace_powers(&self, k_max: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(self.n as f64, 0.0)];
        let mut power = self.clone();
        for k in 1..=k_max {
            if k > 1 {
                power = power.mul(self);
            }
            out.push(power.trace());
        }
        out
    }
}

/// Haar unitary for sample `index` of the run seeded by `seed`.
///
/// A complex Ginibre matrix is orthonormalized column by column (modified
/// Gram–Schmidt). The implied `R` factor has positive diagonal, which makes
/// the `Q` factor exactly Haar distributed.
pub fn haar_sample_indexed(n: usize, seed: u64, index: u64) -> Result<ComplexMatrix, NumericError> {
    if n == 0 {
        return Err(NumericError::ZeroDimension);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re * scale, im * scale)
                })
                .collect()
        })
        .collect();
    for j in 0..n {
        for k in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let proj: Complex64 = done[k].iter().zip(&rest[0]).map(|(q, v)| q.conj() * v).sum();
            for (v, q) in rest[0].iter_mut().zip(&done[k]) {
                *v -= proj * q;
            }
        }
        let norm = cols[j].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    let mut u = ComplexMatrix::zeros(n);
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            u.set(i, j, v);
        }
    }
    Ok(u)
}

/// Haar unitary from `seed` (stream 0).
pub fn haar_sample(n: usize, seed: u64) -> Result<ComplexMatrix, NumericError> {
    haar_sample_indexed(n, seed, 0)
}

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

impl McEstimate {
    /// `|estimate - target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.stderr == 0.0 {
            if self.estimate == target {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.estimate - target).abs() / self.stderr
        }
    }
}

/// Mean of `f(U)` over `samples` Haar unitaries. Values are gathered in
/// sample order and reduced serially.
pub fn monte_carlo<F>(n: usize, samples: usize, seed: u64, f: F) -> Result<McEstimate, NumericError>
where
    F: Fn(&ComplexMatrix) -> f64 + Sync,
{
    let values: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| haar_sample_indexed(n, seed, i).map(|u| f(&u)))
        .collect::<Result<_, _>>()?;
    let count = values.len() as f64;
    let mean = values.iter().sum::<f64>() / count;
    let var = if values.len() > 1 {
        values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1.0)
    } else {
        0.0
    };
    Ok(McEstimate {
        estimate: mean,
        stderr: (var / count).sqrt(),
        samples,
        seed,
    })
}

/// `s_λ` of the eigenvalues of `U`, from `Tr(U^k)` without diagonalizing.
pub fn schur_of_unitary(lambda: &Partition, u: &ComplexMatrix) -> Complex64 {
    let k = lambda.parts().first().copied().unwrap_or(0) + lambda.length();
    let p = u.trace_powers(k);
    let h = complete_from_power_sums(&p, k);
    schur_from_complete(lambda, &h, u.dim())
}

/// Monte Carlo estimate of `E|s_λ(U_N)|²`.
pub fn schur_mc_norm(lambda: &Partition, n: usize, samples: usize, seed: u64) -> Result<McEstimate, NumericError> {
    if lambda.length() > n {
        return Err(NumericError::TooManyRows {
            length: lambda.length(),
            n,
        });
    }
    monte_carlo(n, samples, seed, |u| schur_of_unitary(lambda, u).norm_sqr())
}

fn vandermonde(values: &[Complex64]) -> Complex64 {
    let n = values.len();
    let m: Vec<Vec<Complex64>> = (0..n)
        .map(|i| values.iter().map(|a| a.powi((n - 1 - i) as i32)).collect())
        .collect();
    determinant(&m)
}

fn check_vandermonde(values: &[Complex64]) -> Result<Complex64, NumericError> {
    let v = vandermonde(values);
    let scale = values.iter().map(|a| a.norm()).fold(1.0, f64::max);
    let pairs = values.len() * values.len().saturating_sub(1) / 2;
    if v.norm() < 1e-10 * scale.powi(pairs as i32) {
        return Err(NumericError::NearSingular(format!("|Δ| = {:e}", v.norm())));
    }
    Ok(v)
}

/// Both sides of the HCIZ comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HcizReport {
    pub determinant_side: [f64; 2],
    pub series_side: [f64; 2],
    pub relative_error: f64,
}

/// Compare `Π_{k<N} k! / (qN)^{binom(N,2)} · det[e^{qN a_i b_j}] / (Δ(a) Δ(b))`
/// with `G_N(qN, A, B | ; N)` summed through `z^order`.
pub fn hciz_check(q: Complex64, a: &[f64], b: &[f64], order: usize) -> Result<HcizReport, NumericError> {
    if a.len() != b.len() {
        return Err(NumericError::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n == 0 {
        return Err(NumericError::ZeroDimension);
    }
    let ac: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let bc: Vec<Complex64> = b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let (va, vb) = (check_vandermonde(&ac)?, check_vandermonde(&bc)?);
    let z = q * n as f64;
    let kernel: Vec<Vec<Complex64>> = ac
        .iter()
        .map(|ai| bc.iter().map(|bj| (z * ai * bj).exp()).collect())
        .collect();
    let prefactor: f64 = (0..n)
        .map(|k| factorial(k).to_f64().expect("small factorial"))
        .product();
    let pairs = (n * (n - 1) / 2) as i32;
    let lhs = determinant(&kernel) * prefactor / (z.powi(pairs) * va * vb);
    let params = HypergeomParams::new(vec![], vec![Complex64::new(n as f64, 0.0)]);
    let rhs = hypergeom_value(&params, &ac, &bc, z, order)?;
    Ok(HcizReport {
        determinant_side: [lhs.re, lhs.im],
        series_side: [rhs.re, rhs.im],
        relative_error: (lhs - rhs).norm() / lhs.norm(),
    })
}

/// Ratio of the multivariate series to the determinant expression at each `z`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KgrReport {
    pub ratios: Vec<[f64; 2]>,
    pub spread: f64,
}

/// Evaluate `G_N(z) / (det[G(z a_i b_j | x - N + 1; y - N + 1)] / (z^{binom(N,2)} Δ(a) Δ(b)))`
/// at each sample `z` and report the largest pairwise relative deviation.
pub fn kgr_proportionality(
    params: &HypergeomParams<Complex64>,
    z_samples: &[Complex64],
    a: &[Complex64],
    b: &[Complex64],
    order: usize,
) -> Result<KgrReport, NumericError> {
    if a.len() != b.len() {
        return Err(NumericError::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n == 0 {
        return Err(NumericError::ZeroDimension);
    }
    let (va, vb) = (check_vandermonde(a)?, check_vandermonde(b)?);
    let shifted = params.shifted(1 - n as i64);
    let pairs = (n * (n - 1) / 2) as i32;
    let mut ratios = Vec::new();
    for &z in z_samples {
        if z.norm() == 0.0 {
            return Err(NumericError::ZeroZ);
        }
        if params.upper.len() >= params.lower.len() {
            let worst = a
                .iter()
                .flat_map(|ai| b.iter().map(move |bj| (z * ai * bj).norm()))
                .fold(0.0, f64::max);
            if worst >= 1.0 {
                return Err(NumericError::Divergent(worst));
            }
        }
        let entries: Vec<Vec<Complex64>> = a
            .iter()
            .map(|ai| {
                b.iter()
                    .map(|bj| hypergeom_value(&shifted, &[*ai], &[*bj], z, order))
                    .collect::<Result<_, _>>()
            })
            .collect::<Result<_, _>>()?;
        let det_side = determinant(&entries) / (z.powi(pairs) * va * vb);
        let series_side = hypergeom_value(params, a, b, z, order)?;
        ratios.push(series_side / det_side);
    }
    let deviations: Vec<f64> = ratios
        .iter()
        .flat_map(|r| ratios.iter().map(move |s| (r - s).norm() / r.norm().max(s.norm())))
        .collect();
    // f64::max would silently drop a NaN
    let spread = if deviations.iter().any(|d| d.is_nan()) {
        f64::NAN
    } else {
        deviations.into_iter().fold(0.0, f64::max)
    };
    Ok(KgrReport {
        ratios: ratios.iter().map(|r| [r.re, r.im]).collect(),
        spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn haar_samples_are_unitary_and_reproducible() {
        let u1 = haar_sample(1, 7).unwrap();
        assert!((u1.get(0, 0).norm() - 1.0).abs() < 1e-12);
        for n in 1..=6 {
            for seed in 0..5 {
                let u = haar_sample(n, seed).unwrap();
                assert!(u.unitarity_residual() < 1e-12, "n = {n}, seed = {seed}");
            }
        }
        assert_eq!(
            haar_sample_indexed(3, 11, 4).unwrap(),
            haar_sample_indexed(3, 11, 4).unwrap()
        );
        assert_ne!(
            haar_sample_indexed(3, 11, 4).unwrap(),
            haar_sample_indexed(3, 11, 5).unwrap()
        );
        assert!(haar_sample(0, 1).is_err());
    }

    #[test]
    fn trace_moments() {
        let re = monte_carlo(3, 10_000, 1, |u| u.trace().re).unwrap();
        let im = monte_carlo(3, 10_000, 1, |u| u.trace().im).unwrap();
        assert!(re.z_score(0.0) < 4.0 && im.z_score(0.0) < 4.0, "{re:?} {im:?}");
        let sq = monte_carlo(3, 20_000, 2, |u| u.trace().norm_sqr()).unwrap();
        assert!(sq.z_score(1.0) < 4.0, "{sq:?}");
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let a = schur_mc_norm(&p(&[2]), 2, 500, 9).unwrap();
        let b = schur_mc_norm(&p(&[2]), 2, 500, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn schur_norms() {
        let one = schur_mc_norm(&p(&[1]), 2, 20_000, 3).unwrap();
        assert!(one.z_score(1.0) < 5.0, "{one:?}");
        let hook = schur_mc_norm(&p(&[2, 1]), 4, 20_000, 4).unwrap();
        assert!(hook.z_score(1.0) < 5.0, "{hook:?}");
        let u = haar_sample(1, 5).unwrap();
        assert_eq!(schur_of_unitary(&p(&[1, 1]), &u), c(0.0));
        assert!(schur_mc_norm(&p(&[1, 1]), 1, 10, 0).is_err());
    }

    #[test]
    fn hciz_examples() {
        let r1 = hciz_check(Complex64::new(0.3, 0.0), &[1.5], &[-0.7], 40).unwrap();
        assert!(r1.relative_error < 1e-14, "{r1:?}");
        let r2 = hciz_check(c(0.01), &[1.0, 2.0], &[1.0, 3.0], 20).unwrap();
        assert!(r2.relative_error < 1e-8, "{r2:?}");
        let tiny = hciz_check(c(1e-6), &[1.0, 2.0], &[1.0, 3.0], 10).unwrap();
        assert!((tiny.series_side[0] - 1.0).abs() < 1e-4 && (tiny.determinant_side[0] - 1.0).abs() < 1e-4);
        assert!(matches!(
            hciz_check(c(0.01), &[1.0, 1.0], &[1.0, 3.0], 10),
            Err(NumericError::NearSingular(_))
        ));
    }

    #[test]
    fn hciz_error_tracks_truncation() {
        let (a, b) = ([0.5, 1.5, 2.5], [1.0, 2.0, 4.0]);
        let errors: Vec<f64> = [0.04, 0.02, 0.01]
            .iter()
            .map(|&q| hciz_check(c(q), &a, &b, 3).unwrap().relative_error)
            .collect();
        assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
    }

    #[test]
    fn kgr_examples() {
        let params = HypergeomParams::new(vec![c(2.5)], vec![c(3.5)]);
        let one = kgr_proportionality(&params, &[c(0.1), c(0.3)], &[c(0.7)], &[c(0.9)], 200).unwrap();
        assert!(one.spread < 1e-12, "{one:?}");
        for r in &one.ratios {
            assert!((r[0] - 1.0).abs() < 1e-12);
        }
        let a = [c(0.5), c(1.0)];
        let b = [c(0.3), c(0.8)];
        let two = kgr_proportionality(&params, &[c(0.02), c(0.05), c(0.09)], &a, &b, 60).unwrap();
        assert!(two.spread < 1e-6, "{two:?}");
        assert_eq!(
            kgr_proportionality(&params, &[c(0.0)], &a, &b, 10),
            Err(NumericError::ZeroZ)
        );
        assert!(matches!(
            kgr_proportionality(&params, &[c(2.0)], &a, &b, 10),
            Err(NumericError::Divergent(_))
        ));
    }
}
