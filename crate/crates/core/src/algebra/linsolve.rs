use num_traits::Zero;

use super::{AlgebraError, Rational};

#[derive(Debug, Clone, PartialEq)]
pub enum LinearSolution {
    Unique(Vec<Rational>),
    Inconsistent,
    /// Solutions exist but `free_variables` of them are unconstrained;
    /// `particular` sets every free variable to zero.
    Underdetermined {
        free_variables: usize,
        particular: Vec<Rational>,
    },
}

fn bit_size(r: &Rational) -> u64 {
    r.numer().bits() + r.denom().bits()
}

/// Solve `A x = b` exactly by Gaussian elimination with full pivoting.
///
/// Among the nonzero entries of the remaining submatrix the pivot with the
/// smallest bit size is chosen, which keeps intermediate growth modest.
pub fn solve_linear_exact(a: &[Vec<Rational>], b: &[Rational]) -> Result<LinearSolution, AlgebraError> {
    let rows = a.len();
    if rows != b.len() {
        return Err(AlgebraError::DimensionMismatch(format!(
            "matrix has {rows} rows but right-hand side has {}",
            b.len()
        )));
    }
    let cols = a.first().map_or(0, Vec::len);
    if let Some(bad) = a.iter().position(|row| row.len() != cols) {
        return Err(AlgebraError::DimensionMismatch(format!(
            "row {bad} has length {} but row 0 has {cols}",
            a[bad].len()
        )));
    }

    let mut m: Vec<Vec<Rational>> = a.to_vec();
    let mut rhs: Vec<Rational> = b.to_vec();
    // col_of[k] is the original column sitting at position k after swaps
    let mut col_of: Vec<usize> = (0..cols).collect();
    let mut rank = 0;

    while rank < rows && rank < cols {
        let mut best: Option<(usize, usize, u64)> = None;
        for (i, row) in m.iter().enumerate().skip(rank) {
            for (j, x) in row.iter().enumerate().skip(rank) {
                if x.is_zero() {
                    continue;
                }
                let size = bit_size(x);
                if best.is_none_or(|(_, _, s)| size < s) {
                    best = Some((i, j, size));
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        m.swap(rank, pi);
        rhs.swap(rank, pi);
        if pj != rank {
            for row in m.iter_mut() {
                row.swap(rank, pj);
            }
            col_of.swap(rank, pj);
        }

        let pivot = m[rank][rank].clone();
        let inv = pivot.recip();
        for x in m[rank].iter_mut().skip(rank) {
            *x *= &inv;
        }
        rhs[rank] *= &inv;

        let pivot_row = m[rank].clone();
        let pivot_rhs = rhs[rank].clone();
        for i in 0..rows {
            if i == rank || m[i][rank].is_zero() {
                continue;
            }
            let factor = m[i][rank].clone();
            for j in rank..cols {
                if !pivot_row[j].is_zero() {
                    let delta = &factor * &pivot_row[j];
                    m[i][j] -= delta;
                }
            }
            rhs[i] -= &factor * &pivot_rhs;
        }
        rank += 1;
    }

    if rhs[rank..].iter().any(|x| !x.is_zero()) {
        return Ok(LinearSolution::Inconsistent);
    }

    let mut x = vec![Rational::zero(); cols];
    for k in 0..rank {
        x[col_of[k]] = rhs[k].clone();
    }
    if rank == cols {
        Ok(LinearSolution::Unique(x))
    } else {
        Ok(LinearSolution::Underdetermined {
            free_variables: cols - rank,
            particular: x,
        })
    }
}
