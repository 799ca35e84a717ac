//! Small dense helpers on top of nalgebra plus a conjugate-gradient solver
//! for `(I - A^2) X = B` with sparse `A`.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::combmat::CombinationMatrix;
use crate::error::{Error, Result};

/// Condition numbers above this are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// 2-norm condition number from singular values.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    let sv = m.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// `B M^{-1}`, via Cholesky when `M` is symmetric positive definite and LU
/// with partial pivoting otherwise.
pub fn solve_right(b: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    if b.ncols() != m.nrows() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: b.ncols() });
    }
    // X M = B  <=>  M^T X^T = B^T
    let bt = b.transpose();
    let mt = m.transpose();
    let xt = if is_symmetric(m, 0.0) {
        match mt.clone().cholesky() {
            Some(chol) => chol.solve(&bt),
            None => mt.lu().solve(&bt).ok_or(Error::Singular)?,
        }
    } else {
        mt.lu().solve(&bt).ok_or(Error::Singular)?
    };
    Ok(xt.transpose())
}

/// Inverse of a symmetric positive definite matrix, exactly symmetrized.
pub fn spd_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let chol = m.clone().cholesky().ok_or(Error::Singular)?;
    Ok(symmetrize(&chol.inverse()))
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn is_symmetric(m: &DMatrix<f64>, tol: f64) -> bool {
    let n = m.nrows();
    m.ncols() == n && (0..n).all(|i| ((i + 1)..n).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= tol))
}

/// Rows and columns `idx` of `m`.
pub fn select(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |r, c| m[(rows[r], cols[c])])
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Solves `(I - A^2) x = e_j` for every `j` in `columns` by conjugate
/// gradients, returning the `n x |columns|` solution block.
///
/// `I - A^2` is symmetric with spectrum in `[1 - rho^2, 1]`, so the iteration
/// converges geometrically; the residual target is `tol` (absolute, 2-norm).
pub fn solve_shifted_square(a: &CombinationMatrix, columns: &[usize], tol: f64) -> Result<DMatrix<f64>> {
    let n = a.n();
    let mut out = DMatrix::zeros(n, columns.len());
    let max_iter = 10 * n + 1000;
    let mut tmp = alloc::vec![0.0; n];
    let mut ap = alloc::vec![0.0; n];
    let apply = |x: &[f64], tmp: &mut [f64], y: &mut [f64]| {
        a.matvec_into(x, tmp);
        a.matvec_into(tmp, y);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = xi - *yi;
        }
    };
    for (c, &j) in columns.iter().enumerate() {
        let mut x = alloc::vec![0.0; n];
        let mut r = alloc::vec![0.0; n];
        r[j] = 1.0;
        let mut p: Vec<f64> = r.clone();
        let mut rr = 1.0;
        let mut iter = 0;
        while libm::sqrt(rr) > tol {
            if iter == max_iter {
                return Err(Error::NoConvergence { iterations: iter, residual: libm::sqrt(rr) });
            }
            apply(&p, &mut tmp, &mut ap);
            let pap: f64 = p.iter().zip(&ap).map(|(u, v)| u * v).sum();
            if !(pap > 0.0) {
                return Err(Error::Singular);
            }
            let alpha = rr / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rr_new: f64 = r.iter().map(|v| v * v).sum();
            let beta = rr_new / rr;
            for i in 0..n {
                p[i] = r[i] + beta * p[i];
            }
            rr = rr_new;
            iter += 1;
        }
        out.set_column(c, &nalgebra::DVector::from_vec(x));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combmat::build_metropolis;
    use crate::graph::gen_er;
    use crate::rng::rng_from_seed;

    #[test]
    fn solve_right_matches_inverse() {
        let m = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let b = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, -1.0, 0.0, 1.0]);
        let x = solve_right(&b, &m).unwrap();
        assert!(max_abs_diff(&(&x * &m), &b) < 1e-14);
        let nonsym = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.5, 3.0]);
        let b = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let x = solve_right(&b, &nonsym).unwrap();
        assert!(max_abs_diff(&(&x * &nonsym), &b) < 1e-14);
        assert!(solve_right(&b, &DMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn cg_matches_dense_inverse() {
        let g = gen_er(40, 0.2, &mut rng_from_seed(11)).unwrap();
        let a = build_metropolis(&g, 0.8).unwrap();
        let dense = a.to_dense();
        let m = DMatrix::identity(40, 40) - &dense * &dense;
        let inv = spd_inverse(&m).unwrap();
        let cols = [0, 7, 39];
        let x = solve_shifted_square(&a, &cols, 1e-15).unwrap();
        assert!(max_abs_diff(&x, &select(&inv, &(0..40).collect::<Vec<_>>(), &cols)) < 1e-13);
    }

    #[test]
    fn condition_number_of_diagonal() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(alloc::vec![2.0, 0.5, 1.0]));
        assert!((condition_number(&m) - 4.0).abs() < 1e-12);
        assert!(condition_number(&DMatrix::zeros(2, 2)).is_infinite());
    }
}
