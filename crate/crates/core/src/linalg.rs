//! Internal dense linear-algebra helpers. Matrices here are small (at most a
//! few dozen rows), so everything routes through nalgebra's pure-Rust SVD,
//! symmetric eigensolver, and LU.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Singular values in descending order.
pub(crate) fn singular_values(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let svd = m
        .clone()
        .try_svd(false, false, f64::EPSILON, 0)
        .ok_or_else(|| Error::SvdFailed(format!("{}x{} matrix", m.nrows(), m.ncols())))?;
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
    Ok(sv)
}

/// Thin SVD with columns arranged by descending singular value.
pub(crate) fn svd_parts(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>, DMatrix<f64>)> {
    let svd = m
        .clone()
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::SvdFailed(format!("{}x{} matrix", m.nrows(), m.ncols())))?;
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].partial_cmp(&sv[a]).expect("finite"));

    let u_sorted = DMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, order[j])]);
    let vt_sorted = DMatrix::from_fn(v_t.nrows(), v_t.ncols(), |i, j| v_t[(order[i], j)]);
    let sv_sorted: Vec<f64> = order.iter().map(|&i| sv[i]).collect();
    Ok((u_sorted, sv_sorted, vt_sorted))
}

/// Largest singular value.
pub(crate) fn spectral_norm(m: &DMatrix<f64>) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

/// Number of singular values strictly above `tol`.
pub(crate) fn rank_at(m: &DMatrix<f64>, tol: f64) -> Result<usize> {
    Ok(singular_values(m)?.iter().filter(|&&s| s > tol).count())
}

/// Orthonormal basis for the column span, keeping directions with singular
/// value above `tol`. Returns the basis and its rank.
pub(crate) fn orthonormal_columns(m: &DMatrix<f64>, tol: f64) -> Result<(DMatrix<f64>, usize)> {
    let (u, sv, _) = svd_parts(m)?;
    let rank = sv.iter().filter(|&&s| s > tol).count();
    Ok((u.columns(0, rank).into_owned(), rank))
}

/// Eigenvalues (ascending) and matching eigenvector columns of a symmetric
/// matrix. The input is symmetrized first, so mild asymmetry is tolerated.
pub(crate) fn symmetric_eigen_sorted(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or_else(|| Error::EigenFailed(format!("{}x{} symmetric matrix", m.nrows(), m.ncols())))?;
    let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).expect("finite"));
    let vecs = DMatrix::from_fn(eig.eigenvectors.nrows(), eig.eigenvectors.ncols(), |i, j| {
        eig.eigenvectors[(i, order[j])]
    });
    let sorted: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    Ok((sorted, vecs))
}

/// Solve `a x = b` by LU; errors when the factorization meets a zero pivot.
pub(crate) fn solve_lu(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::SingularSolve(format!("{}x{} system", a.nrows(), a.ncols())))
}

/// Largest absolute entry; zero for empty matrices.
pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, &x| acc.max(x.abs()))
}

/// Matrix exponential by scaling-and-squaring with a Taylor tail. Intended
/// for skew-symmetric arguments of modest norm, where the result is
/// orthogonal to machine precision.
pub(crate) fn exp_matrix(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let norm = spectral_norm(m)?;
    // Halve until the norm is at most 1/2, then the Taylor tail after 24
    // terms is far below machine epsilon.
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m / 2f64.powi(squarings as i32);
    let mut result = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..=24 {
        term = (&term * &scaled) / k as f64;
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

/// Real 2n x 2n block embedding [[A, -B], [B, A]] of a complex n x n matrix
/// A + iB. The image commutes with J and is orthogonal exactly when the
/// complex matrix is unitary.
pub(crate) fn complex_to_real_block(w: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = w.nrows();
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = w[(i, j)];
            m[(i, j)] = z.re;
            m[(i, j + n)] = -z.im;
            m[(i + n, j)] = z.im;
            m[(i + n, j + n)] = z.re;
        }
    }
    m
}

/// Modified Gram-Schmidt over the complex field with one re-orthogonalization
/// pass. Columns with negligible residual norm are rejected by the caller via
/// the returned norms.
pub(crate) fn complex_mgs(m: &DMatrix<Complex64>) -> (DMatrix<Complex64>, Vec<f64>) {
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut q = m.clone();
    let mut norms = Vec::with_capacity(cols);
    for j in 0..cols {
        for _pass in 0..2 {
            for i in 0..j {
                let qi = q.column(i).into_owned();
                let proj: Complex64 = qi.iter().zip(q.column(j).iter()).map(|(a, b)| a.conj() * b).sum();
                let update = DVector::from_fn(rows, |r, _| q.column(j)[r] - proj * qi[r]);
                q.set_column(j, &update);
            }
        }
        let norm = q.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        norms.push(norm);
        if norm > 0.0 {
            let scaled = DVector::from_fn(rows, |r, _| q.column(j)[r] / norm);
            q.set_column(j, &scaled);
        }
    }
    (q, norms)
}
