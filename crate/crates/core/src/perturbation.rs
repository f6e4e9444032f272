//! Unitary transport between Lagrangians and transversality restoration.
//!
//! Given Lagrangians L0 and L, the compression `T1 = P_L|_{L0}` may be
//! singular; a finite-rank correction K (raising every singular value of T1
//! below a floor up to the floor) makes `T2 = T1 + K` invertible. Extending
//! complex-linearly by `T = T2 P_{L0} - J T2 J P_{L0}^perp` and taking the
//! orthogonal polar factor `U = T (T^T T)^{-1/2}` produces an orthogonal,
//! J-commuting matrix with `U(L0) = L` and
//! `rank(U - I) <= 3 rank(T - I)` — transport that stays close to the
//! identity whenever T does.
//!
//! The square root is available through two independent routes: the
//! classical monotone fixed-point iteration `B <- B + (A/c - B^2)/2` (scaled
//! so the iteration contracts) and a spectral decomposition. The iteration
//! converges linearly at rate `1 - sqrt(lambda_min/c)`, so for spectra
//! reaching far below 1 it can exceed its iteration budget — that is
//! reported as an error, never papered over; the spectral route is the
//! default inside [`transitive_unitary`] and serves as the oracle for the
//! iterative one in tests.
//!
//! [`complementary_perturbation`] restores transversality: given (L0, L1)
//! with nontrivial intersection, it picks a common complement L2, reads L1
//! in the chart around (L0, L2), adds the projection onto the chart value's
//! kernel, and maps back — moving L1 by a projection-rank at most twice the
//! intersection dimension.

use nalgebra::DMatrix;

use crate::charts::{chart, chart_inverse, is_transverse, ComplementaryPair};
use crate::error::{Error, Result};
use crate::linalg;
use crate::symplectic::{apply_unitary, random_unitary_j, LagrangianFrame};

/// Default singular-value floor for the correction K.
pub const DEFAULT_SV_FLOOR: f64 = 1e-3;

/// Candidate budget for the common-complement search.
pub const MAX_COMPLEMENT_TRIES: usize = 64;

/// Margin used for the complement search inside
/// [`complementary_perturbation`].
pub const DEFAULT_COMPLEMENT_MARGIN: f64 = 1e-3;

/// How a positive-semidefinite square root is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqrtMethod {
    /// Scaled monotone iteration `B <- B + (A/c - B^2)/2` from B = 0.
    Iterative,
    /// Symmetric eigendecomposition with clamped nonnegative spectrum.
    Spectral,
}

/// Convergence budget for the iterative square root.
#[derive(Debug, Clone, Copy)]
pub struct SqrtOptions {
    /// Required residual `||S S - A||` (spectral norm) of the returned root.
    pub tol: f64,
    /// Iteration budget; exceeding it is an error.
    pub max_iter: usize,
}

impl Default for SqrtOptions {
    fn default() -> Self {
        SqrtOptions {
            tol: 1e-9,
            max_iter: 200,
        }
    }
}

// Validation tolerances for raw-matrix inputs, which carry no space.
const RAW_SYM_TOL: f64 = 1e-10;

fn ensure_symmetric(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {} x {}",
            a.nrows(),
            a.ncols()
        )));
    }
    let scale = linalg::max_abs(a).max(1.0);
    let asym = linalg::max_abs(&(a - a.transpose()));
    if asym > RAW_SYM_TOL * scale {
        return Err(Error::NotSymmetric {
            residual: asym,
            tol: RAW_SYM_TOL * scale,
        });
    }
    Ok(())
}

/// Spectral square root together with the inverse root, sharing one
/// eigendecomposition. `min_eig` guards positivity for the inverse.
fn spectral_sqrt(a: &DMatrix<f64>, with_inverse: bool) -> Result<(DMatrix<f64>, Option<DMatrix<f64>>)> {
    let scale = linalg::max_abs(a).max(1.0);
    let (vals, vecs) = linalg::symmetric_eigen_sorted(a)?;
    if let Some(&min) = vals.first() {
        if min < -RAW_SYM_TOL * scale {
            return Err(Error::NotPositiveSemidefinite { min_eig: min });
        }
    }
    let n = a.nrows();
    let roots: Vec<f64> = vals.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let diag = |entries: &[f64]| DMatrix::from_fn(n, n, |i, j| if i == j { entries[i] } else { 0.0 });
    let s = &vecs * diag(&roots) * vecs.transpose();
    let s = (&s + s.transpose()) * 0.5;
    let inv = if with_inverse {
        let inv_roots: Vec<f64> = roots
            .iter()
            .map(|&r| if r > 0.0 { 1.0 / r } else { 0.0 })
            .collect();
        let si = &vecs * diag(&inv_roots) * vecs.transpose();
        Some((&si + si.transpose()) * 0.5)
    } else {
        None
    };
    Ok((s, inv))
}

/// Square root of a symmetric positive-semidefinite matrix.
pub fn sqrt_psd(a: &DMatrix<f64>, method: SqrtMethod) -> Result<DMatrix<f64>> {
    sqrt_psd_with(a, method, &SqrtOptions::default())
}

/// [`sqrt_psd`] with an explicit convergence budget for the iterative route.
pub fn sqrt_psd_with(
    a: &DMatrix<f64>,
    method: SqrtMethod,
    opts: &SqrtOptions,
) -> Result<DMatrix<f64>> {
    ensure_symmetric(a)?;
    match method {
        SqrtMethod::Spectral => Ok(spectral_sqrt(a, false)?.0),
        SqrtMethod::Iterative => {
            // Positivity precondition, checked on the spectrum.
            let (vals, _) = linalg::symmetric_eigen_sorted(a)?;
            let scale = linalg::max_abs(a).max(1.0);
            if let Some(&min) = vals.first() {
                if min < -RAW_SYM_TOL * scale {
                    return Err(Error::NotPositiveSemidefinite { min_eig: min });
                }
            }
            let n = a.nrows();
            let c = linalg::spectral_norm(a)?.max(1.0);
            let a_hat = a / c;
            let mut b = DMatrix::<f64>::zeros(n, n);
            let mut residual = f64::INFINITY;
            for _ in 0..opts.max_iter {
                let defect = &a_hat - &b * &b;
                residual = c * linalg::spectral_norm(&defect)?;
                if residual <= opts.tol {
                    let s = b * c.sqrt();
                    return Ok((&s + s.transpose()) * 0.5);
                }
                b += defect * 0.5;
            }
            // One last check: the loop above tests before updating.
            let defect = &a_hat - &b * &b;
            residual = residual.min(c * linalg::spectral_norm(&defect)?);
            if residual <= opts.tol {
                let s = b * c.sqrt();
                return Ok((&s + s.transpose()) * 0.5);
            }
            Err(Error::SqrtDiverged {
                max_iter: opts.max_iter,
                residual,
            })
        }
    }
}

/// Polar decomposition T = U S of an invertible matrix: S = sqrt(T^T T)
/// (spectral route) and U = T S^{-1}, orthogonal.
pub fn polar_unitary(t: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if t.nrows() != t.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "polar_unitary: expected square, got {} x {}",
            t.nrows(),
            t.ncols()
        )));
    }
    let tol_rank = crate::symplectic::Tolerances::default().rank;
    let sv = linalg::singular_values(t)?;
    if sv.last().copied().unwrap_or(0.0) <= tol_rank {
        return Err(Error::RankDeficient(format!(
            "polar_unitary: smallest singular value {:.3e} is not above {tol_rank:.1e}",
            sv.last().copied().unwrap_or(0.0)
        )));
    }
    let (s, s_inv) = spectral_sqrt(&(t.transpose() * t), true)?;
    let u = t * s_inv.expect("inverse requested");
    Ok((u, s))
}

/// A matrix bundled with a declared upper bound for the rank of its
/// deviation from the identity.
#[derive(Debug, Clone)]
pub struct RankTracked {
    pub matrix: DMatrix<f64>,
    /// Declared bound on `rank(matrix - I)` at the rank tolerance.
    pub rank_bound: usize,
}

impl RankTracked {
    /// Numerical rank of `matrix - I` at the given tolerance.
    pub fn defect_rank(&self, tol_rank: f64) -> Result<usize> {
        let n = self.matrix.nrows();
        linalg::rank_at(&(&self.matrix - DMatrix::identity(n, n)), tol_rank)
    }

    /// Whether the declared bound holds numerically.
    pub fn bound_holds(&self, tol_rank: f64) -> Result<bool> {
        Ok(self.defect_rank(tol_rank)? <= self.rank_bound)
    }
}

/// Output of [`transitive_unitary`]: the transport U, the extended operator
/// T, its polar positive factor S, and the rank of the correction K.
///
/// Bounds: `rank(T - I)` is computed; S carries `2 rank(T - I)` (from
/// S^2 - I = T^T(T - I) + (T^T - I) and spectral calculus); U carries
/// `3 rank(T - I)` (from U - I = (T - I)S^{-1} + (S^{-1} - I)).
#[derive(Debug, Clone)]
pub struct TransportResult {
    pub u: RankTracked,
    pub t: RankTracked,
    pub s: RankTracked,
    /// Number of singular values of T1 raised by the correction.
    pub k_rank: usize,
}

/// Orthogonal J-commuting transport with `U(L0) = L`.
///
/// `sv_floor` is the singular-value floor for the correction K; the floor
/// also bounds the spectrum of T^T T away from zero (by its square), which
/// is what keeps the polar step well-conditioned.
pub fn transitive_unitary(
    l0: &LagrangianFrame,
    l: &LagrangianFrame,
    sv_floor: f64,
) -> Result<TransportResult> {
    if l0.n() != l.n() {
        return Err(Error::DimensionMismatch(format!(
            "transitive_unitary: n = {} vs n = {}",
            l0.n(),
            l.n()
        )));
    }
    if !(sv_floor > 0.0) {
        return Err(Error::InvalidArgument(
            "sv_floor must be strictly positive".into(),
        ));
    }
    let space = l0.space();
    let dim = space.dim();
    let tol_rank = space.tolerances().rank;

    // T1 = P_L|_{L0} in the frames: Q_L^T Q_0, singular values = principal
    // cosines. Raise every singular value below the floor up to the floor.
    let t1 = l.q().transpose() * l0.q();
    let (u_sv, sv, v_t) = linalg::svd_parts(&t1)?;
    let k_rank = sv.iter().filter(|&&s| s < sv_floor).count();
    let floored: Vec<f64> = sv.iter().map(|&s| s.max(sv_floor)).collect();
    let n = l0.n();
    let sigma = DMatrix::from_fn(n, n, |i, j| if i == j { floored[i] } else { 0.0 });
    let b2 = &u_sv * sigma * &v_t;

    // Complex-linear extension: T = M - J M J with M = Q_L B2 Q0^T kills
    // nothing it shouldn't — it maps L0 to L and J L0 to J L by the same
    // coefficients, and commutes with J by construction.
    let m = l.q() * &b2 * l0.q().transpose();
    let t = &m - space.j() * &m * space.j();

    let (s, s_inv) = spectral_sqrt(&(t.transpose() * &t), true)?;
    let u = &t * s_inv.expect("inverse requested");

    let r_t = linalg::rank_at(&(&t - DMatrix::identity(dim, dim)), tol_rank)?;
    Ok(TransportResult {
        u: RankTracked {
            matrix: u,
            rank_bound: 3 * r_t,
        },
        t: RankTracked {
            matrix: t,
            rank_bound: r_t,
        },
        s: RankTracked {
            matrix: s,
            rank_bound: 2 * r_t,
        },
        k_rank,
    })
}

/// A Lagrangian transverse to both inputs with at least the requested
/// minimum gap. Candidates are J L0, J L1, then seeded unitary images of
/// J L0; the first passing candidate wins, deterministically per seed.
pub fn find_common_complement(
    l0: &LagrangianFrame,
    l1: &LagrangianFrame,
    seed: u64,
    margin: f64,
) -> Result<LagrangianFrame> {
    if l0.n() != l1.n() {
        return Err(Error::DimensionMismatch(format!(
            "find_common_complement: n = {} vs n = {}",
            l0.n(),
            l1.n()
        )));
    }
    let space = l0.space();
    let accept = |cand: &LagrangianFrame| -> Result<bool> {
        Ok(is_transverse(cand, l0, margin)? && is_transverse(cand, l1, margin)?)
    };
    for cand in [l0.j_image(), l1.j_image()] {
        if accept(&cand)? {
            return Ok(cand);
        }
    }
    let base = l0.j_image();
    for i in 0..MAX_COMPLEMENT_TRIES {
        let u = random_unitary_j(space, seed.wrapping_add(i as u64));
        let cand = apply_unitary(&u, &base)?;
        if accept(&cand)? {
            return Ok(cand);
        }
    }
    Err(Error::ComplementExhausted {
        tries: MAX_COMPLEMENT_TRIES + 2,
        margin,
    })
}

/// Minimal perturbation of L1 restoring transversality to L0.
///
/// Reads L1 in the chart around (L0, L2) for a common complement L2, adds
/// the projection onto the chart value's kernel, and maps back. Already
/// transverse inputs come back unchanged as subspaces; in general the
/// projections differ by rank at most `2 dim(L0 cap L1)`.
pub fn complementary_perturbation(
    l0: &LagrangianFrame,
    l1: &LagrangianFrame,
    seed: u64,
) -> Result<LagrangianFrame> {
    let tol_rank = l0.space().tolerances().rank;
    let l2 = find_common_complement(l0, l1, seed, DEFAULT_COMPLEMENT_MARGIN)?;
    let pair = ComplementaryPair::new(l0.clone(), l2)?;
    let value = chart(&pair, l1)?;

    // Projection onto ker A from the small eigenvalues of the symmetric
    // chart value.
    let (vals, vecs) = linalg::symmetric_eigen_sorted(value.a())?;
    let n = l0.n();
    let mut p_ker = DMatrix::<f64>::zeros(n, n);
    for (idx, &lambda) in vals.iter().enumerate() {
        if lambda.abs() <= tol_rank {
            let v = vecs.column(idx);
            p_ker += v * v.transpose();
        }
    }
    let shifted = value.a() + p_ker;
    chart_inverse(&pair, &shifted)
}
