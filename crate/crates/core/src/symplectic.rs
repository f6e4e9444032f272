//! Symplectic vector spaces and Lagrangian subspaces.
//!
//! The model space is R^{2n} with coordinates (x_1..x_n, y_1..y_n) and the
//! complex structure `J e_k = e_{n+k}`, `J e_{n+k} = -e_k` (so J^2 = -I and
//! J^T = -J). The symplectic form is `omega(u, v) = <J u, v>`. A subspace L
//! is Lagrangian when omega vanishes on it and dim L = n; equivalently
//! `J L = L^perp`, or in terms of the orthogonal projection P onto L,
//! `P - J P J = I`.
//!
//! Lagrangians are stored as orthonormal frames: a 2n x n matrix Q with
//! `Q^T Q = I` and `Q^T J Q = 0`. The projection is `P = Q Q^T`. Frame choice
//! is a right O(n) gauge; every operation here is gauge-invariant.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg;

/// Validation and rank-decision tolerances, carried by the space and
/// inherited by every frame built in it.
///
/// `frame` bounds residuals of exact identities (orthonormality, isotropy,
/// symmetry); `rank` is the threshold for rank and singular-value decisions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub frame: f64,
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            frame: 1e-10,
            rank: 1e-8,
        }
    }
}

/// R^{2n} with the standard complex structure and the induced symplectic
/// form `omega(u, v) = <J u, v>`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpace {
    n: usize,
    j: DMatrix<f64>,
    tol: Tolerances,
}

impl SymplecticSpace {
    /// Space of complex dimension `n` (real dimension 2n) with default
    /// tolerances.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_tolerances(n, Tolerances::default())
    }

    pub fn with_tolerances(n: usize, tol: Tolerances) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch("n must be at least 1".into()));
        }
        if !(tol.frame > 0.0 && tol.rank > 0.0) {
            return Err(Error::InvalidArgument(
                "tolerances must be strictly positive".into(),
            ));
        }
        let mut j = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for k in 0..n {
            j[(n + k, k)] = 1.0; // J e_k = e_{n+k}
            j[(k, n + k)] = -1.0; // J e_{n+k} = -e_k
        }
        Ok(SymplecticSpace { n, j, tol })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Real dimension 2n.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn j(&self) -> &DMatrix<f64> {
        &self.j
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    /// `omega(u, v) = <J u, v>`.
    pub fn omega(&self, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        if u.len() != self.dim() || v.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "omega needs vectors of length {}, got {} and {}",
                self.dim(),
                u.len(),
                v.len()
            )));
        }
        Ok((&self.j * u).dot(v))
    }

    /// The Lagrangian spanned by e_1..e_n (the x-axis subspace).
    pub fn standard_lagrangian(&self) -> LagrangianFrame {
        let mut q = DMatrix::<f64>::zeros(self.dim(), self.n);
        for k in 0..self.n {
            q[(k, k)] = 1.0;
        }
        LagrangianFrame {
            space: self.clone(),
            q,
        }
    }

    fn ensure_same(&self, other: &SymplecticSpace, what: &str) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "{what}: spaces have n = {} and n = {}",
                self.n, other.n
            )));
        }
        Ok(())
    }
}

/// An orthonormal frame for a Lagrangian subspace: Q is 2n x n with
/// `Q^T Q = I` and `Q^T J Q = 0`.
#[derive(Debug, Clone)]
pub struct LagrangianFrame {
    space: SymplecticSpace,
    q: DMatrix<f64>,
}

impl LagrangianFrame {
    /// Build a frame from exactly n linearly independent vectors spanning an
    /// isotropic subspace. The span is orthonormalized; the input need not be.
    pub fn from_basis(space: &SymplecticSpace, basis: &[DVector<f64>]) -> Result<Self> {
        if basis.len() != space.n() {
            return Err(Error::WrongVectorCount {
                expected: space.n(),
                got: basis.len(),
            });
        }
        for (i, v) in basis.iter().enumerate() {
            if v.len() != space.dim() {
                return Err(Error::DimensionMismatch(format!(
                    "basis vector {i} has length {}, expected {}",
                    v.len(),
                    space.dim()
                )));
            }
        }
        let m = DMatrix::from_fn(space.dim(), space.n(), |i, j| basis[j][i]);
        Self::from_matrix(space, &m)
    }

    /// Build a frame from a 2n x n matrix whose columns span the subspace.
    pub fn from_matrix(space: &SymplecticSpace, m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != space.dim() || m.ncols() != space.n() {
            return Err(Error::DimensionMismatch(format!(
                "expected a {} x {} matrix, got {} x {}",
                space.dim(),
                space.n(),
                m.nrows(),
                m.ncols()
            )));
        }
        let (q, rank) = linalg::orthonormal_columns(m, space.tol.rank)?;
        if rank < space.n() {
            return Err(Error::RankDeficient(format!(
                "span has rank {rank}, expected {}",
                space.n()
            )));
        }
        let iso = linalg::max_abs(&(q.transpose() * space.j() * &q));
        if iso > space.tol.frame {
            return Err(Error::NotIsotropic {
                residual: iso,
                tol: space.tol.frame,
            });
        }
        Ok(LagrangianFrame {
            space: space.clone(),
            q,
        })
    }

    /// Accept a matrix that is already an orthonormal Lagrangian frame,
    /// validating both invariants at the space's frame tolerance.
    pub fn from_orthonormal(space: &SymplecticSpace, q: DMatrix<f64>) -> Result<Self> {
        if q.nrows() != space.dim() || q.ncols() != space.n() {
            return Err(Error::DimensionMismatch(format!(
                "expected a {} x {} frame, got {} x {}",
                space.dim(),
                space.n(),
                q.nrows(),
                q.ncols()
            )));
        }
        let gram = linalg::max_abs(&(q.transpose() * &q - DMatrix::identity(space.n(), space.n())));
        if gram > space.tol.frame {
            return Err(Error::NotOrthonormal {
                residual: gram,
                tol: space.tol.frame,
            });
        }
        let iso = linalg::max_abs(&(q.transpose() * space.j() * &q));
        if iso > space.tol.frame {
            return Err(Error::NotIsotropic {
                residual: iso,
                tol: space.tol.frame,
            });
        }
        Ok(LagrangianFrame {
            space: space.clone(),
            q,
        })
    }

    /// A seeded pseudo-random Lagrangian: the image of the standard one
    /// under [`random_unitary_j`]. Identical seeds give identical frames.
    pub fn random(space: &SymplecticSpace, seed: u64) -> Self {
        let u = random_unitary_j(space, seed);
        let q = u.columns(0, space.n()).into_owned();
        LagrangianFrame {
            space: space.clone(),
            q,
        }
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    /// Orthogonal projection P = Q Q^T onto the subspace.
    pub fn projection(&self) -> DMatrix<f64> {
        &self.q * self.q.transpose()
    }

    /// J L, again Lagrangian, with frame J Q. For a Lagrangian this is the
    /// orthogonal complement, so the gap to the original subspace is 1.
    pub fn j_image(&self) -> LagrangianFrame {
        LagrangianFrame {
            space: self.space.clone(),
            q: self.space.j() * &self.q,
        }
    }

    /// The complex n x n matrix X + iY from the frame blocks Q = [X; Y].
    /// The frame invariants make it unitary, and L = W(L_std) under the
    /// identification R^{2n} = C^n.
    pub(crate) fn complex_unitary(&self) -> DMatrix<Complex64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, j| Complex64::new(self.q[(i, j)], self.q[(i + n, j)]))
    }
}

/// Intersection and complement bookkeeping for a pair of Lagrangians.
/// `index = dim_intersection - dim_cokernel` vanishes in finite dimension;
/// both sides are computed independently so the identity is a live check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairData {
    pub dim_intersection: usize,
    pub dim_cokernel: usize,
    pub index: i64,
}

/// dim(L intersect L'): the number of singular values of Q^T Q' within
/// `tol.rank` of 1.
pub fn intersection_dim(a: &LagrangianFrame, b: &LagrangianFrame) -> Result<usize> {
    a.space().ensure_same(b.space(), "intersection_dim")?;
    let tol = a.space().tolerances().rank;
    let sv = linalg::singular_values(&(a.q().transpose() * b.q()))?;
    Ok(sv.iter().filter(|&&s| s >= 1.0 - tol).count())
}

/// Intersection dimension, cokernel dimension 2n - dim(L + L'), and their
/// difference. The two dimensions come from separate SVDs.
pub fn pair_data(a: &LagrangianFrame, b: &LagrangianFrame) -> Result<PairData> {
    a.space().ensure_same(b.space(), "pair_data")?;
    let tol = a.space().tolerances().rank;
    let dim_intersection = intersection_dim(a, b)?;
    let n = a.n();
    let mut stacked = DMatrix::<f64>::zeros(2 * n, 2 * n);
    stacked.view_mut((0, 0), (2 * n, n)).copy_from(a.q());
    stacked.view_mut((0, n), (2 * n, n)).copy_from(b.q());
    let dim_sum = linalg::rank_at(&stacked, tol)?;
    let dim_cokernel = 2 * n - dim_sum;
    Ok(PairData {
        dim_intersection,
        dim_cokernel,
        index: dim_intersection as i64 - dim_cokernel as i64,
    })
}

/// Minimum gap between two subspaces given by orthonormal frames: the sine
/// of the smallest principal angle between M minus (M intersect N) and N.
/// Directions of M lying in N (cosine within `tol_rank` of 1) are removed
/// first; if everything is removed (M inside N) the gap is 1 by convention.
///
/// This equals `inf over u in M, u not in N of dist(u, N) / dist(u, M cap N)`
/// and is symmetric in its arguments.
pub fn minimum_gap_frames(
    qm: &DMatrix<f64>,
    qn: &DMatrix<f64>,
    tol_rank: f64,
) -> Result<f64> {
    if qm.nrows() != qn.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "frames live in different ambient dimensions {} and {}",
            qm.nrows(),
            qn.nrows()
        )));
    }
    let c = qm.transpose() * qn;
    let (u, sv, _) = linalg::svd_parts(&c)?;
    let d = sv.iter().filter(|&&s| s >= 1.0 - tol_rank).count();
    if d == qm.ncols() {
        return Ok(1.0); // M is contained in N
    }
    // Orthogonal complement of the intersection inside M: drop the principal
    // directions with cosine ~ 1, keep the rest of the frame.
    let reduced = if d == 0 {
        qm.clone()
    } else {
        let inter = qm * u.columns(0, d);
        let residual = qm - &inter * (inter.transpose() * qm);
        let (basis, rank) = linalg::orthonormal_columns(&residual, tol_rank)?;
        debug_assert_eq!(rank, qm.ncols() - d);
        basis
    };
    let cos_max = linalg::singular_values(&(reduced.transpose() * qn))?
        .first()
        .copied()
        .unwrap_or(0.0)
        .clamp(0.0, 1.0);
    Ok((1.0 - cos_max * cos_max).sqrt())
}

/// [`minimum_gap_frames`] for Lagrangian frames, using the space's rank
/// tolerance.
pub fn minimum_gap(a: &LagrangianFrame, b: &LagrangianFrame) -> Result<f64> {
    a.space().ensure_same(b.space(), "minimum_gap")?;
    minimum_gap_frames(a.q(), b.q(), a.space().tolerances().rank)
}

/// Smallest singular value above `tol_rank` (the reduced minimum modulus).
/// Returns +infinity when every singular value is at or below the threshold,
/// i.e. for the numerically zero matrix.
pub fn reduced_min_modulus(t: &DMatrix<f64>, tol_rank: f64) -> Result<f64> {
    let sv = linalg::singular_values(t)?;
    Ok(sv
        .iter()
        .rev()
        .find(|&&s| s > tol_rank)
        .copied()
        .unwrap_or(f64::INFINITY))
}

/// Image of a Lagrangian under an orthogonal, J-commuting matrix. Both
/// properties are validated at the space's frame tolerance; the image frame
/// is U Q and the image projection is U P U^T.
pub fn apply_unitary(u: &DMatrix<f64>, l: &LagrangianFrame) -> Result<LagrangianFrame> {
    let space = l.space();
    let dim = space.dim();
    if u.nrows() != dim || u.ncols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "expected a {dim} x {dim} matrix, got {} x {}",
            u.nrows(),
            u.ncols()
        )));
    }
    let tol = space.tolerances().frame;
    let ortho = linalg::max_abs(&(u.transpose() * u - DMatrix::identity(dim, dim)));
    if ortho > tol {
        return Err(Error::NotOrthogonal {
            residual: ortho,
            tol,
        });
    }
    let commute = linalg::max_abs(&(u * space.j() - space.j() * u));
    if commute > tol {
        return Err(Error::NotComplexLinear {
            residual: commute,
            tol,
        });
    }
    LagrangianFrame::from_orthonormal(space, u * l.q())
}

/// Seeded pseudo-random orthogonal J-commuting 2n x 2n matrix: a complex
/// n x n Gaussian matrix is orthonormalized and embedded as
/// [[A, -B], [B, A]]. Identical seeds give bitwise-identical output.
pub fn random_unitary_j(space: &SymplecticSpace, seed: u64) -> DMatrix<f64> {
    let n = space.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = DMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let (w, norms) = linalg::complex_mgs(&g);
        // A Gaussian draw is singular with probability zero; redraw on the
        // pathological branch so the function is total.
        if norms.iter().all(|&nm| nm > 1e-8) {
            return linalg::complex_to_real_block(&w);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn line(space: &SymplecticSpace, theta: f64) -> LagrangianFrame {
        let v = DVector::from_vec(vec![theta.cos(), theta.sin()]);
        LagrangianFrame::from_basis(space, &[v]).unwrap()
    }

    #[test]
    fn omega_of_basis_vectors() {
        let s1 = SymplecticSpace::new(1).unwrap();
        let e1 = DVector::from_vec(vec![1.0, 0.0]);
        let e2 = DVector::from_vec(vec![0.0, 1.0]);
        // J e1 = e2 by the block form.
        assert_relative_eq!(s1.omega(&e1, &e2).unwrap(), 1.0);
        assert_relative_eq!(s1.omega(&e2, &e1).unwrap(), -1.0);
        assert_relative_eq!(s1.omega(&e1, &e1).unwrap(), 0.0);

        let s2 = SymplecticSpace::new(2).unwrap();
        let e = |k: usize| DVector::from_fn(4, |i, _| if i == k { 1.0 } else { 0.0 });
        // J e1 = e3 when n = 2.
        assert_relative_eq!(s2.omega(&e(0), &e(2)).unwrap(), 1.0);
        assert_relative_eq!(s2.omega(&e(0), &e(1)).unwrap(), 0.0);
        assert_relative_eq!(s2.omega(&e(2), &e(3)).unwrap(), 0.0);
    }

    #[test]
    fn omega_rejects_wrong_length() {
        let s = SymplecticSpace::new(2).unwrap();
        let short = DVector::from_vec(vec![1.0, 0.0]);
        let ok = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            s.omega(&short, &ok),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn j_squares_to_minus_identity_and_is_skew() {
        for n in 1..=4 {
            let s = SymplecticSpace::new(n).unwrap();
            let j = s.j();
            let jj = j * j;
            assert!(linalg::max_abs(&(jj + DMatrix::identity(2 * n, 2 * n))) < 1e-15);
            assert!(linalg::max_abs(&(j.transpose() + j)) < 1e-15);
        }
    }

    #[test]
    fn from_basis_accepts_diagonal_line() {
        let s = SymplecticSpace::new(1).unwrap();
        let l = LagrangianFrame::from_basis(&s, &[DVector::from_vec(vec![1.0, 1.0])]).unwrap();
        // Orthonormalized to +-(sqrt(2)/2, sqrt(2)/2).
        assert_relative_eq!(l.q()[(0, 0)].abs(), 0.5_f64.sqrt(), epsilon = 1e-14);
        let p = l.projection();
        assert_relative_eq!(p[(0, 1)], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn from_basis_rejects_wrong_count_and_non_isotropic() {
        let s1 = SymplecticSpace::new(1).unwrap();
        let e1 = DVector::from_vec(vec![1.0, 0.0]);
        let e2 = DVector::from_vec(vec![0.0, 1.0]);
        assert!(matches!(
            LagrangianFrame::from_basis(&s1, &[e1.clone(), e2.clone()]),
            Err(Error::WrongVectorCount { expected: 1, got: 2 })
        ));

        // span{e1, e2} in n = 2 has omega(e1, e2) = 0... use a genuinely
        // non-isotropic pair: omega(e1, e3) = 1.
        let s2 = SymplecticSpace::new(2).unwrap();
        let a = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let b = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]);
        assert!(matches!(
            LagrangianFrame::from_basis(&s2, &[a, b]),
            Err(Error::NotIsotropic { .. })
        ));
    }

    #[test]
    fn from_basis_rejects_dependent_spans() {
        let s = SymplecticSpace::new(2).unwrap();
        let a = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let b = DVector::from_vec(vec![2.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            LagrangianFrame::from_basis(&s, &[a, b]),
            Err(Error::RankDeficient(_))
        ));
    }

    #[test]
    fn lagrangian_projection_identity() {
        // P - J P J = I characterizes Lagrangian projections.
        let s = SymplecticSpace::new(3).unwrap();
        for seed in 0..8 {
            let l = LagrangianFrame::random(&s, seed);
            let p = l.projection();
            let residual = &p - s.j() * &p * s.j() - DMatrix::identity(6, 6);
            assert!(linalg::max_abs(&residual) < 1e-12);
        }
    }

    #[test]
    fn intersection_dim_examples() {
        let s = SymplecticSpace::new(1).unwrap();
        let l = line(&s, 0.0);
        assert_eq!(intersection_dim(&l, &l).unwrap(), 1);
        assert_eq!(intersection_dim(&l, &line(&s, 0.3)).unwrap(), 0);
    }

    #[test]
    fn pair_data_index_vanishes() {
        let s = SymplecticSpace::new(3).unwrap();
        for seed in 0..8 {
            let a = LagrangianFrame::random(&s, seed);
            let b = LagrangianFrame::random(&s, seed + 100);
            let d = pair_data(&a, &b).unwrap();
            assert_eq!(d.index, 0);
            assert_eq!(d.dim_intersection, d.dim_cokernel);
        }
        // Equal Lagrangians: intersection n, sum n, cokernel 2n - n = n.
        let a = LagrangianFrame::random(&s, 42);
        let d = pair_data(&a, &a).unwrap();
        assert_eq!(d.dim_intersection, 3);
        assert_eq!(d.dim_cokernel, 3);
        assert_eq!(d.index, 0);
    }

    #[test]
    fn minimum_gap_matches_direct_infimum_for_lines() {
        // Oracle: for M = span{e1} and N = span{(cos t, sin t)} the infimum
        // defining the gap is attained at u = e1 and equals |sin t|.
        let s = SymplecticSpace::new(1).unwrap();
        let m = line(&s, 0.0);
        for &theta in &[
            0.05,
            std::f64::consts::FRAC_PI_6,
            std::f64::consts::FRAC_PI_4,
            std::f64::consts::FRAC_PI_3,
            1.2,
            std::f64::consts::FRAC_PI_2,
            2.5,
            3.0,
        ] {
            let n = line(&s, theta);
            let gap = minimum_gap(&m, &n).unwrap();
            assert_relative_eq!(gap, theta.sin().abs(), epsilon = 1e-12);
        }
    }

    #[test]
    fn minimum_gap_conventions_and_symmetry() {
        let s = SymplecticSpace::new(2).unwrap();
        let a = LagrangianFrame::random(&s, 7);
        let b = LagrangianFrame::random(&s, 8);
        // Containment convention (equal Lagrangians): gap 1.
        assert_relative_eq!(minimum_gap(&a, &a).unwrap(), 1.0);
        // Orthogonal complement: all principal angles are pi/2.
        assert_relative_eq!(minimum_gap(&a, &a.j_image()).unwrap(), 1.0, epsilon = 1e-12);
        // Symmetry.
        let gab = minimum_gap(&a, &b).unwrap();
        let gba = minimum_gap(&b, &a).unwrap();
        assert_relative_eq!(gab, gba, epsilon = 1e-10);
        assert!((0.0..=1.0).contains(&gab));
    }

    #[test]
    fn minimum_gap_ignores_shared_directions() {
        // M and N share span{e1}; the reduced gap sees only the rotated
        // second factor, where the angle is theta.
        let s = SymplecticSpace::new(2).unwrap();
        let theta = 0.7_f64;
        let e = |k: usize| DVector::from_fn(4, |i, _| if i == k { 1.0 } else { 0.0 });
        let m = LagrangianFrame::from_basis(&s, &[e(0), e(1)]).unwrap();
        let rotated = DVector::from_vec(vec![0.0, theta.cos(), 0.0, theta.sin()]);
        let n = LagrangianFrame::from_basis(&s, &[e(0), rotated]).unwrap();
        assert_eq!(intersection_dim(&m, &n).unwrap(), 1);
        assert_relative_eq!(minimum_gap(&m, &n).unwrap(), theta.sin(), epsilon = 1e-12);
    }

    #[test]
    fn reduced_min_modulus_examples() {
        let m = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 1e-12]);
        // The 1e-12 singular value sits below the threshold and is ignored.
        assert_relative_eq!(reduced_min_modulus(&m, 1e-8).unwrap(), 3.0);
        let z = DMatrix::<f64>::zeros(2, 2);
        assert!(reduced_min_modulus(&z, 1e-8).unwrap().is_infinite());
        let id = DMatrix::<f64>::identity(3, 3);
        assert_relative_eq!(reduced_min_modulus(&id, 1e-8).unwrap(), 1.0);
    }

    #[test]
    fn apply_unitary_j_sends_e1_to_e2() {
        let s = SymplecticSpace::new(1).unwrap();
        let l = line(&s, 0.0);
        let image = apply_unitary(&s.j().clone(), &l).unwrap();
        assert_relative_eq!(image.q()[(1, 0)].abs(), 1.0, epsilon = 1e-14);
        assert!(image.q()[(0, 0)].abs() < 1e-14);
    }

    #[test]
    fn apply_unitary_rejects_non_orthogonal_and_non_commuting() {
        let s = SymplecticSpace::new(1).unwrap();
        let l = line(&s, 0.0);
        let scaled = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]);
        assert!(matches!(
            apply_unitary(&scaled, &l),
            Err(Error::NotOrthogonal { .. })
        ));
        // A reflection is orthogonal but anti-commutes with J.
        let reflect = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(
            apply_unitary(&reflect, &l),
            Err(Error::NotComplexLinear { .. })
        ));
    }

    #[test]
    fn apply_unitary_projection_identity() {
        let s = SymplecticSpace::new(2).unwrap();
        for seed in 0..6 {
            let l = LagrangianFrame::random(&s, seed);
            let u = random_unitary_j(&s, seed + 1000);
            let image = apply_unitary(&u, &l).unwrap();
            let expected = &u * l.projection() * u.transpose();
            assert!(linalg::max_abs(&(image.projection() - expected)) < 1e-12);
        }
    }

    #[test]
    fn random_unitary_j_is_deterministic_orthogonal_and_commutes() {
        let s = SymplecticSpace::new(3).unwrap();
        let a = random_unitary_j(&s, 17);
        let b = random_unitary_j(&s, 17);
        assert_eq!(a, b, "identical seeds must give bitwise-identical output");
        let c = random_unitary_j(&s, 18);
        assert_ne!(a, c);
        assert!(linalg::max_abs(&(a.transpose() * &a - DMatrix::identity(6, 6))) < 1e-12);
        assert!(linalg::max_abs(&(&a * s.j() - s.j() * &a)) < 1e-12);
    }

    #[test]
    fn complex_unitary_of_frame_is_unitary() {
        let s = SymplecticSpace::new(3).unwrap();
        let l = LagrangianFrame::random(&s, 5);
        let w = l.complex_unitary();
        let wh_w = w.adjoint() * &w;
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((wh_w[(i, j)].re - expected).abs() < 1e-12);
                assert!(wh_w[(i, j)].im.abs() < 1e-12);
            }
        }
    }
}
