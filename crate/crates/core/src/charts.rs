//! Graph coordinates around a complementary Lagrangian pair.
//!
//! Fix complementary Lagrangians (L0, L1). Every Lagrangian L transverse to
//! L1 is the graph of a unique map S : L0 -> L1, i.e. L = { u + S u }. The
//! chart value of L is the matrix of `P_{L0} J S` in the frame of L0 — an
//! n x n *symmetric* matrix A, because the graph condition forces
//! self-adjointness. The chart is a bijection onto symmetric matrices:
//! `(P_{L0} J)|_{L1}` is invertible for any complementary pair, so S is
//! recovered from A by one linear solve.
//!
//! The kernel of A is the intersection L with L0 (in L0-coordinates), and
//! the chart value controls the minimum gap between L and L0 from both
//! sides:
//!
//! ```text
//! gamma(P J S) / ||I + S||  <=  gap(L, L0)  <=  gamma(P J S) / gap(L0, L1)
//! ```
//!
//! where `gamma` is the reduced minimum modulus and `||I + S||` the operator
//! norm of the graph embedding u -> u + S u. [`gap_inequality_report`]
//! evaluates all five scalars and both verdicts.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::symplectic::{
    intersection_dim, minimum_gap, reduced_min_modulus, LagrangianFrame,
};

/// Default floor for the minimum gap of a complementary pair.
pub const DEFAULT_GAP_FLOOR: f64 = 1e-6;

/// A pair of Lagrangians with trivial intersection and a certified gap.
#[derive(Debug, Clone)]
pub struct ComplementaryPair {
    l0: LagrangianFrame,
    l1: LagrangianFrame,
    margin: f64,
}

impl ComplementaryPair {
    /// Validates `dim(L0 cap L1) = 0` and `gap(L0, L1) >` [`DEFAULT_GAP_FLOOR`].
    pub fn new(l0: LagrangianFrame, l1: LagrangianFrame) -> Result<Self> {
        Self::with_gap_floor(l0, l1, DEFAULT_GAP_FLOOR)
    }

    pub fn with_gap_floor(
        l0: LagrangianFrame,
        l1: LagrangianFrame,
        gap_floor: f64,
    ) -> Result<Self> {
        let d = intersection_dim(&l0, &l1)?;
        let margin = minimum_gap(&l0, &l1)?;
        if d != 0 || margin <= gap_floor {
            let gap = if d != 0 { 0.0 } else { margin };
            return Err(Error::NotComplementary {
                gap,
                floor: gap_floor,
            });
        }
        Ok(ComplementaryPair { l0, l1, margin })
    }

    pub fn l0(&self) -> &LagrangianFrame {
        &self.l0
    }

    pub fn l1(&self) -> &LagrangianFrame {
        &self.l1
    }

    /// The certified minimum gap between the two Lagrangians.
    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// The n x n matrix of `(P_{L0} J)|_{L1}` in the frames: Q0^T J Q1.
    fn projected_j(&self) -> DMatrix<f64> {
        self.l0.q().transpose() * self.l0.space().j() * self.l1.q()
    }
}

/// The graph map S : L0 -> L1 of a Lagrangian L transverse to L1, stored as
/// its coefficient matrix B: `S(Q0 c) = Q1 B c`.
#[derive(Debug, Clone)]
pub struct GraphMap {
    pair: ComplementaryPair,
    b: DMatrix<f64>,
}

impl GraphMap {
    pub fn pair(&self) -> &ComplementaryPair {
        &self.pair
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    /// The 2n x n matrix Q0 + Q1 B of the graph embedding u -> u + S u in
    /// the frame of L0. Its columns span L; its largest singular value is
    /// the operator norm ||I + S||.
    pub fn embedding(&self) -> DMatrix<f64> {
        self.pair.l0.q() + self.pair.l1.q() * &self.b
    }
}

/// The chart value of a Lagrangian: the symmetric matrix A of `P_{L0} J S`
/// in the frame of L0.
#[derive(Debug, Clone)]
pub struct ChartValue {
    pair: ComplementaryPair,
    a: DMatrix<f64>,
}

impl ChartValue {
    pub fn pair(&self) -> &ComplementaryPair {
        &self.pair
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }
}

/// True when `dim(L cap M) = 0` and `gap(L, M) >= margin`.
pub fn is_transverse(l: &LagrangianFrame, m: &LagrangianFrame, margin: f64) -> Result<bool> {
    Ok(intersection_dim(l, m)? == 0 && minimum_gap(l, m)? >= margin)
}

/// Writes L as the graph of S : L0 -> L1. Decomposes the frame of L along
/// L0 + L1 as Q = Q0 C0 + Q1 C1; transversality to L1 makes C0 invertible
/// and B = C1 C0^{-1}.
pub fn graph_map(l: &LagrangianFrame, pair: &ComplementaryPair) -> Result<GraphMap> {
    let n = pair.l0.n();
    if l.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "graph_map: L has n = {}, pair has n = {n}",
            l.n()
        )));
    }
    let tol_rank = pair.l0.space().tolerances().rank;
    let mut basis = DMatrix::<f64>::zeros(2 * n, 2 * n);
    basis.view_mut((0, 0), (2 * n, n)).copy_from(pair.l0.q());
    basis.view_mut((0, n), (2 * n, n)).copy_from(pair.l1.q());
    // Coordinates of L's frame in the splitting L0 + L1.
    let coords = linalg::solve_lu(&basis, l.q())?;
    let c0 = coords.view((0, 0), (n, n)).into_owned();
    let c1 = coords.view((n, 0), (n, n)).into_owned();
    let sv = linalg::singular_values(&c0)?;
    if sv.last().copied().unwrap_or(0.0) <= tol_rank {
        return Err(Error::NotTransverse(format!(
            "L meets L1: graph solve is singular at tolerance {tol_rank:.1e}"
        )));
    }
    // B = C1 C0^{-1}, solved as C0^T B^T = C1^T.
    let b = linalg::solve_lu(&c0.transpose(), &c1.transpose())?.transpose();
    Ok(GraphMap {
        pair: pair.clone(),
        b,
    })
}

/// Chart value A = Q0^T J Q1 B of a Lagrangian transverse to L1. Symmetry
/// is validated (scaled by the size of A, which grows like the inverse gap
/// to L1 near the chart boundary).
pub fn chart(pair: &ComplementaryPair, l: &LagrangianFrame) -> Result<ChartValue> {
    let g = graph_map(l, pair)?;
    let a = pair.projected_j() * g.b();
    let tol = pair.l0.space().tolerances().frame;
    let scale = linalg::max_abs(&a).max(1.0);
    let asym = linalg::max_abs(&(&a - a.transpose()));
    if asym > tol * scale {
        return Err(Error::NotSymmetric {
            residual: asym,
            tol: tol * scale,
        });
    }
    Ok(ChartValue {
        pair: pair.clone(),
        a: (&a + a.transpose()) * 0.5,
    })
}

/// Inverse chart: recovers the Lagrangian with chart value A by solving
/// `(Q0^T J Q1) B = A` and orthonormalizing the graph columns Q0 + Q1 B.
pub fn chart_inverse(pair: &ComplementaryPair, a: &DMatrix<f64>) -> Result<LagrangianFrame> {
    let n = pair.l0.n();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "chart_inverse: expected {n} x {n}, got {} x {}",
            a.nrows(),
            a.ncols()
        )));
    }
    let tol = pair.l0.space().tolerances().frame;
    let scale = linalg::max_abs(a).max(1.0);
    let asym = linalg::max_abs(&(a - a.transpose()));
    if asym > tol * scale {
        return Err(Error::NotSymmetric {
            residual: asym,
            tol: tol * scale,
        });
    }
    let b = linalg::solve_lu(&pair.projected_j(), a)?;
    let columns = pair.l0.q() + pair.l1.q() * b;
    LagrangianFrame::from_matrix(pair.l0.space(), &columns)
}

/// The five scalars of the two-sided gap estimate, with verdicts.
#[derive(Debug, Clone)]
pub struct GapReport {
    /// dim ker A at the rank tolerance; equals dim(L cap L0).
    pub dim_ker_a: usize,
    /// gap(L, L0).
    pub gap_l_l0: f64,
    /// Reduced minimum modulus of A; +infinity when A is numerically zero
    /// (L = L0), flagged by `degenerate`.
    pub reduced_modulus: f64,
    /// ||I + S|| = largest singular value of the graph embedding Q0 + Q1 B.
    pub graph_norm: f64,
    /// gap(L0, L1), the pair's margin.
    pub gap_l0_l1: f64,
    /// reduced_modulus / graph_norm <= gap_l_l0 + slack.
    pub lower_holds: bool,
    /// gap_l_l0 <= reduced_modulus / gap_l0_l1 + slack.
    pub upper_holds: bool,
    /// A is numerically zero, so the modulus is the +infinity sentinel and
    /// both verdicts are vacuous.
    pub degenerate: bool,
    /// Additive slack used in the verdicts (the frame tolerance).
    pub slack: f64,
}

/// Evaluates both gap inequalities for L in the chart around (L0, L1).
pub fn gap_inequality_report(pair: &ComplementaryPair, l: &LagrangianFrame) -> Result<GapReport> {
    let tol = pair.l0.space().tolerances();
    let value = chart(pair, l)?;
    let g = graph_map(l, pair)?;
    let sv_a = linalg::singular_values(value.a())?;
    let dim_ker_a = sv_a.iter().filter(|&&s| s <= tol.rank).count();
    let gap_l_l0 = minimum_gap(l, pair.l0())?;
    let reduced_modulus = reduced_min_modulus(value.a(), tol.rank)?;
    let graph_norm = linalg::spectral_norm(&g.embedding())?;
    let gap_l0_l1 = pair.margin();
    let degenerate = reduced_modulus.is_infinite();
    let slack = tol.frame;
    let (lower_holds, upper_holds) = if degenerate {
        (true, true)
    } else {
        (
            reduced_modulus / graph_norm <= gap_l_l0 + slack,
            gap_l_l0 <= reduced_modulus / gap_l0_l1 + slack,
        )
    };
    Ok(GapReport {
        dim_ker_a,
        gap_l_l0,
        reduced_modulus,
        graph_norm,
        gap_l0_l1,
        lower_holds,
        upper_holds,
        degenerate,
        slack,
    })
}
