//! Builders and independent oracles shared by the integration suites.
//!
//! Everything here is deliberately simple enough to verify by hand: frames
//! assembled coordinate plane by coordinate plane, gaps predicted from plane
//! angles, and smooth matrix paths with closed-form samples. The library is
//! then held to these predictions.
#![allow(dead_code)] // each test target uses its own subset

use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use maslov_core::{
    apply_unitary, random_unitary_j, LagrangianFrame, LagrangianPath, SymmetricPath,
    SymplecticSpace,
};

/// Frame whose i-th column is `cos(theta_i) e_i + sin(theta_i) e_{n+i}`:
/// one line per coordinate plane, exactly orthonormal and isotropic.
pub fn mixed_angle_frame(space: &SymplecticSpace, angles: &[f64]) -> LagrangianFrame {
    assert_eq!(angles.len(), space.n());
    let n = space.n();
    let q = DMatrix::from_fn(2 * n, n, |r, c| {
        if r == c {
            angles[c].cos()
        } else if r == n + c {
            angles[c].sin()
        } else {
            0.0
        }
    });
    LagrangianFrame::from_orthonormal(space, q).expect("mixed-angle frames are exact")
}

/// Analytic reduced-gap prediction for two mixed-angle frames. The planes
/// decouple: lines that agree exactly drop into the intersection, and the
/// gap of what remains is the smallest |sin(theta_i - phi_i)|; when every
/// line agrees the convention is 1. Callers must keep differing angles well
/// away from multiples of pi so the rank cut is unambiguous.
pub fn mixed_angle_gap(thetas: &[f64], phis: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for (&t, &p) in thetas.iter().zip(phis) {
        let s = (t - p).sin().abs();
        if s > 0.0 {
            best = best.min(s);
        }
    }
    if best.is_finite() {
        best
    } else {
        1.0
    }
}

/// A pair of Lagrangians in generic position sharing exactly `shared`
/// directions: an axis-aligned model pair pushed forward by one common
/// seeded unitary, which preserves intersections and gaps.
pub fn pair_with_intersection(
    space: &SymplecticSpace,
    shared: usize,
    seed: u64,
) -> (LagrangianFrame, LagrangianFrame) {
    assert!(shared <= space.n());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angles: Vec<f64> = (0..space.n())
        .map(|i| {
            if i < shared {
                0.0
            } else {
                rng.random_range(0.3..1.2)
            }
        })
        .collect();
    let u = random_unitary_j(space, seed ^ 0x9e37_79b9_7f4a_7c15);
    let l0 = apply_unitary(&u, &space.standard_lagrangian()).unwrap();
    let l1 = apply_unitary(&u, &mixed_angle_frame(space, &angles)).unwrap();
    (l0, l1)
}

/// Dense symmetric matrix with entries of size about `scale`.
pub fn random_symmetric(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    (&m + m.transpose()) * (0.5 * scale)
}

/// Strictly positive definite matrix with spectrum bounded away from zero,
/// so the iterative square root converges.
pub fn random_positive_definite(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    m.transpose() * &m + DMatrix::identity(n, n) * 0.1
}

/// Uniform samples of the smooth symmetric path
/// `A(t) = C0 + t C1 + sin(pi t) C2` with coefficient size `scale`.
/// Closed form, so refinements of the same path are exactly comparable.
pub fn smooth_symmetric_path(n: usize, samples: usize, scale: f64, seed: u64) -> SymmetricPath {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c0 = random_symmetric(n, scale, &mut rng);
    let c1 = random_symmetric(n, scale, &mut rng);
    let c2 = random_symmetric(n, scale, &mut rng);
    let pts = (0..samples)
        .map(|k| {
            let t = k as f64 / (samples - 1) as f64;
            (t, &c0 + &c1 * t + &c2 * (std::f64::consts::PI * t).sin())
        })
        .collect();
    SymmetricPath::new(pts).unwrap()
}

/// The same loop as [`maslov_core::generator_loop`] but rebuilt sample by
/// sample with an orthogonal gauge applied inside each frame, so the path
/// of subspaces is unchanged while every matrix representative differs.
pub fn gauge_twisted_loop(path: &LagrangianPath, gauge: &DMatrix<f64>) -> LagrangianPath {
    let space = path.space().clone();
    let samples: Vec<(f64, LagrangianFrame)> = path
        .times()
        .iter()
        .zip(path.frames())
        .map(|(&t, f)| {
            (
                t,
                LagrangianFrame::from_orthonormal(&space, f.q() * gauge).unwrap(),
            )
        })
        .collect();
    LagrangianPath::with_step_cap(samples, path.step_cap()).unwrap()
}

/// Rotation by `alpha` in the plane of the first two frame columns,
/// identity elsewhere: an n x n orthogonal gauge.
pub fn planar_gauge(n: usize, alpha: f64) -> DMatrix<f64> {
    let mut g = DMatrix::identity(n, n);
    if n >= 2 {
        g[(0, 0)] = alpha.cos();
        g[(0, 1)] = -alpha.sin();
        g[(1, 0)] = alpha.sin();
        g[(1, 1)] = alpha.cos();
    }
    g
}
