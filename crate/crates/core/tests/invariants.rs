//! Property tests for contracts that must hold across the whole surface:
//! projection identities, gap oracles, chart bijectivity, dual-route square
//! roots, spectral-flow algebra, and the independence of the loop index from
//! every arbitrary choice (sampling, chart seeds, frame gauges).

mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{
    gauge_twisted_loop, mixed_angle_frame, mixed_angle_gap, pair_with_intersection, planar_gauge,
    random_positive_definite, random_symmetric, smooth_symmetric_path,
};
use maslov_core::{
    chart, chart_inverse, complementary_perturbation, concatenate, concatenate_loops,
    det_squared_winding, find_common_complement, generator_loop, graph_map, intersection_dim,
    maslov_index, minimum_gap, pair_data, reverse, spectral_flow, sqrt_psd, ComplementaryPair,
    LagrangianFrame, SqrtMethod, SymplecticSpace,
};

fn space(n: usize) -> SymplecticSpace {
    SymplecticSpace::new(n).unwrap()
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, &x| acc.max(x.abs()))
}

fn rank_of(m: &DMatrix<f64>, tol: f64) -> usize {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > tol)
        .count()
}

/// Mixed-angle test cases: per plane, the second frame either reuses the
/// first frame's line exactly or turns it by a well-separated shift.
fn gap_case() -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>)> {
    (1usize..=3).prop_flat_map(|n| {
        (
            proptest::collection::vec(0.1_f64..1.3, n),
            proptest::collection::vec(proptest::option::of(0.35_f64..1.2), n),
        )
            .prop_map(move |(thetas, shifts)| {
                let phis = thetas
                    .iter()
                    .zip(&shifts)
                    .map(|(&t, s)| t + s.unwrap_or(0.0))
                    .collect();
                (n, thetas, phis)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// P = Q Q^T is a symmetric projector and satisfies the Lagrangian
    /// identity P - J P J = I.
    #[test]
    fn projection_identities(n in 1usize..=3, seed in any::<u64>()) {
        let s = space(n);
        let l = LagrangianFrame::random(&s, seed);
        let p = l.projection();
        let dim = 2 * n;
        prop_assert!(max_abs(&(&p * &p - &p)) <= 1e-12);
        prop_assert!(max_abs(&(&p - p.transpose())) <= 1e-12);
        let identity = DMatrix::<f64>::identity(dim, dim);
        prop_assert!(max_abs(&(&p - s.j() * &p * s.j() - identity)) <= 1e-10);
    }

    /// dim(L cap L') equals the codimension of L + L', so their difference
    /// vanishes; both sides are computed from separate decompositions.
    #[test]
    fn pair_index_vanishes((n, shared) in (1usize..=3).prop_flat_map(|n| (Just(n), 0..=n)),
                           seed in any::<u64>()) {
        let s = space(n);
        let (l0, l1) = pair_with_intersection(&s, shared, seed);
        let data = pair_data(&l0, &l1).unwrap();
        prop_assert_eq!(data.dim_intersection, shared);
        prop_assert_eq!(data.dim_cokernel, shared);
        prop_assert_eq!(data.index, 0);
    }

    /// The reduced minimum gap of plane-decoupled frames matches the
    /// analytic prediction from the plane angles.
    #[test]
    fn gap_matches_the_plane_angle_oracle((n, thetas, phis) in gap_case()) {
        let s = space(n);
        let a = mixed_angle_frame(&s, &thetas);
        let b = mixed_angle_frame(&s, &phis);
        let gap = minimum_gap(&a, &b).unwrap();
        let oracle = mixed_angle_gap(&thetas, &phis);
        prop_assert!((gap - oracle).abs() <= 1e-9,
            "gap {gap} vs oracle {oracle}");
    }

    /// The gap is symmetric, lands in [0, 1], and is exactly 1 against the
    /// J-image (the orthogonal complement of a Lagrangian).
    #[test]
    fn gap_is_symmetric_and_bounded(n in 1usize..=3, sa in any::<u64>(), sb in any::<u64>()) {
        let s = space(n);
        let a = LagrangianFrame::random(&s, sa);
        let b = LagrangianFrame::random(&s, sb);
        let g_ab = minimum_gap(&a, &b).unwrap();
        let g_ba = minimum_gap(&b, &a).unwrap();
        prop_assert!((g_ab - g_ba).abs() <= 1e-9, "asymmetric: {g_ab} vs {g_ba}");
        prop_assert!((0.0..=1.0 + 1e-12).contains(&g_ab));
        prop_assert!(minimum_gap(&a, &a.j_image()).unwrap() >= 1.0 - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// chart and chart_inverse are mutually inverse on symmetric matrices.
    #[test]
    fn chart_roundtrip_recovers_the_matrix(n in 1usize..=3, seed in any::<u64>()) {
        let s = space(n);
        let (l0, l1) = pair_with_intersection(&s, 0, seed);
        let pair = ComplementaryPair::new(l0, l1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
        let a = random_symmetric(n, 1.5, &mut rng);
        let l = chart_inverse(&pair, &a).unwrap();
        let recovered = chart(&pair, &l).unwrap();
        let scale = max_abs(&a).max(1.0);
        prop_assert!(max_abs(&(recovered.a() - &a)) <= 1e-8 * scale);
    }

    /// The graph embedding Q0 + Q1 B spans the charted Lagrangian.
    #[test]
    fn graph_embedding_reconstructs_the_subspace(n in 1usize..=3, seed in any::<u64>()) {
        let s = space(n);
        let (l0, l1) = pair_with_intersection(&s, 0, seed);
        let pair = ComplementaryPair::new(l0, l1).unwrap();
        let l = LagrangianFrame::random(&s, seed ^ 0x55aa);
        match graph_map(&l, &pair) {
            Ok(g) => {
                let rebuilt = LagrangianFrame::from_matrix(&s, &g.embedding()).unwrap();
                prop_assert!(max_abs(&(rebuilt.projection() - l.projection())) <= 1e-8);
            }
            // A random L may genuinely meet L1; that is outside the chart.
            Err(_) => prop_assert!(intersection_dim(&l, pair.l1()).unwrap() > 0
                || minimum_gap(&l, pair.l1()).unwrap() < 1e-6),
        }
    }

    /// dim ker(chart value) counts dim(L cap L0) exactly.
    #[test]
    fn chart_kernel_counts_the_intersection(
        (n, shared) in (1usize..=3).prop_flat_map(|n| (Just(n), 0..=n)),
        seed in any::<u64>(),
    ) {
        let s = space(n);
        let (l0, l1) = pair_with_intersection(&s, shared, seed);
        let l2 = find_common_complement(&l0, &l1, seed, 1e-3).unwrap();
        let pair = ComplementaryPair::with_gap_floor(l0.clone(), l2, 5e-4).unwrap();
        let value = chart(&pair, &l1).unwrap();
        let dim_kernel = n - rank_of(value.a(), s.tolerances().rank);
        prop_assert_eq!(dim_kernel, shared);
        prop_assert_eq!(dim_kernel, intersection_dim(&l1, &l0).unwrap());
    }

    /// The iterative and spectral square roots agree, and both square back.
    #[test]
    fn square_root_routes_agree(n in 1usize..=6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_positive_definite(n, &mut rng);
        let iterative = sqrt_psd(&a, SqrtMethod::Iterative).unwrap();
        let spectral = sqrt_psd(&a, SqrtMethod::Spectral).unwrap();
        prop_assert!(max_abs(&(&iterative - &spectral)) <= 1e-7);
        let scale = max_abs(&a).max(1.0);
        prop_assert!(max_abs(&(&spectral * &spectral - &a)) <= 1e-9 * scale);
    }

    /// The transversality restoration leaves the perturbed subspace within
    /// a projection shift of rank at most twice the defect it removed.
    #[test]
    fn perturbation_rank_is_bounded_by_the_defect(
        (n, shared) in (1usize..=3).prop_flat_map(|n| (Just(n), 0..=n)),
        seed in any::<u64>(),
    ) {
        let s = space(n);
        let (l0, l1) = pair_with_intersection(&s, shared, seed);
        let moved = complementary_perturbation(&l0, &l1, seed).unwrap();
        prop_assert_eq!(intersection_dim(&l0, &moved).unwrap(), 0);
        let shift = moved.projection() - l1.projection();
        prop_assert!(rank_of(&shift, s.tolerances().rank) <= 2 * shared);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Reversing a symmetric path negates its flow exactly.
    #[test]
    fn flow_reversal_negates(n in 1usize..=3, seed in any::<u64>()) {
        let p = smooth_symmetric_path(n, 21, 0.4, seed);
        let forward = spectral_flow(&p).unwrap().total;
        let backward = spectral_flow(&reverse(&p)).unwrap().total;
        prop_assert_eq!(backward, -forward);
    }

    /// Concatenating a path with its reversal cancels, and concatenation
    /// with an independent continuation adds.
    #[test]
    fn flow_concatenation_adds(n in 1usize..=3, seed in any::<u64>()) {
        let p = smooth_symmetric_path(n, 21, 0.4, seed);
        let there_and_back = concatenate(&p, &reverse(&p)).unwrap();
        prop_assert_eq!(spectral_flow(&there_and_back).unwrap().total, 0);

        // A second leg starting exactly at p's endpoint.
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x77);
        let d = random_symmetric(n, 0.4, &mut rng);
        let last = p.matrices().last().unwrap().clone();
        let q_samples: Vec<(f64, DMatrix<f64>)> = (0..21)
            .map(|k| {
                let t = k as f64 / 20.0;
                (t, &last + &d * t)
            })
            .collect();
        let q = maslov_core::SymmetricPath::new(q_samples).unwrap();
        let joined = concatenate(&p, &q).unwrap();
        prop_assert_eq!(
            spectral_flow(&joined).unwrap().total,
            spectral_flow(&p).unwrap().total + spectral_flow(&q).unwrap().total
        );
    }

    /// The certified flow does not depend on the sampling density.
    #[test]
    fn flow_is_refinement_independent(n in 1usize..=3, seed in any::<u64>()) {
        let coarse = smooth_symmetric_path(n, 21, 0.4, seed);
        let fine = smooth_symmetric_path(n, 81, 0.4, seed);
        prop_assert_eq!(
            spectral_flow(&coarse).unwrap().total,
            spectral_flow(&fine).unwrap().total
        );
    }

    /// The squared-determinant winding ignores the frame gauge: rebuilding
    /// every sample with a rotated basis of the same subspace changes
    /// nothing.
    #[test]
    fn winding_is_gauge_invariant(k in -2i64..=2, alpha in 0.1_f64..3.0) {
        let s = space(2);
        let original = generator_loop(&s, k, 64).unwrap();
        let twisted = gauge_twisted_loop(&original, &planar_gauge(2, alpha));
        prop_assert_eq!(det_squared_winding(&original).unwrap(), k);
        prop_assert_eq!(det_squared_winding(&twisted).unwrap(), k);
    }

    /// The loop index is independent of the partition seed and of the frame
    /// gauge, and matches the winding with opposite sign.
    #[test]
    fn loop_index_ignores_seed_and_gauge(k in -2i64..=2, s1 in any::<u64>(), s2 in any::<u64>()) {
        let s = space(2);
        let l0 = mixed_angle_frame(&s, &[std::f64::consts::FRAC_PI_2, 0.0]);
        let path = generator_loop(&s, k, 64).unwrap();
        let a = maslov_index(&path, &l0, s1).unwrap();
        let b = maslov_index(&path, &l0, s2).unwrap();
        prop_assert_eq!(a.index, -k);
        prop_assert_eq!(b.index, -k);

        let twisted = gauge_twisted_loop(&path, &planar_gauge(2, 0.9));
        let c = maslov_index(&twisted, &l0, s1).unwrap();
        prop_assert_eq!(c.index, -k);
    }

    /// Traversing two loops in sequence adds their indices.
    #[test]
    fn loop_concatenation_adds_indices(k1 in -2i64..=2, k2 in -2i64..=2, seed in any::<u64>()) {
        let s = space(1);
        let l0 = mixed_angle_frame(&s, &[std::f64::consts::FRAC_PI_2]);
        let p = generator_loop(&s, k1, 64).unwrap();
        let q = generator_loop(&s, k2, 64).unwrap();
        let joined = concatenate_loops(&p, &q).unwrap();
        let total = maslov_index(&joined, &l0, seed).unwrap();
        prop_assert_eq!(total.index, -(k1 + k2));
        prop_assert_eq!(det_squared_winding(&joined).unwrap(), k1 + k2);
    }
}
