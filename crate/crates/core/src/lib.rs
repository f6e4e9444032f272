//! Constructive linear symplectic geometry at desk scale.
//!
//! The ambient space is R^{2n} with the standard complex structure
//! `J e_k = e_{n+k}`, `J e_{n+k} = -e_k`, and the symplectic form
//! `omega(u, v) = <J u, v>`. Everything here revolves around Lagrangian
//! subspaces — n-dimensional subspaces on which `omega` vanishes — and the
//! maps between them:
//!
//! * [`symplectic`] — spaces, orthonormal Lagrangian frames, intersection and
//!   minimum-gap diagnostics, seeded J-commuting unitaries;
//! * [`charts`] — graph coordinates around a complementary pair, the
//!   self-adjoint chart value, and the two-sided gap inequality report;
//! * [`perturbation`] — matrix square roots (iterative and spectral), polar
//!   factors, a unitary transporting one Lagrangian onto another, and a
//!   minimal-rank perturbation restoring transversality;
//! * [`spectral_flow`] — sampled paths of symmetric matrices and their
//!   integer spectral flow with per-interval certificates;
//! * [`maslov`] — sampled Lagrangian paths, greedy chart partitions, and the
//!   partitioned Maslov index;
//! * [`winding`] — an independent winding-number cross-check through the
//!   squared determinant of the associated unitary loop;
//! * [`io`] — JSON records for frames and paths.
//!
//! All integer outputs (ranks, flows, indices, windings) are accompanied by
//! the certificates that justify them, and every seeded choice is
//! reproducible from the seed alone.

pub mod charts;
pub mod error;
pub mod io;
mod linalg;
pub mod maslov;
pub mod perturbation;
pub mod spectral_flow;
pub mod symplectic;
pub mod winding;

pub use charts::{chart, chart_inverse, gap_inequality_report, graph_map, is_transverse};
pub use charts::{ChartValue, ComplementaryPair, GapReport, GraphMap};
pub use error::{Error, ErrorClass, Result};
pub use maslov::{
    coherence_check, concatenate_loops, find_partition, generator_loop, homotopy_perturb,
    maslov_index, maslov_index_with_margin, LagrangianPath, MaslovResult, PartitionCertificate,
};
pub use perturbation::{
    complementary_perturbation, find_common_complement, polar_unitary, sqrt_psd, sqrt_psd_with,
    transitive_unitary, RankTracked, SqrtMethod, SqrtOptions, TransportResult,
};
pub use spectral_flow::{
    concatenate, reverse, spectral_flow, spectral_flow_with, CrossingReport, FlowOptions,
    IntervalRecord, SymmetricPath,
};
pub use symplectic::{
    apply_unitary, intersection_dim, minimum_gap, minimum_gap_frames, pair_data,
    random_unitary_j, reduced_min_modulus, LagrangianFrame, PairData, SymplecticSpace, Tolerances,
};
pub use winding::det_squared_winding;
