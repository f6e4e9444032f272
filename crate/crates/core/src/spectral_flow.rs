//! Spectral flow of sampled paths of symmetric matrices.
//!
//! The flow counts eigenvalue crossings through zero, signed by direction,
//! from endpoint spectra alone. For each consecutive pair (A_k, A_{k+1})
//! the interval step is `||A_{k+1} - A_k||` in spectral norm; eigenvalue
//! perturbation then confines each eigenvalue to move by at most the step
//! across the interval. A *barrier* is a value `eps >= 0` such that no
//! endpoint eigenvalue of the interval lies in `(eps, eps + step]`: the
//! number of eigenvalues above the band cannot change inside the interval,
//! so counting at the mid-band level `eps + step/2` is sampling-stable. The
//! barrier is found greedily — start at zero and jump to the largest
//! offending eigenvalue until the band is clear — which yields the minimal
//! barrier; if it exceeds the cap the data is too coarse to certify a count
//! and the computation refuses rather than guesses.
//!
//! Eigenvalues within the rank tolerance of zero are snapped to zero and
//! count as nonnegative. Reversing a path negates the flow exactly (the
//! barriers agree band-for-band), and concatenation adds flows exactly.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;

/// Absolute slack when snapping parameter endpoints to 0 and 1.
const T_SNAP: f64 = 1e-9;

/// Scaled symmetry tolerance for path samples.
const DEFAULT_SYM_TOL: f64 = 1e-10;

/// A path of symmetric matrices sampled on `[0, 1]`.
///
/// Samples are strictly increasing in `t`, the first and last parameters
/// are 0 and 1 (snapped within an absolute slack), and every matrix is
/// validated as symmetric at a tolerance scaled by its magnitude, then
/// stored exactly symmetrized.
#[derive(Debug, Clone)]
pub struct SymmetricPath {
    times: Vec<f64>,
    matrices: Vec<DMatrix<f64>>,
    sym_tol: f64,
}

impl SymmetricPath {
    pub fn new(samples: Vec<(f64, DMatrix<f64>)>) -> Result<Self> {
        Self::with_sym_tol(samples, DEFAULT_SYM_TOL)
    }

    pub fn with_sym_tol(samples: Vec<(f64, DMatrix<f64>)>, sym_tol: f64) -> Result<Self> {
        if !(sym_tol > 0.0) {
            return Err(Error::InvalidArgument(
                "symmetry tolerance must be strictly positive".into(),
            ));
        }
        if samples.len() < 2 {
            return Err(Error::InvalidPath(format!(
                "a path needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        let dim = samples[0].1.nrows();
        let mut times = Vec::with_capacity(samples.len());
        let mut matrices = Vec::with_capacity(samples.len());
        for (idx, (t, a)) in samples.into_iter().enumerate() {
            if a.nrows() != dim || a.ncols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "sample {idx} is {} x {}, expected {dim} x {dim}",
                    a.nrows(),
                    a.ncols()
                )));
            }
            if !t.is_finite() {
                return Err(Error::InvalidPath(format!(
                    "sample {idx} has non-finite parameter {t}"
                )));
            }
            let scale = linalg::max_abs(&a).max(1.0);
            let asym = linalg::max_abs(&(&a - a.transpose()));
            if asym > sym_tol * scale {
                return Err(Error::NotSymmetric {
                    residual: asym,
                    tol: sym_tol * scale,
                });
            }
            times.push(t);
            matrices.push((&a + a.transpose()) * 0.5);
        }
        let last = times.len() - 1;
        if (times[0]).abs() > T_SNAP {
            return Err(Error::InvalidPath(format!(
                "first sample parameter must be 0, got {}",
                times[0]
            )));
        }
        if (times[last] - 1.0).abs() > T_SNAP {
            return Err(Error::InvalidPath(format!(
                "last sample parameter must be 1, got {}",
                times[last]
            )));
        }
        times[0] = 0.0;
        times[last] = 1.0;
        for k in 1..times.len() {
            if times[k] <= times[k - 1] {
                return Err(Error::InvalidPath(format!(
                    "parameters must be strictly increasing: t[{}] = {} then t[{k}] = {}",
                    k - 1,
                    times[k - 1],
                    times[k]
                )));
            }
        }
        Ok(SymmetricPath {
            times,
            matrices,
            sym_tol,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Matrix size n of the n x n samples.
    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.matrices
    }

    pub fn sym_tol(&self) -> f64 {
        self.sym_tol
    }
}

/// Certificate for one interval of the flow computation.
#[derive(Debug, Clone)]
pub struct IntervalRecord {
    /// Spectral norm of the sample difference.
    pub step: f64,
    /// Minimal barrier: no endpoint eigenvalue in `(barrier, barrier + step]`.
    pub barrier: f64,
    /// Counting level `barrier + step/2`.
    pub level: f64,
    /// Eigenvalues of the left sample in `[0, level)`.
    pub count_start: usize,
    /// Eigenvalues of the right sample in `[0, level)`.
    pub count_end: usize,
    /// `count_end - count_start`.
    pub contribution: i64,
}

/// Full output of a flow computation: one record per interval and the
/// telescoped total.
#[derive(Debug, Clone)]
pub struct CrossingReport {
    pub intervals: Vec<IntervalRecord>,
    pub total: i64,
    /// Every interval produced a barrier within the cap. A report is only
    /// returned when this holds; the flag records the certificate.
    pub admissible: bool,
}

/// Admissibility thresholds for the flow computation.
#[derive(Debug, Clone, Copy)]
pub struct FlowOptions {
    /// Largest acceptable barrier; a greedy barrier beyond this aborts.
    pub barrier_cap: f64,
    /// Eigenvalues within this of zero are snapped to zero.
    pub tol_rank: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            barrier_cap: 1.0,
            tol_rank: 1e-8,
        }
    }
}

fn snapped_spectra(path: &SymmetricPath, tol_rank: f64) -> Result<Vec<Vec<f64>>> {
    path.matrices()
        .iter()
        .map(|a| {
            let (mut vals, _) = linalg::symmetric_eigen_sorted(a)?;
            for v in &mut vals {
                if v.abs() <= tol_rank {
                    *v = 0.0;
                }
            }
            Ok(vals)
        })
        .collect()
}

/// Minimal barrier for one interval: the smallest `eps >= 0` such that no
/// eigenvalue from either endpoint lies in `(eps, eps + step]`. Greedy
/// jumps to the largest offender are monotone and hit the minimum.
///
/// The capture band is widened by a rounding slack: for one-dimensional
/// charts consecutive samples place an eigenvalue exactly at `eps + step`
/// (the step *is* the eigenvalue difference), and whether `eps + step`
/// rounds up or down to that eigenvalue is a coin flip that must not decide
/// the certificate. Overshooting is sound — any clean band certifies the
/// same count — so the slack only ever climbs past borderline offenders.
fn minimal_barrier(step: f64, left: &[f64], right: &[f64]) -> f64 {
    let scale = left
        .iter()
        .chain(right.iter())
        .fold(step.abs(), |m, &v| m.max(v.abs()));
    let slack = scale * 1e-12;
    let mut eps = 0.0_f64;
    loop {
        let offender = left
            .iter()
            .chain(right.iter())
            .copied()
            .filter(|&l| l > eps && l <= eps + step + slack)
            .fold(f64::NEG_INFINITY, f64::max);
        if offender.is_finite() {
            eps = offender;
        } else {
            return eps;
        }
    }
}

fn count_below(vals: &[f64], level: f64) -> usize {
    vals.iter().filter(|&&l| l >= 0.0 && l < level).count()
}

/// Spectral flow with default thresholds.
pub fn spectral_flow(path: &SymmetricPath) -> Result<CrossingReport> {
    spectral_flow_with(path, &FlowOptions::default())
}

/// Spectral flow with explicit thresholds.
pub fn spectral_flow_with(path: &SymmetricPath, opts: &FlowOptions) -> Result<CrossingReport> {
    if !(opts.barrier_cap > 0.0) || !(opts.tol_rank >= 0.0) {
        return Err(Error::InvalidArgument(
            "barrier_cap must be positive and tol_rank nonnegative".into(),
        ));
    }
    let spectra = snapped_spectra(path, opts.tol_rank)?;
    let mut intervals = Vec::with_capacity(path.len() - 1);
    let mut total = 0_i64;
    for k in 0..path.len() - 1 {
        let step = linalg::spectral_norm(&(&path.matrices()[k + 1] - &path.matrices()[k]))?;
        let barrier = minimal_barrier(step, &spectra[k], &spectra[k + 1]);
        if barrier > opts.barrier_cap {
            return Err(Error::NoBarrier {
                interval: k,
                cap: opts.barrier_cap,
            });
        }
        let level = barrier + step * 0.5;
        let count_start = count_below(&spectra[k], level);
        let count_end = count_below(&spectra[k + 1], level);
        let contribution = count_end as i64 - count_start as i64;
        total += contribution;
        intervals.push(IntervalRecord {
            step,
            barrier,
            level,
            count_start,
            count_end,
            contribution,
        });
    }
    Ok(CrossingReport {
        intervals,
        total,
        admissible: true,
    })
}

/// The path traversed backwards: `t -> 1 - t`. Flow negates exactly.
pub fn reverse(path: &SymmetricPath) -> SymmetricPath {
    let m = path.len();
    let times = (0..m).map(|k| 1.0 - path.times()[m - 1 - k]).collect();
    let matrices = (0..m).map(|k| path.matrices()[m - 1 - k].clone()).collect();
    SymmetricPath {
        times,
        matrices,
        sym_tol: path.sym_tol(),
    }
}

/// Joins two paths whose junction samples agree, squeezing the first onto
/// `[0, 1/2]` and the second onto `[1/2, 1]`. The junction keeps the first
/// path's sample; the second path's copy is dropped. Flow adds exactly
/// across the seam.
pub fn concatenate(p: &SymmetricPath, q: &SymmetricPath) -> Result<SymmetricPath> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch(format!(
            "cannot join paths of sizes {} and {}",
            p.dim(),
            q.dim()
        )));
    }
    let junction_gap = linalg::max_abs(&(p.matrices().last().unwrap() - &q.matrices()[0]));
    let scale = linalg::max_abs(p.matrices().last().unwrap()).max(1.0);
    let tol = p.sym_tol().max(q.sym_tol()).max(1e-10) * scale * 10.0;
    if junction_gap > tol {
        return Err(Error::EndpointMismatch(format!(
            "junction samples differ by {junction_gap:.3e} (allowed {tol:.3e})"
        )));
    }
    let mut times = Vec::with_capacity(p.len() + q.len() - 1);
    let mut matrices = Vec::with_capacity(p.len() + q.len() - 1);
    for k in 0..p.len() {
        times.push(p.times()[k] * 0.5);
        matrices.push(p.matrices()[k].clone());
    }
    for k in 1..q.len() {
        times.push(0.5 + q.times()[k] * 0.5);
        matrices.push(q.matrices()[k].clone());
    }
    Ok(SymmetricPath {
        times,
        matrices,
        sym_tol: p.sym_tol().max(q.sym_tol()),
    })
}
