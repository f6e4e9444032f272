//! Sampled Lagrangian paths and their partitioned intersection index.
//!
//! A [`LagrangianPath`] is a finite sequence of Lagrangian frames over
//! strictly increasing parameters in `[0, 1]`, admissible when consecutive
//! projections differ by at most a step cap. The index of a path relative
//! to a reference Lagrangian L0 counts its intersections with L0, signed by
//! the direction of passage.
//!
//! Computation proceeds by partition: greedily split the samples into
//! segments, each certified by a common complement W transverse (with
//! margin) to L0 and to every sample of the segment. On such a segment the
//! path reads as a path of symmetric matrices through the chart around
//! (L0, W) — kernels of the chart value correspond to intersections with
//! L0 — and its spectral flow is the segment's contribution. Crossing
//! directions are chart-independent, so the sum over segments does not
//! depend on the complements chosen, which [`coherence_check`] verifies
//! directly on a common arc.
//!
//! The partition search prefers well-conditioned complements: it scans a
//! ladder of margin targets from 1/2 down to the requested floor, accepting
//! the first candidate (J-images of nearby samples, then seeded unitary
//! images of J L0) that clears the current target, and extends the segment
//! as far as that target allows. Everything seeded is reproducible.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::charts::{chart, is_transverse, ComplementaryPair};
use crate::error::{Error, Result};
use crate::linalg;
use crate::spectral_flow::{spectral_flow_with, CrossingReport, FlowOptions, SymmetricPath};
use crate::symplectic::{
    apply_unitary, intersection_dim, minimum_gap, random_unitary_j, LagrangianFrame,
    SymplecticSpace,
};

/// Default cap on the projection distance between consecutive samples.
pub const DEFAULT_STEP_CAP: f64 = 0.3;

/// Default hard floor for partition margins.
pub const DEFAULT_MARGIN_FLOOR: f64 = 1e-3;

/// Seeded candidates tried per margin target before giving up on a segment.
pub const PARTITION_MAX_TRIES: usize = 64;

/// How many upcoming samples contribute their J-image as a candidate.
const PARTITION_LOOKAHEAD: usize = 16;

/// Absolute slack when snapping parameter endpoints to 0 and 1.
const T_SNAP: f64 = 1e-9;

/// A path of Lagrangian subspaces sampled on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct LagrangianPath {
    times: Vec<f64>,
    frames: Vec<LagrangianFrame>,
    step_cap: f64,
}

impl LagrangianPath {
    pub fn new(samples: Vec<(f64, LagrangianFrame)>) -> Result<Self> {
        Self::with_step_cap(samples, DEFAULT_STEP_CAP)
    }

    /// Validates sample count, parameter ordering, dimension consistency,
    /// and that consecutive projections differ by at most `step_cap` in
    /// spectral norm.
    pub fn with_step_cap(samples: Vec<(f64, LagrangianFrame)>, step_cap: f64) -> Result<Self> {
        if !(step_cap > 0.0) {
            return Err(Error::InvalidArgument(
                "step cap must be strictly positive".into(),
            ));
        }
        if samples.len() < 2 {
            return Err(Error::InvalidPath(format!(
                "a path needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        let n = samples[0].1.n();
        let mut times = Vec::with_capacity(samples.len());
        let mut frames = Vec::with_capacity(samples.len());
        for (idx, (t, f)) in samples.into_iter().enumerate() {
            if f.n() != n {
                return Err(Error::DimensionMismatch(format!(
                    "sample {idx} lives in n = {}, expected n = {n}",
                    f.n()
                )));
            }
            if !t.is_finite() {
                return Err(Error::InvalidPath(format!(
                    "sample {idx} has non-finite parameter {t}"
                )));
            }
            times.push(t);
            frames.push(f);
        }
        let last = times.len() - 1;
        if times[0].abs() > T_SNAP {
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
        let slack = 1.0 + 1e-9;
        for k in 0..last {
            let step =
                linalg::spectral_norm(&(frames[k + 1].projection() - frames[k].projection()))?;
            if step > step_cap * slack {
                return Err(Error::StepTooLarge(format!(
                    "projection step {step:.6} between samples {k} and {} exceeds the cap \
                     {step_cap} — sample the path more finely",
                    k + 1
                )));
            }
        }
        Ok(LagrangianPath {
            times,
            frames,
            step_cap,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn n(&self) -> usize {
        self.frames[0].n()
    }

    pub fn space(&self) -> &SymplecticSpace {
        self.frames[0].space()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn frames(&self) -> &[LagrangianFrame] {
        &self.frames
    }

    pub fn step_cap(&self) -> f64 {
        self.step_cap
    }

    /// Whether first and last samples span the same subspace.
    pub fn is_loop(&self) -> Result<bool> {
        Ok(intersection_dim(&self.frames[0], self.frames.last().unwrap())? == self.n())
    }
}

/// The rotation loop: the first frame vector turns by `k` half-turns in the
/// (e_1, e_{n+1}) plane while the remaining directions e_2, ..., e_n stay
/// put. Its index relative to `span{e_{n+1}, e_2, ..., e_n}` is `-k`, and
/// its squared-determinant winding is `k`.
///
/// `m` samples must resolve the turning: the per-step rotation angle has to
/// stay under pi/4 with its sine within the step cap, otherwise the loop is
/// rejected as too coarse.
pub fn generator_loop(space: &SymplecticSpace, k: i64, m: usize) -> Result<LagrangianPath> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "a loop needs at least 2 samples, got {m}"
        )));
    }
    let delta = k.unsigned_abs() as f64 * PI / (m - 1) as f64;
    if k != 0 && (delta >= FRAC_PI_4 || delta.sin() > DEFAULT_STEP_CAP * (1.0 - 1e-9)) {
        return Err(Error::TooCoarse(format!(
            "per-step rotation of {delta:.4} rad cannot be certified; need the step under \
             pi/4 with sine at most {DEFAULT_STEP_CAP} — use more samples for this k"
        )));
    }
    let n = space.n();
    let samples = (0..m)
        .map(|i| {
            let t = i as f64 / (m - 1) as f64;
            let theta = k as f64 * PI * t;
            let q = DMatrix::from_fn(2 * n, n, |r, c| {
                if c == 0 {
                    if r == 0 {
                        theta.cos()
                    } else if r == n {
                        theta.sin()
                    } else {
                        0.0
                    }
                } else if r == c {
                    1.0
                } else {
                    0.0
                }
            });
            Ok((t, LagrangianFrame::from_orthonormal(space, q)?))
        })
        .collect::<Result<Vec<_>>>()?;
    LagrangianPath::new(samples)
}

/// A segment partition with per-segment complements and their certified
/// margins.
///
/// Segment `j` covers samples `breakpoints[j] ..= breakpoints[j + 1]`;
/// `complements[j]` is transverse, with minimum gap at least `margins[j]`,
/// to the reference Lagrangian and to every sample of the segment. All
/// margins are at least `margin_floor`.
#[derive(Debug, Clone)]
pub struct PartitionCertificate {
    pub breakpoints: Vec<usize>,
    pub complements: Vec<LagrangianFrame>,
    pub margins: Vec<f64>,
    pub margin_floor: f64,
}

impl PartitionCertificate {
    pub fn segment_count(&self) -> usize {
        self.complements.len()
    }
}

/// Greedy segment partition of `path` with complements transverse to `l0`.
///
/// For each segment the search walks a ladder of margin targets (1/2, 1/4,
/// ... down to `margin_floor`); at each target it tries the J-images of the
/// next few samples, then seeded unitary images of J L0, accepting the
/// first candidate transverse at the target to l0 and to at least the two
/// samples starting the segment, and extending while the target holds.
/// Higher targets are preferred even when they give shorter segments —
/// chart values stay bounded by the reciprocal of the margin.
pub fn find_partition(
    path: &LagrangianPath,
    l0: &LagrangianFrame,
    seed: u64,
    margin_floor: f64,
) -> Result<PartitionCertificate> {
    if l0.n() != path.n() {
        return Err(Error::DimensionMismatch(format!(
            "reference lives in n = {}, path in n = {}",
            l0.n(),
            path.n()
        )));
    }
    if !(margin_floor > 0.0 && margin_floor < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "margin floor must lie in (0, 1), got {margin_floor}"
        )));
    }
    let mut targets = Vec::new();
    let mut g = 0.5_f64;
    while g > margin_floor {
        targets.push(g);
        g *= 0.5;
    }
    targets.push(margin_floor);

    let space = path.space();
    let m = path.len();
    let frames = path.frames();
    let mut breakpoints = vec![0usize];
    let mut complements = Vec::new();
    let mut margins = Vec::new();
    let mut start = 0usize;
    while start < m - 1 {
        let mut found: Option<(usize, LagrangianFrame, f64)> = None;
        let mut tried = 0usize;
        'targets: for &target in &targets {
            for c in 0..PARTITION_LOOKAHEAD + PARTITION_MAX_TRIES {
                let cand = if c < PARTITION_LOOKAHEAD {
                    match frames.get(start + c) {
                        Some(f) => f.j_image(),
                        None => continue,
                    }
                } else {
                    let a = (c - PARTITION_LOOKAHEAD) as u64;
                    let u = random_unitary_j(space, seed.wrapping_add(a));
                    apply_unitary(&u, &l0.j_image())?
                };
                tried += 1;
                if !is_transverse(&cand, l0, target)?
                    || !is_transverse(&cand, &frames[start], target)?
                    || !is_transverse(&cand, &frames[start + 1], target)?
                {
                    continue;
                }
                let mut worst = minimum_gap(&cand, l0)?
                    .min(minimum_gap(&cand, &frames[start])?)
                    .min(minimum_gap(&cand, &frames[start + 1])?);
                let mut end = start + 1;
                while end + 1 < m && is_transverse(&cand, &frames[end + 1], target)? {
                    end += 1;
                    worst = worst.min(minimum_gap(&cand, &frames[end])?);
                }
                found = Some((end, cand, worst));
                break 'targets;
            }
        }
        match found {
            Some((end, w, margin)) => {
                breakpoints.push(end);
                complements.push(w);
                margins.push(margin);
                start = end;
            }
            None => {
                return Err(Error::PartitionFailed {
                    sample: start,
                    tries: tried,
                })
            }
        }
    }
    Ok(PartitionCertificate {
        breakpoints,
        complements,
        margins,
        margin_floor,
    })
}

/// Index of a path with the partition that certifies it.
#[derive(Debug, Clone)]
pub struct MaslovResult {
    pub index: i64,
    pub certificate: PartitionCertificate,
    /// Per-segment flow totals with their interval records.
    pub segments: Vec<(i64, CrossingReport)>,
}

/// Intersection index of `path` relative to `l0` at the default margin
/// floor.
pub fn maslov_index(path: &LagrangianPath, l0: &LagrangianFrame, seed: u64) -> Result<MaslovResult> {
    maslov_index_with_margin(path, l0, seed, DEFAULT_MARGIN_FLOOR)
}

/// Intersection index with an explicit margin floor for the partition.
pub fn maslov_index_with_margin(
    path: &LagrangianPath,
    l0: &LagrangianFrame,
    seed: u64,
    margin_floor: f64,
) -> Result<MaslovResult> {
    let certificate = find_partition(path, l0, seed, margin_floor)?;
    let space = path.space();
    let mut segments = Vec::with_capacity(certificate.segment_count());
    let mut index = 0_i64;
    for j in 0..certificate.segment_count() {
        let b0 = certificate.breakpoints[j];
        let b1 = certificate.breakpoints[j + 1];
        let w = &certificate.complements[j];
        // Chart values along the segment are bounded by sqrt(2)/margin^2:
        // the graph norm through a complement at gap >= margin contributes
        // 1/margin, and reading it in a possibly skew frame pair costs
        // another 1/margin. A greedy barrier terminates at an endpoint
        // eigenvalue, so this cap admits every chart sequence consistent
        // with the certified margin and rejects only charts that
        // contradict it.
        let opts = FlowOptions {
            barrier_cap: barrier_cap_for_margin(certificate.margins[j]),
            tol_rank: space.tolerances().rank,
        };
        let pair =
            ComplementaryPair::with_gap_floor(l0.clone(), w.clone(), margin_floor * 0.5)?;
        let t0 = path.times()[b0];
        let t1 = path.times()[b1];
        let chart_samples = (b0..=b1)
            .map(|i| {
                let t = (path.times()[i] - t0) / (t1 - t0);
                let value = chart(&pair, &path.frames()[i])?;
                Ok((t, value.a().clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        let chart_path = SymmetricPath::new(chart_samples)?;
        let report = spectral_flow_with(&chart_path, &opts)?;
        index += report.total;
        segments.push((report.total, report));
    }
    Ok(MaslovResult {
        index,
        certificate,
        segments,
    })
}

/// Largest admissible barrier for a chart path whose complement clears the
/// reference and every sample by at least `margin`. Never below 1.5 since
/// gaps never exceed 1.
fn barrier_cap_for_margin(margin: f64) -> f64 {
    1.5 / (margin * margin)
}

/// Joins two loops with the same basepoint subspace, squeezing the first
/// onto `[0, 1/2]` and the second onto `[1/2, 1]`. The junction keeps the
/// first loop's frame; the second loop's first sample is dropped. The index
/// adds across the join.
pub fn concatenate_loops(p: &LagrangianPath, q: &LagrangianPath) -> Result<LagrangianPath> {
    if p.n() != q.n() {
        return Err(Error::DimensionMismatch(format!(
            "cannot join loops in n = {} and n = {}",
            p.n(),
            q.n()
        )));
    }
    if !p.is_loop()? || !q.is_loop()? {
        return Err(Error::NotALoop);
    }
    if intersection_dim(&p.frames()[0], &q.frames()[0])? != p.n() {
        return Err(Error::EndpointMismatch(
            "loops have different basepoint subspaces".into(),
        ));
    }
    let mut samples = Vec::with_capacity(p.len() + q.len() - 1);
    for k in 0..p.len() {
        samples.push((p.times()[k] * 0.5, p.frames()[k].clone()));
    }
    for k in 1..q.len() {
        samples.push((0.5 + q.times()[k] * 0.5, q.frames()[k].clone()));
    }
    LagrangianPath::with_step_cap(samples, p.step_cap().max(q.step_cap()))
}

/// Verifies on a common arc that the flow through the chart around
/// (l0, w_a) equals the flow through the chart around (l0, w_b). Both
/// complements must be transverse to l0 and to every sample; crossing
/// directions are chart-free, so disagreement indicates a defect.
pub fn coherence_check(
    path: &LagrangianPath,
    l0: &LagrangianFrame,
    w_a: &LagrangianFrame,
    w_b: &LagrangianFrame,
) -> Result<bool> {
    let mut totals = [0_i64; 2];
    for (slot, w) in [w_a, w_b].into_iter().enumerate() {
        let pair = ComplementaryPair::new(l0.clone(), w.clone())?;
        let mut margin = minimum_gap(w, l0)?;
        for f in path.frames() {
            margin = margin.min(minimum_gap(w, f)?);
        }
        let opts = FlowOptions {
            barrier_cap: barrier_cap_for_margin(margin),
            tol_rank: path.space().tolerances().rank,
        };
        let samples = path
            .times()
            .iter()
            .zip(path.frames())
            .map(|(&t, f)| Ok((t, chart(&pair, f)?.a().clone())))
            .collect::<Result<Vec<_>>>()?;
        let chart_path = SymmetricPath::new(samples)?;
        totals[slot] = spectral_flow_with(&chart_path, &opts)?.total;
    }
    Ok(totals[0] == totals[1])
}

/// Endpoint-fixing deformation: each interior sample is moved by the
/// exponential of a seeded J-commuting skew generator scaled by
/// `magnitude * sin(pi t)`, so the deformation vanishes at the ends and the
/// result stays a valid path of the same homotopy class. A magnitude large
/// enough to break the step cap fails re-validation rather than returning a
/// path outside the contract.
pub fn homotopy_perturb(
    path: &LagrangianPath,
    seed: u64,
    magnitude: f64,
) -> Result<LagrangianPath> {
    if !(magnitude >= 0.0) || !magnitude.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "magnitude must be finite and nonnegative, got {magnitude}"
        )));
    }
    let space = path.space().clone();
    let n = space.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let last = path.len() - 1;
    let mut samples = Vec::with_capacity(path.len());
    for (i, (&t, frame)) in path.times().iter().zip(path.frames()).enumerate() {
        if i == 0 || i == last {
            samples.push((t, frame.clone()));
            continue;
        }
        // J-commuting skew generator: blocks [[A, -B], [B, A]] with A skew
        // and B symmetric.
        let a_raw = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let b_raw = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let a = (&a_raw - a_raw.transpose()) * 0.5;
        let b = (&b_raw + b_raw.transpose()) * 0.5;
        let mut z = DMatrix::<f64>::zeros(2 * n, 2 * n);
        z.view_mut((0, 0), (n, n)).copy_from(&a);
        z.view_mut((0, n), (n, n)).copy_from(&(-&b));
        z.view_mut((n, 0), (n, n)).copy_from(&b);
        z.view_mut((n, n), (n, n)).copy_from(&a);
        let norm = linalg::spectral_norm(&z)?;
        if norm > 0.0 {
            z /= norm;
        }
        let weight = magnitude * (PI * t).sin();
        let u = linalg::exp_matrix(&(z * weight))?;
        samples.push((t, apply_unitary(&u, frame)?));
    }
    LagrangianPath::with_step_cap(samples, path.step_cap())
}
