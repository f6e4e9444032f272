//! Command-line diagnostics for Lagrangian subspaces and their paths.
//!
//! Every subcommand reads JSON documents (see the `io` module of the core
//! crate for layouts), prints one report, and exits 0 on success, 1 on
//! input violations, 2 when the data is inadmissible for the requested
//! computation (too coarse, no certified partition, ...), and 3 when a
//! numerical routine fails its own verification.

mod output;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde_json::Value;

use maslov_core::io::{
    detect_kind, load_frame, load_lagrangian_path, load_symmetric_path, FrameRecord, InputKind,
    LagrangianPathRecord, RotationRecord, SymmetricPathRecord,
};
use maslov_core::maslov::DEFAULT_STEP_CAP;
use maslov_core::{
    apply_unitary, complementary_perturbation, det_squared_winding, gap_inequality_report,
    generator_loop, intersection_dim, maslov_index_with_margin, minimum_gap, spectral_flow_with,
    transitive_unitary, ComplementaryPair, Error, ErrorClass, FlowOptions, Result,
    SymplecticSpace, Tolerances,
};

use output::{fnum, matrix_rows, to_json_string, Report};

#[derive(Parser)]
#[command(
    name = "maslov",
    version,
    about = "Lagrangian subspace diagnostics: charts, transport, spectral flow, and loop indices"
)]
struct Cli {
    /// Frame validation tolerance (orthonormality and isotropy residuals).
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_frame: f64,

    /// Rank decision tolerance (intersections, kernels, defect ranks).
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_rank: f64,

    /// Margin floor for transversality certificates.
    #[arg(long, global = true, default_value_t = 1e-3)]
    margin: f64,

    /// Seed for every randomized search; identical seeds give identical
    /// output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output format; both print floats with 17 significant digits.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate an input document and report residual magnitudes.
    Check { file: PathBuf },
    /// Intersection index of a Lagrangian path relative to a reference
    /// frame, cross-checked against the determinant winding on loops.
    Maslov { path: PathBuf, l0: PathBuf },
    /// Spectral flow of a symmetric-matrix path with interval certificates.
    Specflow { path: PathBuf },
    /// Orthogonal J-commuting transport taking the first Lagrangian onto
    /// the second.
    Transport {
        l0: PathBuf,
        l: PathBuf,
        /// Singular-value floor for the finite-rank correction.
        #[arg(long, default_value_t = 1e-3)]
        sv_floor: f64,
    },
    /// Minimal perturbation of the second Lagrangian restoring
    /// transversality to the first.
    Complement { l0: PathBuf, l1: PathBuf },
    /// Emit a rotation loop as an explicit sampled path document.
    Gen {
        n: usize,
        #[arg(allow_negative_numbers = true)]
        k: i64,
        samples: usize,
        /// Write the document here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-sided gap estimate for a Lagrangian read in the chart around a
    /// complementary pair.
    Gap {
        l0: PathBuf,
        l1: PathBuf,
        l: PathBuf,
    },
}

struct Outcome {
    rendered: String,
    code: i32,
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.rendered);
            std::process::exit(outcome.code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e.class() {
                ErrorClass::Input => 1,
                ErrorClass::Admissibility => 2,
                ErrorClass::Numerical => 3,
            };
            std::process::exit(code);
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let tol = Tolerances {
        frame: cli.tol_frame,
        rank: cli.tol_rank,
    };
    let machine = cli.format == Format::Machine;
    match &cli.cmd {
        Cmd::Check { file } => cmd_check(file, tol, machine),
        Cmd::Maslov { path, l0 } => cmd_maslov(path, l0, tol, cli.margin, cli.seed, machine),
        Cmd::Specflow { path } => cmd_specflow(path, tol, machine),
        Cmd::Transport { l0, l, sv_floor } => cmd_transport(l0, l, tol, *sv_floor, machine),
        Cmd::Complement { l0, l1 } => cmd_complement(l0, l1, tol, cli.seed, machine),
        Cmd::Gen {
            n,
            k,
            samples,
            out,
        } => cmd_gen(*n, *k, *samples, out.as_deref(), tol),
        Cmd::Gap { l0, l1, l } => cmd_gap(l0, l1, l, tol, machine),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(Error::Io)
}

fn rows_matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(Error::Parse(format!("{what}: empty matrix")));
    }
    let cols = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Parse(format!(
                "{what}: row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |r, c| rows[r][c]))
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, &x| acc.max(x.abs()))
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s))
}

fn rank_at(m: &DMatrix<f64>, tol: f64) -> usize {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > tol)
        .count()
}

/// Frame residuals against the contract: orthonormal columns, isotropy.
fn frame_residuals(q: &DMatrix<f64>, j: &DMatrix<f64>) -> (f64, f64) {
    let n = q.ncols();
    let orth = max_abs(&(q.transpose() * q - DMatrix::identity(n, n)));
    let iso = max_abs(&(q.transpose() * j * q));
    (orth, iso)
}

fn cmd_check(file: &Path, tol: Tolerances, machine: bool) -> Result<Outcome> {
    let json = read(file)?;
    let kind = detect_kind(&json)?;
    let mut report = Report::new();
    let mut violations: Vec<String> = Vec::new();
    match kind {
        InputKind::Frame => {
            let record: FrameRecord =
                serde_json::from_str(&json).map_err(|e| Error::Parse(e.to_string()))?;
            let space = SymplecticSpace::with_tolerances(record.n, tol)?;
            let q = rows_matrix(&record.frame, "frame")?;
            if q.nrows() != 2 * record.n || q.ncols() != record.n {
                return Err(Error::Parse(format!(
                    "frame must be {} x {}, got {} x {}",
                    2 * record.n,
                    record.n,
                    q.nrows(),
                    q.ncols()
                )));
            }
            let (orth, iso) = frame_residuals(&q, space.j());
            report.text("kind", "frame");
            report.uint("n", record.n);
            report.float("orthonormality_residual", orth);
            report.float("isotropy_residual", iso);
            if orth > tol.frame {
                violations.push(format!(
                    "columns are not orthonormal: residual {} exceeds {}",
                    output::fmt_float(orth),
                    output::fmt_float(tol.frame)
                ));
            }
            if iso > tol.frame {
                violations.push(format!(
                    "subspace is not isotropic: residual {} exceeds {}",
                    output::fmt_float(iso),
                    output::fmt_float(tol.frame)
                ));
            }
        }
        InputKind::SymmetricPath => {
            let record: SymmetricPathRecord =
                serde_json::from_str(&json).map_err(|e| Error::Parse(e.to_string()))?;
            report.text("kind", "symmetric-path");
            report.uint("n", record.n);
            report.uint("samples", record.samples.len());
            let mut worst_asym = 0.0_f64;
            for (i, s) in record.samples.iter().enumerate() {
                let a = rows_matrix(&s.a, &format!("sample {i}"))?;
                if a.nrows() != record.n || a.ncols() != record.n {
                    return Err(Error::Parse(format!(
                        "sample {i} is {} x {}, expected {} x {}",
                        a.nrows(),
                        a.ncols(),
                        record.n,
                        record.n
                    )));
                }
                let scale = max_abs(&a).max(1.0);
                let asym = max_abs(&(&a - a.transpose()));
                worst_asym = worst_asym.max(asym);
                if asym > 1e-10 * scale {
                    violations.push(format!(
                        "sample {i} is not symmetric: residual {} exceeds {}",
                        output::fmt_float(asym),
                        output::fmt_float(1e-10 * scale)
                    ));
                }
            }
            report.float("max_asymmetry", worst_asym);
            check_parameters(
                &record.samples.iter().map(|s| s.t).collect::<Vec<_>>(),
                &mut violations,
            );
        }
        InputKind::LagrangianPath => {
            let record: LagrangianPathRecord =
                serde_json::from_str(&json).map_err(|e| Error::Parse(e.to_string()))?;
            let space = SymplecticSpace::with_tolerances(record.n, tol)?;
            report.text("kind", "lagrangian-path");
            report.uint("n", record.n);
            report.uint("samples", record.samples.len());
            let mut worst_orth = 0.0_f64;
            let mut worst_iso = 0.0_f64;
            let mut worst_step = 0.0_f64;
            let mut previous: Option<DMatrix<f64>> = None;
            for (i, s) in record.samples.iter().enumerate() {
                let q = rows_matrix(&s.frame, &format!("sample {i}"))?;
                if q.nrows() != 2 * record.n || q.ncols() != record.n {
                    return Err(Error::Parse(format!(
                        "sample {i} frame is {} x {}, expected {} x {}",
                        q.nrows(),
                        q.ncols(),
                        2 * record.n,
                        record.n
                    )));
                }
                let (orth, iso) = frame_residuals(&q, space.j());
                worst_orth = worst_orth.max(orth);
                worst_iso = worst_iso.max(iso);
                if orth > tol.frame {
                    violations.push(format!(
                        "sample {i}: columns not orthonormal, residual {}",
                        output::fmt_float(orth)
                    ));
                }
                if iso > tol.frame {
                    violations.push(format!(
                        "sample {i}: not isotropic, residual {}",
                        output::fmt_float(iso)
                    ));
                }
                let projection = &q * q.transpose();
                if let Some(prev) = &previous {
                    let step = spectral_norm(&(&projection - prev));
                    worst_step = worst_step.max(step);
                    if step > DEFAULT_STEP_CAP * (1.0 + 1e-9) {
                        violations.push(format!(
                            "projection step {} between samples {} and {i} exceeds the cap {}",
                            output::fmt_float(step),
                            i - 1,
                            output::fmt_float(DEFAULT_STEP_CAP)
                        ));
                    }
                }
                previous = Some(projection);
            }
            report.float("max_orthonormality_residual", worst_orth);
            report.float("max_isotropy_residual", worst_iso);
            report.float("max_projection_step", worst_step);
            check_parameters(
                &record.samples.iter().map(|s| s.t).collect::<Vec<_>>(),
                &mut violations,
            );
        }
        InputKind::Rotation => {
            let record: RotationRecord =
                serde_json::from_str(&json).map_err(|e| Error::Parse(e.to_string()))?;
            // Expansion validates everything, including coarseness.
            let path = record.to_path(tol)?;
            report.text("kind", "rotation");
            report.uint("n", record.n);
            report.int("k", record.k);
            report.uint("samples", record.samples);
            report.boolean("loop", path.is_loop()?);
        }
    }
    let valid = violations.is_empty();
    report.boolean("valid", valid);
    report.push(
        "violations",
        Value::Array(violations.iter().map(|v| Value::String(v.clone())).collect()),
    );
    Ok(Outcome {
        rendered: report.render(machine),
        code: if valid { 0 } else { 1 },
    })
}

fn check_parameters(times: &[f64], violations: &mut Vec<String>) {
    if times.len() < 2 {
        violations.push(format!("a path needs at least 2 samples, got {}", times.len()));
        return;
    }
    if times[0].abs() > 1e-9 {
        violations.push(format!(
            "first parameter must be 0, got {}",
            output::fmt_float(times[0])
        ));
    }
    if (times[times.len() - 1] - 1.0).abs() > 1e-9 {
        violations.push(format!(
            "last parameter must be 1, got {}",
            output::fmt_float(times[times.len() - 1])
        ));
    }
    for k in 1..times.len() {
        if times[k] <= times[k - 1] {
            violations.push(format!(
                "parameters not strictly increasing at sample {k}: {} then {}",
                output::fmt_float(times[k - 1]),
                output::fmt_float(times[k])
            ));
        }
    }
}

fn cmd_maslov(
    path_file: &Path,
    l0_file: &Path,
    tol: Tolerances,
    margin: f64,
    seed: u64,
    machine: bool,
) -> Result<Outcome> {
    let path = load_lagrangian_path(&read(path_file)?, tol)?;
    let l0 = load_frame(&read(l0_file)?, tol)?;
    let result = maslov_index_with_margin(&path, &l0, seed, margin)?;
    let looped = path.is_loop()?;

    let mut report = Report::new();
    report.uint("n", path.n());
    report.uint("samples", path.len());
    report.boolean("loop", looped);
    report.int("index", result.index);
    report.uint("segment_count", result.certificate.segment_count());
    let segments: Vec<Value> = (0..result.certificate.segment_count())
        .map(|j| {
            let mut m = serde_json::Map::new();
            m.insert(
                "start".into(),
                Value::from(result.certificate.breakpoints[j] as u64),
            );
            m.insert(
                "end".into(),
                Value::from(result.certificate.breakpoints[j + 1] as u64),
            );
            m.insert("flow".into(), Value::from(result.segments[j].0));
            m.insert("margin".into(), fnum(result.certificate.margins[j]));
            Value::Object(m)
        })
        .collect();
    report.push("segments", Value::Array(segments));

    let mut code = 0;
    if looped {
        let winding = det_squared_winding(&path)?;
        let agrees = winding == -result.index;
        report.int("winding", winding);
        report.boolean("winding_agrees", agrees);
        if !agrees {
            code = 3;
        }
    }
    Ok(Outcome {
        rendered: report.render(machine),
        code,
    })
}

fn cmd_specflow(path_file: &Path, tol: Tolerances, machine: bool) -> Result<Outcome> {
    let path = load_symmetric_path(&read(path_file)?)?;
    let opts = FlowOptions {
        barrier_cap: 1.0,
        tol_rank: tol.rank,
    };
    let flow = spectral_flow_with(&path, &opts)?;
    let mut report = Report::new();
    report.uint("n", path.dim());
    report.uint("samples", path.len());
    report.int("flow", flow.total);
    report.boolean("admissible", flow.admissible);
    let intervals: Vec<Value> = flow
        .intervals
        .iter()
        .map(|r| {
            let mut m = serde_json::Map::new();
            m.insert("step".into(), fnum(r.step));
            m.insert("barrier".into(), fnum(r.barrier));
            m.insert("level".into(), fnum(r.level));
            m.insert("count_start".into(), Value::from(r.count_start as u64));
            m.insert("count_end".into(), Value::from(r.count_end as u64));
            m.insert("contribution".into(), Value::from(r.contribution));
            Value::Object(m)
        })
        .collect();
    report.push("intervals", Value::Array(intervals));
    Ok(Outcome {
        rendered: report.render(machine),
        code: 0,
    })
}

fn cmd_transport(
    l0_file: &Path,
    l_file: &Path,
    tol: Tolerances,
    sv_floor: f64,
    machine: bool,
) -> Result<Outcome> {
    let l0 = load_frame(&read(l0_file)?, tol)?;
    let l = load_frame(&read(l_file)?, tol)?;
    let result = transitive_unitary(&l0, &l, sv_floor)?;
    let space = l0.space();
    let dim = space.dim();
    let u = &result.u.matrix;

    let orth = max_abs(&(u.transpose() * u - DMatrix::identity(dim, dim)));
    let jcomm = max_abs(&(u * space.j() - space.j() * u));
    let image = apply_unitary(u, &l0)?;
    let image_distance = max_abs(&(image.projection() - l.projection()));
    let bounds_hold = result.u.bound_holds(tol.rank)?
        && result.s.bound_holds(tol.rank)?
        && result.t.bound_holds(tol.rank)?;

    let mut report = Report::new();
    report.uint("n", l0.n());
    report.float("sv_floor", sv_floor);
    report.uint("correction_rank", result.k_rank);
    report.uint("t_defect_rank", result.t.defect_rank(tol.rank)?);
    report.uint("t_rank_bound", result.t.rank_bound);
    report.uint("s_defect_rank", result.s.defect_rank(tol.rank)?);
    report.uint("s_rank_bound", result.s.rank_bound);
    report.uint("u_defect_rank", result.u.defect_rank(tol.rank)?);
    report.uint("u_rank_bound", result.u.rank_bound);
    report.boolean("rank_bounds_hold", bounds_hold);
    report.float("orthogonality_residual", orth);
    report.float("j_commutation_residual", jcomm);
    report.float("image_distance", image_distance);
    report.push("u", matrix_rows(u));
    Ok(Outcome {
        rendered: report.render(machine),
        code: if bounds_hold { 0 } else { 3 },
    })
}

fn cmd_complement(
    l0_file: &Path,
    l1_file: &Path,
    tol: Tolerances,
    seed: u64,
    machine: bool,
) -> Result<Outcome> {
    let l0 = load_frame(&read(l0_file)?, tol)?;
    let l1 = load_frame(&read(l1_file)?, tol)?;
    let before_dim = intersection_dim(&l0, &l1)?;
    let moved = complementary_perturbation(&l0, &l1, seed)?;
    let after_dim = intersection_dim(&l0, &moved)?;
    let gap_after = minimum_gap(&l0, &moved)?;
    let shift = moved.projection() - l1.projection();
    let shift_rank = rank_at(&shift, tol.rank);
    let bound = 2 * before_dim;
    let bound_holds = shift_rank <= bound;

    let mut report = Report::new();
    report.uint("n", l0.n());
    report.uint("intersection_before", before_dim);
    report.uint("intersection_after", after_dim);
    report.float("gap_before", minimum_gap(&l0, &l1)?);
    report.float("gap_after", gap_after);
    report.uint("projection_shift_rank", shift_rank);
    report.uint("shift_rank_bound", bound);
    report.boolean("shift_rank_bound_holds", bound_holds);
    report.push("frame", matrix_rows(moved.q()));
    Ok(Outcome {
        rendered: report.render(machine),
        code: if after_dim == 0 && bound_holds { 0 } else { 3 },
    })
}

fn cmd_gen(
    n: usize,
    k: i64,
    samples: usize,
    out: Option<&Path>,
    tol: Tolerances,
) -> Result<Outcome> {
    let space = SymplecticSpace::with_tolerances(n, tol)?;
    let path = generator_loop(&space, k, samples)?;
    let record = LagrangianPathRecord::from_path(&path);
    let json = to_json_string(&record);
    match out {
        Some(file) => {
            fs::write(file, &json).map_err(Error::Io)?;
            Ok(Outcome {
                rendered: String::new(),
                code: 0,
            })
        }
        None => Ok(Outcome {
            rendered: json,
            code: 0,
        }),
    }
}

fn cmd_gap(
    l0_file: &Path,
    l1_file: &Path,
    l_file: &Path,
    tol: Tolerances,
    machine: bool,
) -> Result<Outcome> {
    let l0 = load_frame(&read(l0_file)?, tol)?;
    let l1 = load_frame(&read(l1_file)?, tol)?;
    let l = load_frame(&read(l_file)?, tol)?;
    let pair = ComplementaryPair::new(l0, l1)?;
    let gap = gap_inequality_report(&pair, &l)?;

    let mut report = Report::new();
    report.uint("n", pair.l0().n());
    report.uint("kernel_dim", gap.dim_ker_a);
    report.float("gap_l_l0", gap.gap_l_l0);
    report.float("reduced_modulus", gap.reduced_modulus);
    report.float("graph_norm", gap.graph_norm);
    report.float("gap_l0_l1", gap.gap_l0_l1);
    report.float("slack", gap.slack);
    report.boolean("degenerate", gap.degenerate);
    report.boolean("lower_holds", gap.lower_holds);
    report.boolean("upper_holds", gap.upper_holds);
    let ok = gap.lower_holds && gap.upper_holds;
    Ok(Outcome {
        rendered: report.render(machine),
        code: if ok { 0 } else { 3 },
    })
}
