//! JSON records for frames and paths.
//!
//! Three concrete layouts, all with an explicit `n`:
//!
//! * a frame — `{"n": 1, "frame": [[1.0], [0.0]]}` with 2n rows of n
//!   entries (columns are the basis vectors);
//! * a symmetric-matrix path — `{"n": 1, "samples": [{"t": 0.0,
//!   "A": [[0.5]]}, ...]}`;
//! * a Lagrangian path — `{"n": 1, "samples": [{"t": 0.0,
//!   "frame": [[1.0], [0.0]]}, ...]}`, or the parametric shorthand
//!   `{"type": "rotation", "n": 1, "k": 2, "samples": 64}` which expands to
//!   the rotation loop on load.
//!
//! Loaders validate strictly — frames must already be orthonormal and
//! isotropic at the supplied tolerances; nothing is silently repaired.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maslov::{generator_loop, LagrangianPath};
use crate::spectral_flow::SymmetricPath;
use crate::symplectic::{LagrangianFrame, SymplecticSpace, Tolerances};

/// A single Lagrangian frame: 2n rows of n entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameRecord {
    pub n: usize,
    pub frame: Vec<Vec<f64>>,
}

/// One sample of a symmetric-matrix path.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymmetricSampleRecord {
    pub t: f64,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
}

/// A sampled path of symmetric n x n matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymmetricPathRecord {
    pub n: usize,
    pub samples: Vec<SymmetricSampleRecord>,
}

/// One sample of a Lagrangian path.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LagrangianSampleRecord {
    pub t: f64,
    pub frame: Vec<Vec<f64>>,
}

/// A sampled path of Lagrangian frames.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LagrangianPathRecord {
    pub n: usize,
    pub samples: Vec<LagrangianSampleRecord>,
}

/// Parametric shorthand for the rotation loop.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RotationRecord {
    #[serde(rename = "type")]
    pub kind: String,
    pub n: usize,
    pub k: i64,
    pub samples: usize,
}

/// What a JSON document contains, decided from its top-level keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    Frame,
    SymmetricPath,
    LagrangianPath,
    Rotation,
}

fn rows_to_matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    if rows.is_empty() {
        return Err(Error::Parse(format!("{what}: no rows")));
    }
    let cols = rows[0].len();
    if cols == 0 {
        return Err(Error::Parse(format!("{what}: empty rows")));
    }
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

fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

/// Inspects top-level keys to classify a JSON document.
pub fn detect_kind(json: &str) -> Result<InputKind> {
    let value: serde_json::Value =
        serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("expected a JSON object at the top level".into()))?;
    if let Some(kind) = obj.get("type") {
        return match kind.as_str() {
            Some("rotation") => Ok(InputKind::Rotation),
            Some(other) => Err(Error::Parse(format!("unknown input type {other:?}"))),
            None => Err(Error::Parse("\"type\" must be a string".into())),
        };
    }
    if obj.contains_key("frame") {
        return Ok(InputKind::Frame);
    }
    if let Some(samples) = obj.get("samples").and_then(|s| s.as_array()) {
        let first = samples
            .first()
            .ok_or_else(|| Error::Parse("\"samples\" is empty".into()))?;
        if first.get("A").is_some() {
            return Ok(InputKind::SymmetricPath);
        }
        if first.get("frame").is_some() {
            return Ok(InputKind::LagrangianPath);
        }
        return Err(Error::Parse(
            "samples carry neither \"A\" nor \"frame\" entries".into(),
        ));
    }
    Err(Error::Parse(
        "cannot classify input: expected \"frame\", \"samples\", or \"type\"".into(),
    ))
}

impl FrameRecord {
    pub fn from_frame(frame: &LagrangianFrame) -> Self {
        FrameRecord {
            n: frame.n(),
            frame: matrix_to_rows(frame.q()),
        }
    }

    pub fn to_frame(&self, tol: Tolerances) -> Result<LagrangianFrame> {
        let space = SymplecticSpace::with_tolerances(self.n, tol)?;
        let q = rows_to_matrix(&self.frame, "frame")?;
        if q.nrows() != 2 * self.n || q.ncols() != self.n {
            return Err(Error::Parse(format!(
                "frame must be {} x {} for n = {}, got {} x {}",
                2 * self.n,
                self.n,
                self.n,
                q.nrows(),
                q.ncols()
            )));
        }
        LagrangianFrame::from_orthonormal(&space, q)
    }
}

impl SymmetricPathRecord {
    pub fn from_path(path: &SymmetricPath) -> Self {
        SymmetricPathRecord {
            n: path.dim(),
            samples: path
                .times()
                .iter()
                .zip(path.matrices())
                .map(|(&t, a)| SymmetricSampleRecord {
                    t,
                    a: matrix_to_rows(a),
                })
                .collect(),
        }
    }

    pub fn to_path(&self) -> Result<SymmetricPath> {
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let a = rows_to_matrix(&s.a, &format!("sample {i}"))?;
                if a.nrows() != self.n || a.ncols() != self.n {
                    return Err(Error::Parse(format!(
                        "sample {i} is {} x {}, expected {} x {}",
                        a.nrows(),
                        a.ncols(),
                        self.n,
                        self.n
                    )));
                }
                Ok((s.t, a))
            })
            .collect::<Result<Vec<_>>>()?;
        SymmetricPath::new(samples)
    }
}

impl LagrangianPathRecord {
    pub fn from_path(path: &LagrangianPath) -> Self {
        LagrangianPathRecord {
            n: path.n(),
            samples: path
                .times()
                .iter()
                .zip(path.frames())
                .map(|(&t, f)| LagrangianSampleRecord {
                    t,
                    frame: matrix_to_rows(f.q()),
                })
                .collect(),
        }
    }

    pub fn to_path(&self, tol: Tolerances) -> Result<LagrangianPath> {
        let space = SymplecticSpace::with_tolerances(self.n, tol)?;
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let q = rows_to_matrix(&s.frame, &format!("sample {i}"))?;
                if q.nrows() != 2 * self.n || q.ncols() != self.n {
                    return Err(Error::Parse(format!(
                        "sample {i} frame is {} x {}, expected {} x {}",
                        q.nrows(),
                        q.ncols(),
                        2 * self.n,
                        self.n
                    )));
                }
                Ok((s.t, LagrangianFrame::from_orthonormal(&space, q)?))
            })
            .collect::<Result<Vec<_>>>()?;
        LagrangianPath::new(samples)
    }
}

impl RotationRecord {
    pub fn to_path(&self, tol: Tolerances) -> Result<LagrangianPath> {
        if self.kind != "rotation" {
            return Err(Error::Parse(format!(
                "unknown input type {:?}",
                self.kind
            )));
        }
        let space = SymplecticSpace::with_tolerances(self.n, tol)?;
        generator_loop(&space, self.k, self.samples)
    }
}

/// Loads a frame document.
pub fn load_frame(json: &str, tol: Tolerances) -> Result<LagrangianFrame> {
    let record: FrameRecord =
        serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    record.to_frame(tol)
}

/// Loads a symmetric-matrix path document.
pub fn load_symmetric_path(json: &str) -> Result<SymmetricPath> {
    let record: SymmetricPathRecord =
        serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    record.to_path()
}

/// Loads a Lagrangian path document, expanding the rotation shorthand.
pub fn load_lagrangian_path(json: &str, tol: Tolerances) -> Result<LagrangianPath> {
    match detect_kind(json)? {
        InputKind::Rotation => {
            let record: RotationRecord =
                serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
            record.to_path(tol)
        }
        InputKind::LagrangianPath => {
            let record: LagrangianPathRecord =
                serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
            record.to_path(tol)
        }
        other => Err(Error::Parse(format!(
            "expected a Lagrangian path document, found {other:?}"
        ))),
    }
}
