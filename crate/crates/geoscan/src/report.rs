//! JSON report assembly and the on-disk surface-file format.
//!
//! Every report embeds the tool version, the effective configuration, and
//! a sha256 digest of each input file, so a stored report pins down the
//! run that produced it.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::geodesic::{GeodesicVerdict, ScanReport, ScanRow, SurfaceCheck, TraceObservation};
use crate::limitset::{CircleFit, LimitSetSample, LocusKind};
use crate::normalsurface::NormalVector;
use crate::scalar::Real;

pub fn tool_json() -> Value {
    json!({
        "name": "geoscan",
        "version": env!("CARGO_PKG_VERSION"),
    })
}

pub fn input_json(path: &Path, sha256: &str) -> Value {
    json!({
        "path": path.display().to_string(),
        "sha256": sha256,
    })
}

pub fn trace_json(t: &TraceObservation) -> Value {
    json!({
        "word": t.word,
        "re": t.trace_re,
        "im": t.trace_im,
        "imaginary_magnitude": t.imaginary_magnitude,
        "certified_nonreal": t.certified_nonreal,
    })
}

pub fn verdict_json(v: &GeodesicVerdict) -> Value {
    match v {
        GeodesicVerdict::VolumeTooSmall => json!({ "kind": "VolumeTooSmall" }),
        GeodesicVerdict::NotFuchsian { witness } => json!({
            "kind": "NotFuchsian",
            "witness": trace_json(witness),
        }),
        GeodesicVerdict::FuchsianDoubleCover {
            half,
            half_euler_characteristic,
        } => json!({
            "kind": "FuchsianDoubleCover",
            "half": half.coords,
            "half_euler_characteristic": half_euler_characteristic,
        }),
        GeodesicVerdict::TotallyGeodesicCandidate { max_imaginary } => json!({
            "kind": "TotallyGeodesicCandidate",
            "max_imaginary": max_imaginary,
        }),
        GeodesicVerdict::NonOrientableTotallyGeodesicCandidate { max_imaginary } => json!({
            "kind": "NonOrientableTotallyGeodesicCandidate",
            "max_imaginary": max_imaginary,
        }),
    }
}

fn witness_of(v: &GeodesicVerdict) -> Value {
    match v {
        GeodesicVerdict::NotFuchsian { witness } => trace_json(witness),
        _ => Value::Null,
    }
}

pub fn fit_json<R: Real>(sample: &LimitSetSample<R>, fit: &CircleFit<R>) -> Value {
    let f = |x: R| x.to_f64().unwrap_or(f64::NAN);
    let kind = match &fit.kind {
        LocusKind::Circle { center, radius } => json!({
            "kind": "circle",
            "center": [f(center.re), f(center.im)],
            "radius": f(*radius),
        }),
        LocusKind::Line { point, direction } => json!({
            "kind": "line",
            "point": [f(point.re), f(point.im)],
            "direction": [f(direction.re), f(direction.im)],
        }),
    };
    json!({
        "fit": kind,
        "max_residual": f(fit.max_residual),
        "rms_residual": f(fit.rms_residual),
        "points_used": sample.points.len(),
        "skipped_infinite": sample.skipped_infinite,
        "seed": sample.seed,
        "max_word": sample.word_length_max,
    })
}

/// Per-surface block: coordinates, verdict, witness, the single-generator
/// traces, and the time the check took.
pub fn check_json(c: &SurfaceCheck) -> Value {
    json!({
        "coordinates": c.input_vector.coords,
        "traced_coordinates": c.traced_vector.coords,
        "euler_characteristic": c.euler_characteristic,
        "orientable": c.orientable,
        "verdict": verdict_json(&c.verdict),
        "witness": witness_of(&c.verdict),
        "mode": format!("{:?}", c.mode),
        "traces": c.generator_traces.iter().map(trace_json).collect::<Vec<_>>(),
        "max_imaginary": c.max_imaginary,
        "surface_generators": c.surface_generators,
        "words_tested": c.words_tested,
        "reducible_warning": c.reducible_warning,
        "tube_edges": c.tube_edges,
        "timings": { "check_s": c.seconds },
    })
}

fn row_json(row: &ScanRow) -> Value {
    match (&row.check, &row.error) {
        (Some(check), _) => check_json(check),
        (None, err) => json!({
            "coordinates": row.vector.coords,
            "euler_characteristic": row.euler_characteristic,
            "orientable": row.orientable,
            "tube_edges": row.tube_edges,
            "skipped": err.is_none(),
            "error": err,
        }),
    }
}

/// Manifold-level report: volume, the Euler-characteristic bound in
/// force, and one block per enumerated surface, with the enumeration and
/// check phases timed separately.
pub fn scan_json(report: &ScanReport) -> Value {
    json!({
        "volume": report.volume,
        "euler_bound": report.bound,
        "bound_overridden": report.bound_overridden,
        "complete": report.complete,
        "enumeration_error": report.enumeration_error,
        "manifold_verdict": report.manifold_verdict().as_ref().map(verdict_json),
        "tube_skipped": report.tube_skipped,
        "surfaces": report.rows.iter().map(row_json).collect::<Vec<_>>(),
        "timings": {
            "enumeration_s": report.enumeration_seconds,
            "check_s": report.check_seconds,
        },
    })
}

/// Wraps a command's body with the provenance every report carries.
/// The body's own keys stay top-level, next to tool/config/inputs.
pub fn wrap_report(command: &str, config: Value, inputs: Vec<Value>, body: Value) -> Value {
    let mut out = serde_json::Map::new();
    out.insert("tool".into(), tool_json());
    out.insert("command".into(), Value::String(command.into()));
    out.insert("config".into(), config);
    out.insert("inputs".into(), Value::Array(inputs));
    if let Value::Object(map) = body {
        for (k, v) in map {
            out.insert(k, v);
        }
    }
    Value::Object(out)
}

// ---------------------------------------------------------------------------
// Surface files.

/// On-disk form of a normal surface: its 7t coordinate vector plus the
/// digest of the triangulation it lives in, guarding against mixing files
/// from different manifolds.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceFile {
    pub coordinates: Vec<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triangulation_hash: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum SurfaceFileError {
    #[error("reading surface file: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing surface file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("surface has {got} coordinates, triangulation needs {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("surface was saved for a triangulation with digest {file}, input has {actual}")]
    HashMismatch { file: String, actual: String },
}

impl SurfaceFile {
    pub fn from_path(path: &Path) -> Result<Self, SurfaceFileError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Checks the vector length and, when the file names a triangulation
    /// digest, that it matches the input actually being used.
    pub fn into_vector(
        self,
        num_tetrahedra: usize,
        tri_sha256: Option<&str>,
    ) -> Result<NormalVector, SurfaceFileError> {
        if self.coordinates.len() != 7 * num_tetrahedra {
            return Err(SurfaceFileError::WrongLength {
                expected: 7 * num_tetrahedra,
                got: self.coordinates.len(),
            });
        }
        if let (Some(file), Some(actual)) = (&self.triangulation_hash, tri_sha256) {
            if file != actual {
                return Err(SurfaceFileError::HashMismatch {
                    file: file.clone(),
                    actual: actual.to_string(),
                });
            }
        }
        Ok(NormalVector {
            coords: self.coordinates,
        })
    }
}
