//! Decides whether closed normal surfaces are totally geodesic.
//!
//! The pipeline per surface: build the normal surface complex, replace a
//! one-sided surface by its orientation double cover (double coordinates),
//! present its fundamental group from the arc gluings, push each group
//! generator through the manifold holonomy along its face-crossing path,
//! and test every short word in those matrices for a real trace. A
//! representation conjugate into SL(2, R) has all traces real, so a single
//! word with a certifiably nonreal trace rules the surface out; when every
//! tested trace is real the surface is reported as a candidate, with even
//! vectors first checked for being the orientation double cover of a
//! one-sided surface (the half is then the geodesic object).
//!
//! The manifold-level scan enumerates all closed surfaces within the
//! volume-derived Euler characteristic bound and runs the check on each,
//! skipping surfaces whose quads fully encircle an edge (such a surface
//! carries a tube and cannot be geodesic).

use std::cmp::Ordering;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_complex::Complex;

use crate::enumerate::{enumerate_closed_surfaces, EnumerationConfig, EnumerationError};
use crate::fundgroup::{surface_group, FaceCrossing, GroupError, ManifoldSkeleton};
use crate::holonomy::{
    path_matrix, word_product, ExactHolonomy, HolonomyError, Mat2, ProjPoint, Representation,
};
use crate::normalsurface::{
    build_surface, quad_kind_of_pair, satisfies_matching, NormalSurfaceError, NormalVector,
};
use crate::numfield::poly::q_from_i64;
use crate::numfield::{
    certified_sign, embedding_is_real, ExactComplex, FieldElement, FieldError, NumberField,
    RealnessConfig, RealnessVerdict,
};
use crate::scalar::Real;
use crate::triangulation::{IdealTriangulation, EDGE_ENDPOINTS};
use crate::volume::{compute_volume, euler_characteristic_bound, volume_per_euler_unit};

#[derive(Debug, thiserror::Error)]
pub enum GeodesicError {
    #[error("normal surface rejected: {0}")]
    Surface(#[from] NormalSurfaceError),
    #[error("surface group construction failed: {0}")]
    Group(#[from] GroupError),
    #[error("holonomy failure: {0}")]
    Holonomy(#[from] HolonomyError),
    #[error("surface enumeration failed: {0}")]
    Enumeration(EnumerationError),
    #[error("exact arithmetic failure: {0}")]
    Exact(#[from] FieldError),
    #[error("surface check timed out during {stage}")]
    Timeout { stage: &'static str },
    #[error("doubled one-sided surface is not connected and orientable")]
    MalformedDouble,
}

/// How trace realness was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    /// |Im tr| compared against a floating-point threshold.
    NumericThreshold,
    /// Nonrealness certified by interval arithmetic over the shape field;
    /// chosen automatically when exact holonomy data is present.
    CertifiedNegative,
}

/// The trace of one tested word.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceObservation {
    /// Signed one-based letters in the surface group generators.
    pub word: Vec<i32>,
    pub trace_re: f64,
    pub trace_im: f64,
    /// |Im tr|, the quantity tested against the threshold.
    pub imaginary_magnitude: f64,
    /// Interval arithmetic proved the trace is off the real line.
    pub certified_nonreal: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GeodesicVerdict {
    /// The manifold volume is below the cost of one unit of Euler
    /// characteristic, so no closed essential surface exists at all.
    VolumeTooSmall,
    /// Some word in the surface group has a nonreal trace; the witness is
    /// the offending word with the largest imaginary magnitude.
    NotFuchsian { witness: TraceObservation },
    /// Every tested trace is real and the surface is the orientation
    /// double cover of the one-sided surface with halved coordinates;
    /// the half is the object that can be totally geodesic.
    FuchsianDoubleCover {
        half: NormalVector,
        half_euler_characteristic: i64,
    },
    /// Every tested trace is real for a two-sided surface.
    TotallyGeodesicCandidate { max_imaginary: f64 },
    /// The input was one-sided and every tested trace of its orientation
    /// double cover is real.
    NonOrientableTotallyGeodesicCandidate { max_imaginary: f64 },
}

#[derive(Clone, Debug)]
pub struct GeodesicConfig {
    /// |Im tr| above this is treated as off the real line in numeric mode.
    pub imaginary_threshold: f64,
    /// Wall-clock budget for a single surface check.
    pub surface_timeout: Duration,
    /// Replaces the volume-derived Euler characteristic bound in scans.
    /// The volume gate is exactly "derived bound is zero", so an override
    /// of one or more also bypasses the gate.
    pub euler_bound_override: Option<i64>,
    /// Skip surfaces whose quads fully encircle an edge class.
    pub tube_filter: bool,
    /// Worker threads for scans; `None` uses the available parallelism.
    pub threads: Option<usize>,
    /// Budgets for the enumeration stage of scans.
    pub enumeration: EnumerationConfig,
    /// Interval refinement settings for certified trace tests.
    pub realness: RealnessConfig,
}

impl Default for GeodesicConfig {
    fn default() -> Self {
        GeodesicConfig {
            imaginary_threshold: 0.01,
            surface_timeout: Duration::from_secs(5000),
            euler_bound_override: None,
            tube_filter: true,
            threads: None,
            enumeration: EnumerationConfig::default(),
            realness: RealnessConfig::default(),
        }
    }
}

// ---------------------------------------------------------------------------
// Trace test set.

/// Words whose traces determine realness of the whole representation up to
/// the usual trace identities: every single generator, every ordered pair
/// i <= j, and every ordered triple i <= j <= k, with repetition. For n
/// generators that is n + n(n+1)/2 + n(n+1)(n+2)/6 words.
pub fn trace_test_words(n: usize) -> Vec<Vec<i32>> {
    let n = n as i32;
    let mut words = Vec::new();
    for i in 1..=n {
        words.push(vec![i]);
    }
    for i in 1..=n {
        for j in i..=n {
            words.push(vec![i, j]);
        }
    }
    for i in 1..=n {
        for j in i..=n {
            for k in j..=n {
                words.push(vec![i, j, k]);
            }
        }
    }
    words
}

// ---------------------------------------------------------------------------
// Certified nonrealness of traces.

/// Projective trace invariant tr^2/det of a matrix over the shape field,
/// tested for a certifiably nonreal or certifiably negative embedding.
/// Either one proves the trace of the det-normalized matrix is off the
/// real line: nonreal tr^2/det directly, and negative real tr^2/det makes
/// the normalized trace purely imaginary.
fn certify_nonreal_embedded(
    m: &Mat2<FieldElement>,
    realness: &RealnessConfig,
) -> Result<bool, FieldError> {
    let t = m.trace();
    let inv = t.mul(&t)?.div(&m.det())?;
    if embedding_is_real(&inv, realness) == RealnessVerdict::CertifiedNotReal {
        return Ok(true);
    }
    Ok(certified_sign(&inv, realness) == Some(Ordering::Less))
}

/// Same invariant for split shapes (real field, complex parts stored
/// separately). The imaginary part of tr^2/det is a field element whose
/// embedding is real, so it vanishes exactly when the element is zero;
/// otherwise the trace is certifiably nonreal. A zero imaginary part
/// reduces the question to the certified sign of the real part. Sound
/// only when the distinguished root is real, which `split_root_is_real`
/// gates.
fn certify_nonreal_split(
    m: &Mat2<ExactComplex>,
    realness: &RealnessConfig,
) -> Result<bool, FieldError> {
    let t = m.trace();
    let inv = t.mul(&t)?.div(&m.det())?;
    if !inv.im.is_zero() {
        return Ok(true);
    }
    Ok(certified_sign(&inv.re, realness) == Some(Ordering::Less))
}

/// Split-lane soundness gate: the field generator must not be certifiably
/// nonreal. Split exact structures declare a real distinguished root; this
/// catches files that violate the declaration.
fn split_root_is_real(field: &std::sync::Arc<NumberField>, realness: &RealnessConfig) -> bool {
    if field.degree() == 1 {
        return true;
    }
    let gen = match FieldElement::from_coeffs(field, vec![q_from_i64(0), q_from_i64(1)]) {
        Ok(g) => g,
        Err(_) => return false,
    };
    embedding_is_real(&gen, realness) != RealnessVerdict::CertifiedNotReal
}

// ---------------------------------------------------------------------------
// Trace survey.

#[derive(Clone, Debug)]
pub struct TraceSurvey {
    pub mode: CheckMode,
    /// One observation per tested word, in `trace_test_words` order.
    pub observations: Vec<TraceObservation>,
    /// Largest |Im tr| seen across all words.
    pub max_imaginary: f64,
    /// The nonreal word with the largest imaginary magnitude, if any word
    /// failed the realness test of the active mode.
    pub witness: Option<TraceObservation>,
}

/// Tests every short word over determinant-one generators for a real
/// trace. With exact matrices present the verdict per word is certified
/// and numeric magnitudes are reported alongside; otherwise |Im tr| is
/// compared against the threshold.
pub fn survey_traces<R: Real>(
    generators: &[Mat2<Complex<R>>],
    exact: Option<&ExactHolonomy>,
    threshold: f64,
    realness: &RealnessConfig,
    deadline: Option<Instant>,
) -> Result<TraceSurvey, GeodesicError> {
    let words = trace_test_words(generators.len());
    let sample = Complex::new(R::zero(), R::zero());
    let mode = if exact.is_some() {
        CheckMode::CertifiedNegative
    } else {
        CheckMode::NumericThreshold
    };
    let split_ok = match exact {
        Some(ExactHolonomy::Split { field, .. }) => split_root_is_real(field, realness),
        _ => true,
    };
    let mut observations: Vec<TraceObservation> = Vec::with_capacity(words.len());
    let mut max_imaginary = 0.0f64;
    let mut witness_at: Option<usize> = None;
    for (wi, word) in words.iter().enumerate() {
        if wi % 64 == 0 {
            check_deadline(deadline, "trace survey")?;
        }
        let m = word_product(generators, word, &sample);
        let tr = m.trace();
        let trace_re = tr.re.to_f64().unwrap_or(f64::NAN);
        let trace_im = tr.im.to_f64().unwrap_or(f64::NAN);
        let imaginary_magnitude = trace_im.abs();
        let certified_nonreal = match exact {
            None => false,
            Some(ExactHolonomy::Embedded {
                field, generators, ..
            }) => {
                let em = word_product(generators, word, &field.zero());
                certify_nonreal_embedded(&em, realness)?
            }
            Some(ExactHolonomy::Split {
                field, generators, ..
            }) => {
                if split_ok {
                    let em = word_product(
                        generators,
                        word,
                        &ExactComplex::from_real(field.zero()),
                    );
                    certify_nonreal_split(&em, realness)?
                } else {
                    false
                }
            }
        };
        let nonreal = match mode {
            CheckMode::NumericThreshold => imaginary_magnitude > threshold,
            CheckMode::CertifiedNegative => certified_nonreal,
        };
        max_imaginary = max_imaginary.max(imaginary_magnitude);
        if nonreal
            && witness_at
                .map(|w| observations[w as usize].imaginary_magnitude < imaginary_magnitude)
                .unwrap_or(true)
        {
            witness_at = Some(wi);
        }
        observations.push(TraceObservation {
            word: word.clone(),
            trace_re,
            trace_im,
            imaginary_magnitude,
            certified_nonreal,
        });
    }
    let witness = witness_at.map(|i| observations[i].clone());
    Ok(TraceSurvey {
        mode,
        observations,
        max_imaginary,
        witness,
    })
}

// ---------------------------------------------------------------------------
// Reducibility diagnostic.

/// A projective point fixed by every matrix in the family, if one exists
/// within the relative tolerance. A common fixed point means the matrix
/// group is reducible, so real traces may reflect a degenerate
/// representation rather than a Fuchsian one; callers surface this as a
/// warning, not a verdict.
pub fn common_fixed_point<R: Real>(
    mats: &[Mat2<Complex<R>>],
    tolerance: R,
) -> Option<ProjPoint<Complex<R>>> {
    let norm = |z: &Complex<R>| z.norm_sqr().sqrt();
    let one = Complex::new(R::one(), R::zero());
    let zero = Complex::new(R::zero(), R::zero());
    let scale_of = |m: &Mat2<Complex<R>>| {
        norm(&m.a)
            .max(norm(&m.b))
            .max(norm(&m.c))
            .max(norm(&m.d))
            .max(R::one())
    };
    // Candidate fixed points of the first matrix that moves something:
    // solutions of c z^2 + (d - a) z w - b w^2 = 0 in [z : w].
    let mut candidates: Vec<ProjPoint<Complex<R>>> = Vec::new();
    let mut nonscalar = false;
    for m in mats {
        let s = scale_of(m);
        let offdiag = norm(&m.b).max(norm(&m.c)).max(norm(&(m.a - m.d)));
        if offdiag <= tolerance * s {
            continue;
        }
        nonscalar = true;
        let dma = m.d - m.a;
        if norm(&m.c) <= tolerance * s {
            candidates.push(ProjPoint(one, zero));
            if norm(&dma) > tolerance * s {
                candidates.push(ProjPoint(m.b / dma, one));
            }
        } else {
            let disc = (dma * dma + Complex::new(R::of(4.0), R::zero()) * m.b * m.c).sqrt();
            let two_c = Complex::new(R::of(2.0), R::zero()) * m.c;
            candidates.push(ProjPoint((-dma + disc) / two_c, one));
            candidates.push(ProjPoint((-dma - disc) / two_c, one));
        }
        break;
    }
    if !nonscalar {
        // Every matrix is scalar; nothing distinguishes any point, and a
        // warning would be noise on top of the trivial representation.
        return None;
    }
    'candidate: for p in candidates {
        let pn = norm(&p.0).max(norm(&p.1));
        for m in mats {
            let q = m.apply(&p);
            let qn = norm(&q.0).max(norm(&q.1));
            if qn <= R::epsilon() {
                continue 'candidate;
            }
            if norm(&q.wedge(&p)) > tolerance * qn * pn {
                continue 'candidate;
            }
        }
        return Some(p);
    }
    None
}

// ---------------------------------------------------------------------------
// Tube obstruction.

/// Edge classes fully encircled by quads of the surface: every member
/// (tet, edge) slot carries at least one quad of the kind whose partition
/// pairs the edge's endpoints. Such a surface contains a tube around the
/// edge, is compressible, and therefore cannot be totally geodesic.
pub fn tube_obstructed_edges<R: Real>(
    tri: &IdealTriangulation<R>,
    vec: &NormalVector,
) -> Vec<usize> {
    tri.edge_classes()
        .iter()
        .enumerate()
        .filter_map(|(ci, class)| {
            let encircled = !class.members.is_empty()
                && class.members.iter().all(|&(tet, e)| {
                    let (a, b) = EDGE_ENDPOINTS[e];
                    vec.quad(tet, quad_kind_of_pair(a, b)) >= 1
                });
            encircled.then_some(ci)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Single-surface check.

#[derive(Clone, Debug)]
pub struct SurfaceCheck {
    pub verdict: GeodesicVerdict,
    pub mode: CheckMode,
    /// The vector as given.
    pub input_vector: NormalVector,
    /// The vector actually traced: doubled when the input was one-sided.
    pub traced_vector: NormalVector,
    /// Euler characteristic and orientability of the input surface.
    pub euler_characteristic: i64,
    pub orientable: bool,
    pub surface_generators: usize,
    pub words_tested: usize,
    /// Traces of the single-generator words.
    pub generator_traces: Vec<TraceObservation>,
    pub max_imaginary: f64,
    /// The surface generators share a fixed point on the sphere at
    /// infinity, so the restricted representation is reducible.
    pub reducible_warning: bool,
    /// Edge classes fully encircled by the surface's quads.
    pub tube_edges: Vec<usize>,
    pub seconds: f64,
}

fn check_deadline(deadline: Option<Instant>, stage: &'static str) -> Result<(), GeodesicError> {
    match deadline {
        Some(d) if Instant::now() > d => Err(GeodesicError::Timeout { stage }),
        _ => Ok(()),
    }
}

/// Surface group generators pushed through exact manifold holonomy along
/// the same face-crossing paths used for the numeric matrices.
fn exact_path_generators(
    exact: &ExactHolonomy,
    skeleton: &ManifoldSkeleton,
    paths: &[Vec<FaceCrossing>],
) -> ExactHolonomy {
    match exact {
        ExactHolonomy::Embedded { field, generators } => ExactHolonomy::Embedded {
            field: field.clone(),
            generators: paths
                .iter()
                .map(|p| path_matrix(generators, skeleton, p, &field.zero()))
                .collect(),
        },
        ExactHolonomy::Split { field, generators } => ExactHolonomy::Split {
            field: field.clone(),
            generators: paths
                .iter()
                .map(|p| {
                    path_matrix(
                        generators,
                        skeleton,
                        p,
                        &ExactComplex::from_real(field.zero()),
                    )
                })
                .collect(),
        },
    }
}

/// If the vector is the double of an admissible one-sided surface, return
/// the half and its Euler characteristic. The input is assumed connected;
/// a connected surface with doubled coordinates must be the orientation
/// double cover of the half, which is verified by building the half and
/// checking it is connected and non-orientable.
fn halve_if_double<R: Real>(
    tri: &IdealTriangulation<R>,
    vector: &NormalVector,
) -> Result<Option<(NormalVector, i64)>, GeodesicError> {
    if !vector.is_even() {
        return Ok(None);
    }
    let half = vector.half();
    if half.is_zero() || !half.is_quad_compatible() || !satisfies_matching(tri, &half) {
        return Ok(None);
    }
    let complex = build_surface(tri, &half)?;
    if complex.is_connected() && !complex.is_orientable() {
        let chi = complex.euler_characteristic();
        Ok(Some((half, chi)))
    } else {
        Ok(None)
    }
}

/// Numeric matrices generating the image of the traced surface's
/// fundamental group: the surface itself when two-sided, its orientation
/// double cover otherwise. This is the group whose limit set the
/// diagnostics plot.
pub fn surface_generator_matrices<R: Real>(
    tri: &IdealTriangulation<R>,
    rep: &Representation<R>,
    vector: &NormalVector,
) -> Result<Vec<Mat2<Complex<R>>>, GeodesicError> {
    let mut complex = build_surface(tri, vector)?;
    if !complex.is_orientable() {
        let doubled = vector.scale(2);
        complex = build_surface(tri, &doubled)?;
        if !complex.is_connected() || !complex.is_orientable() {
            return Err(GeodesicError::MalformedDouble);
        }
    }
    let group = surface_group(&complex)?;
    Ok(group
        .generator_paths
        .iter()
        .map(|p| rep.path_matrix(p))
        .collect())
}

/// Runs the full decision procedure on one closed normal surface.
pub fn check_surface<R: Real>(
    tri: &IdealTriangulation<R>,
    rep: &Representation<R>,
    vector: &NormalVector,
    config: &GeodesicConfig,
) -> Result<SurfaceCheck, GeodesicError> {
    let start = Instant::now();
    let deadline = Some(start + config.surface_timeout);
    let mut complex = build_surface(tri, vector)?;
    let euler_characteristic = complex.euler_characteristic();
    let orientable = complex.is_orientable();
    let traced_vector = if orientable {
        vector.clone()
    } else {
        // One-sided surface: trace its orientation double cover, which has
        // doubled coordinates and is connected and orientable.
        let doubled = vector.scale(2);
        complex = build_surface(tri, &doubled)?;
        if !complex.is_connected() || !complex.is_orientable() {
            return Err(GeodesicError::MalformedDouble);
        }
        doubled
    };
    check_deadline(deadline, "surface construction")?;
    let group = surface_group(&complex)?;
    check_deadline(deadline, "surface group")?;
    let generators: Vec<Mat2<Complex<R>>> = group
        .generator_paths
        .iter()
        .map(|p| rep.path_matrix(p))
        .collect();
    let exact = rep
        .exact
        .as_ref()
        .map(|e| exact_path_generators(e, &rep.group.skeleton, &group.generator_paths));
    let survey = survey_traces(
        &generators,
        exact.as_ref(),
        config.imaginary_threshold,
        &config.realness,
        deadline,
    )?;
    let reducible_warning = common_fixed_point(&generators, R::of(1e-6)).is_some();
    let tube_edges = tube_obstructed_edges(tri, vector);
    let verdict = if let Some(witness) = survey.witness.clone() {
        GeodesicVerdict::NotFuchsian { witness }
    } else if !orientable {
        GeodesicVerdict::NonOrientableTotallyGeodesicCandidate {
            max_imaginary: survey.max_imaginary,
        }
    } else if let Some((half, half_euler_characteristic)) = halve_if_double(tri, vector)? {
        GeodesicVerdict::FuchsianDoubleCover {
            half,
            half_euler_characteristic,
        }
    } else {
        GeodesicVerdict::TotallyGeodesicCandidate {
            max_imaginary: survey.max_imaginary,
        }
    };
    let generator_count = generators.len();
    Ok(SurfaceCheck {
        verdict,
        mode: survey.mode,
        input_vector: vector.clone(),
        traced_vector,
        euler_characteristic,
        orientable,
        surface_generators: generator_count,
        words_tested: survey.observations.len(),
        generator_traces: survey.observations[..generator_count].to_vec(),
        max_imaginary: survey.max_imaginary,
        reducible_warning,
        tube_edges,
        seconds: start.elapsed().as_secs_f64(),
    })
}

// ---------------------------------------------------------------------------
// Manifold scan.

#[derive(Clone, Debug)]
pub struct ScanRow {
    pub vector: NormalVector,
    pub euler_characteristic: i64,
    pub orientable: bool,
    pub tube_edges: Vec<usize>,
    /// Absent when the surface was skipped by the tube filter or errored.
    pub check: Option<SurfaceCheck>,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ScanReport {
    pub volume: f64,
    /// Effective Euler characteristic bound used for enumeration.
    pub bound: i64,
    pub bound_overridden: bool,
    /// False when an enumeration budget was exhausted; rows are then empty
    /// and the scan proves nothing.
    pub complete: bool,
    pub enumeration_error: Option<String>,
    pub tube_skipped: usize,
    pub rows: Vec<ScanRow>,
    pub enumeration_seconds: f64,
    pub check_seconds: f64,
}

impl ScanReport {
    /// The volume admits at least one unit of Euler characteristic.
    pub fn volume_gate_passed(&self) -> bool {
        self.bound >= 1
    }

    /// The manifold-level verdict when the scan never reaches surfaces:
    /// volume below the one-unit cost means no closed essential surface.
    pub fn manifold_verdict(&self) -> Option<GeodesicVerdict> {
        if self.volume_gate_passed() {
            None
        } else {
            Some(GeodesicVerdict::VolumeTooSmall)
        }
    }

    /// Rows whose verdict leaves the surface as a candidate.
    pub fn candidate_rows(&self) -> Vec<&ScanRow> {
        self.rows
            .iter()
            .filter(|r| {
                matches!(
                    r.check.as_ref().map(|c| &c.verdict),
                    Some(GeodesicVerdict::TotallyGeodesicCandidate { .. })
                        | Some(GeodesicVerdict::NonOrientableTotallyGeodesicCandidate { .. })
                        | Some(GeodesicVerdict::FuchsianDoubleCover { .. })
                )
            })
            .collect()
    }
}

/// Enumerates every closed normal surface within the Euler characteristic
/// bound and checks each one, in parallel, in deterministic order. The
/// bound defaults to the volume-derived one; overriding it to a positive
/// value also bypasses the volume gate, because the gate is precisely
/// "the derived bound is zero".
pub fn scan_manifold<R: Real>(
    tri: &IdealTriangulation<R>,
    rep: &Representation<R>,
    config: &GeodesicConfig,
) -> Result<ScanReport, GeodesicError> {
    let volume = compute_volume(tri).to_f64().unwrap_or(f64::NAN);
    let derived = euler_characteristic_bound(volume, false);
    let bound = config.euler_bound_override.unwrap_or(derived);
    let mut report = ScanReport {
        volume,
        bound,
        bound_overridden: config.euler_bound_override.is_some(),
        complete: true,
        enumeration_error: None,
        tube_skipped: 0,
        rows: Vec::new(),
        enumeration_seconds: 0.0,
        check_seconds: 0.0,
    };
    if bound < 1 {
        // Volume gate: a closed geodesic surface needs volume at least
        // one Euler unit, which this manifold does not have.
        debug_assert!(volume < volume_per_euler_unit() || report.bound_overridden);
        return Ok(report);
    }
    let mut enumeration = config.enumeration.clone();
    enumeration.euler_bound = bound;
    let t0 = Instant::now();
    let surfaces = match enumerate_closed_surfaces(tri, &enumeration) {
        Ok(s) => s,
        Err(e @ EnumerationError::Budget { .. }) => {
            report.complete = false;
            report.enumeration_error = Some(e.to_string());
            Vec::new()
        }
        Err(e) => return Err(GeodesicError::Enumeration(e)),
    };
    report.enumeration_seconds = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let threads = config
        .threads
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .max(1)
        .min(surfaces.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<ScanRow>>> = surfaces.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, AtomicOrdering::Relaxed);
                if i >= surfaces.len() {
                    break;
                }
                let s = &surfaces[i];
                let tube_edges = tube_obstructed_edges(tri, &s.vector);
                let mut row = ScanRow {
                    vector: s.vector.clone(),
                    euler_characteristic: s.euler_characteristic,
                    orientable: s.orientable,
                    tube_edges: tube_edges.clone(),
                    check: None,
                    error: None,
                };
                if !(config.tube_filter && !tube_edges.is_empty()) {
                    match check_surface(tri, rep, &s.vector, config) {
                        Ok(check) => row.check = Some(check),
                        Err(e) => row.error = Some(e.to_string()),
                    }
                }
                *slots[i].lock().unwrap() = Some(row);
            });
        }
    });
    report.rows = slots
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("every scan slot is filled"))
        .collect();
    report.tube_skipped = report
        .rows
        .iter()
        .filter(|r| r.check.is_none() && r.error.is_none())
        .count();
    report.check_seconds = t1.elapsed().as_secs_f64();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holonomy::Representation;
    use crate::testutil::*;
    use num_complex::Complex64;
    use rand_core::{RngCore, SeedableRng};
    use std::collections::BTreeSet;

    fn klein_vector() -> NormalVector {
        NormalVector {
            coords: vec![0, 0, 0, 0, 0, 1, 0],
        }
    }

    fn cross_vector() -> NormalVector {
        NormalVector {
            coords: vec![0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0],
        }
    }

    #[test]
    fn trace_word_counts_match_the_closed_formula() {
        for (n, expected) in [(1usize, 3usize), (2, 9), (3, 19), (4, 34)] {
            let words = trace_test_words(n);
            assert_eq!(words.len(), expected, "n = {}", n);
            let unique: BTreeSet<_> = words.iter().cloned().collect();
            assert_eq!(unique.len(), words.len());
        }
        assert_eq!(trace_test_words(1), vec![vec![1], vec![1, 1], vec![1, 1, 1]]);
    }

    #[test]
    fn real_generators_survey_clean_and_bending_leaves_a_witness() {
        let real = octagon_generators();
        let survey = survey_traces(
            &real,
            None,
            0.01,
            &RealnessConfig::default(),
            None,
        )
        .unwrap();
        assert_eq!(survey.mode, CheckMode::NumericThreshold);
        assert!(survey.witness.is_none());
        assert!(survey.max_imaginary < 1e-9);

        let bent = bend(&real, &[2, 3], 0.2);
        let survey = survey_traces(
            &bent,
            None,
            0.01,
            &RealnessConfig::default(),
            None,
        )
        .unwrap();
        let witness = survey.witness.expect("bent family has a nonreal trace");
        assert!(witness.imaginary_magnitude > 0.01);
        assert!(!witness.certified_nonreal);
        // Bending conjugates each generator, so single-generator traces
        // stay real; only a mixed word can witness the bend.
        assert!(witness.word.len() >= 2);
    }

    #[test]
    fn figure_eight_traces_are_certified_nonreal() {
        let tri = fig8();
        let rep = Representation::from_shapes(&tri, 1e-9).unwrap();
        assert!(rep.exact.is_some());
        let survey = survey_traces(
            &rep.generators,
            rep.exact.as_ref(),
            0.01,
            &RealnessConfig::default(),
            None,
        )
        .unwrap();
        assert_eq!(survey.mode, CheckMode::CertifiedNegative);
        let witness = survey.witness.expect("the discrete faithful group is not Fuchsian");
        assert!(witness.certified_nonreal);
        assert!(witness.imaginary_magnitude > 0.01);
        // Certification must agree with the numbers: anything certified
        // nonreal has to look nonreal in floating point too.
        for obs in &survey.observations {
            if obs.certified_nonreal {
                assert!(obs.imaginary_magnitude > 1e-9, "word {:?}", obs.word);
            }
        }
    }

    #[test]
    fn one_sided_klein_bottle_is_a_candidate_through_its_double() {
        let tri = t1_klein();
        let rep = Representation::from_matrices(&tri, t1_klein_rep(), 1e-9).unwrap();
        let check = check_surface(&tri, &rep, &klein_vector(), &GeodesicConfig::default()).unwrap();
        assert!(!check.orientable);
        assert_eq!(check.euler_characteristic, 0);
        assert_eq!(check.traced_vector, klein_vector().scale(2));
        assert!(matches!(
            check.verdict,
            GeodesicVerdict::NonOrientableTotallyGeodesicCandidate { .. }
        ));
    }

    #[test]
    fn doubled_klein_bottle_halves_back_to_the_one_sided_surface() {
        let tri = t1_klein();
        let rep = Representation::from_matrices(&tri, t1_klein_rep(), 1e-9).unwrap();
        let doubled = klein_vector().scale(2);
        let check = check_surface(&tri, &rep, &doubled, &GeodesicConfig::default()).unwrap();
        assert!(check.orientable);
        match check.verdict {
            GeodesicVerdict::FuchsianDoubleCover {
                ref half,
                half_euler_characteristic,
            } => {
                assert_eq!(*half, klein_vector());
                assert_eq!(half_euler_characteristic, 0);
            }
            ref other => panic!("expected a double cover verdict, got {:?}", other),
        }
    }

    fn genus2_vector() -> NormalVector {
        let tri = t2_genus2();
        let solutions = crate::enumerate::brute_force_solutions(&tri, 3).unwrap();
        for vector in solutions {
            if vector.is_zero() {
                continue;
            }
            let complex = build_surface(&tri, &vector).unwrap();
            if complex.euler_characteristic() == -2
                && complex.is_connected()
                && complex.is_orientable()
                && vector.coords.iter().any(|&c| c % 2 != 0)
            {
                return vector;
            }
        }
        panic!("fixture lost its odd genus-2 surface");
    }

    #[test]
    fn odd_genus_two_vector_is_a_two_sided_candidate() {
        let tri = t2_genus2();
        let rep = Representation::from_matrices(&tri, t2_genus2_rep(), 1e-9).unwrap();
        let check = check_surface(&tri, &rep, &genus2_vector(), &GeodesicConfig::default()).unwrap();
        assert!(check.orientable);
        assert_eq!(check.euler_characteristic, -2);
        assert!(matches!(
            check.verdict,
            GeodesicVerdict::TotallyGeodesicCandidate { .. }
        ));
        // A diagonal image fixes 0 and infinity, so the reducibility
        // diagnostic must fire on this synthetic representation.
        assert!(check.reducible_warning);
    }

    #[test]
    fn common_fixed_points_separate_reducible_from_irreducible() {
        let diagonal = vec![dilation(2.0), dilation(3.0)];
        assert!(common_fixed_point(&diagonal, 1e-6).is_some());
        assert!(common_fixed_point(&octagon_generators(), 1e-6).is_none());
    }

    #[test]
    fn scan_respects_the_volume_gate() {
        let tri = fig8();
        let rep = Representation::from_shapes(&tri, 1e-9).unwrap();
        let report = scan_manifold(&tri, &rep, &GeodesicConfig::default()).unwrap();
        assert_eq!(report.bound, 0);
        assert!(!report.volume_gate_passed());
        assert_eq!(report.manifold_verdict(), Some(GeodesicVerdict::VolumeTooSmall));
        assert!(report.rows.is_empty());
        assert!(report.complete);
    }

    #[test]
    fn override_scan_finds_the_one_sided_surface_and_its_double() {
        let tri = t2_cross();
        let rep = Representation::from_matrices(&tri, t2_cross_rep(), 1e-9).unwrap();
        // This fixture's one-sided surface encircles two short edge
        // classes, so the default scan flags and skips it.
        let filtered = GeodesicConfig {
            euler_bound_override: Some(2),
            threads: Some(2),
            ..GeodesicConfig::default()
        };
        let report = scan_manifold(&tri, &rep, &filtered).unwrap();
        assert!(report.complete);
        assert!(report.volume_gate_passed());
        let skipped = report
            .rows
            .iter()
            .find(|r| r.vector == cross_vector())
            .expect("the one-sided surface is enumerated");
        assert!(skipped.check.is_none());
        assert_eq!(skipped.tube_edges, vec![1, 2]);
        assert!(report.tube_skipped >= 2);

        // With the tube filter off both the one-sided surface and its
        // orientation double cover reach the trace test.
        let unfiltered = GeodesicConfig {
            tube_filter: false,
            ..filtered
        };
        let report = scan_manifold(&tri, &rep, &unfiltered).unwrap();
        assert_eq!(report.tube_skipped, 0);
        let one_sided = report
            .rows
            .iter()
            .find(|r| r.vector == cross_vector())
            .expect("the one-sided surface is enumerated");
        assert!(matches!(
            one_sided.check.as_ref().unwrap().verdict,
            GeodesicVerdict::NonOrientableTotallyGeodesicCandidate { .. }
        ));
        let double = report
            .rows
            .iter()
            .find(|r| r.vector == cross_vector().scale(2))
            .expect("the orientation double cover is enumerated");
        match &double.check.as_ref().unwrap().verdict {
            GeodesicVerdict::FuchsianDoubleCover {
                half,
                half_euler_characteristic,
            } => {
                assert_eq!(*half, cross_vector());
                assert_eq!(*half_euler_characteristic, -1);
            }
            other => panic!("expected a double cover verdict, got {:?}", other),
        }
    }

    #[test]
    fn scan_rows_are_identical_across_thread_counts() {
        let tri = t2_cross();
        let rep = Representation::from_matrices(&tri, t2_cross_rep(), 1e-9).unwrap();
        let scan_with = |threads: usize| {
            let config = GeodesicConfig {
                euler_bound_override: Some(2),
                threads: Some(threads),
                ..GeodesicConfig::default()
            };
            scan_manifold(&tri, &rep, &config).unwrap()
        };
        let a = scan_with(1);
        let b = scan_with(3);
        assert_eq!(a.rows.len(), b.rows.len());
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert_eq!(ra.vector, rb.vector);
            assert_eq!(ra.tube_edges, rb.tube_edges);
            match (&ra.check, &rb.check) {
                (Some(ca), Some(cb)) => {
                    assert_eq!(ca.verdict, cb.verdict);
                    assert_eq!(ca.max_imaginary.to_bits(), cb.max_imaginary.to_bits());
                }
                (None, None) => assert_eq!(ra.error, rb.error),
                _ => panic!("rows diverge between thread counts"),
            }
        }
    }

    fn random_mobius(rng: &mut rand_chacha::ChaCha8Rng) -> Mat2<Complex64> {
        let unit = |r: &mut rand_chacha::ChaCha8Rng| {
            (r.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        loop {
            let m = Mat2 {
                a: Complex64::new(unit(rng), unit(rng)),
                b: Complex64::new(unit(rng), unit(rng)),
                c: Complex64::new(unit(rng), unit(rng)),
                d: Complex64::new(unit(rng), unit(rng)),
            };
            if m.det().norm() > 0.1 {
                return m;
            }
        }
    }

    #[test]
    fn conjugating_the_holonomy_changes_no_verdict_and_no_trace() {
        let tri = t2_genus2();
        let vector = genus2_vector();
        let baseline_rep = Representation::from_matrices(&tri, t2_genus2_rep(), 1e-9).unwrap();
        let baseline =
            check_surface(&tri, &baseline_rep, &vector, &GeodesicConfig::default()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x9e3779b97f4a7c15);
        for trial in 0..5 {
            let m = random_mobius(&mut rng);
            let inv = {
                let det = m.det();
                let adj = m.adjugate();
                Mat2 {
                    a: adj.a / det,
                    b: adj.b / det,
                    c: adj.c / det,
                    d: adj.d / det,
                }
            };
            let conjugated: Vec<Mat2<Complex64>> = t2_genus2_rep()
                .iter()
                .map(|g| m.mul(g).mul(&inv))
                .collect();
            let rep = Representation::from_matrices(&tri, conjugated, 1e-6).unwrap();
            let check = check_surface(&tri, &rep, &vector, &GeodesicConfig::default()).unwrap();
            assert_eq!(
                std::mem::discriminant(&check.verdict),
                std::mem::discriminant(&baseline.verdict),
                "trial {}",
                trial
            );
            for (ca, cb) in check.generator_traces.iter().zip(&baseline.generator_traces) {
                assert!(
                    (ca.trace_re - cb.trace_re).abs() < 1e-9
                        && (ca.trace_im - cb.trace_im).abs() < 1e-9,
                    "trial {} word {:?}",
                    trial,
                    ca.word
                );
            }
        }
    }

    #[test]
    fn zero_timeout_fails_fast() {
        let tri = t2_genus2();
        let rep = Representation::from_matrices(&tri, t2_genus2_rep(), 1e-9).unwrap();
        let config = GeodesicConfig {
            surface_timeout: Duration::ZERO,
            ..GeodesicConfig::default()
        };
        let err = check_surface(&tri, &rep, &genus2_vector(), &config).unwrap_err();
        assert!(matches!(err, GeodesicError::Timeout { .. }));
    }

    #[test]
    fn tube_detection_requires_every_corner_of_the_class() {
        let tri = t1_klein();
        // The Klein bottle vector has a single quad kind; whether an edge
        // class is encircled is decided by hand from the class members.
        let classes = tri.edge_classes();
        let vector = klein_vector();
        let flagged = tube_obstructed_edges(&tri, &vector);
        for (ci, class) in classes.iter().enumerate() {
            let by_hand = class.members.iter().all(|&(tet, e)| {
                let (a, b) = EDGE_ENDPOINTS[e];
                vector.quad(tet, quad_kind_of_pair(a, b)) >= 1
            });
            assert_eq!(flagged.contains(&ci), by_hand);
        }
        // An all-quads vector (ignoring the one-kind rule) encircles
        // every edge class of every triangulation.
        let tri = t2_cross();
        let mut all = NormalVector::zero(2);
        for tet in 0..2 {
            for k in 0..3 {
                all.set_quad(tet, k, 1);
            }
        }
        let flagged = tube_obstructed_edges(&tri, &all);
        assert_eq!(flagged.len(), tri.edge_classes().len());
    }
}
