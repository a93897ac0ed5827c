//! Holonomy representations from the developing map.
//!
//! Placing tetrahedron 0 at the reference position (0, infinity, 1, z0)
//! and developing across the spanning tree of the dual skeleton gives
//! every tetrahedron a position in the projective line. Crossing a
//! non-tree face pair compares the tree placement of the far tetrahedron
//! with its placement as seen through the face, which yields one Moebius
//! matrix per fundamental group generator. Products over the edge-class
//! loops must be scalar multiples of the identity; their failure to be so
//! measures the inconsistency of the development.
//!
//! All constructions here avoid division: inverses are adjugates, points
//! are homogeneous pairs, and matrices are defined up to scale. The same
//! generic code therefore runs over floating complex numbers and over
//! exact number field elements.

use std::path::Path;
use std::sync::Arc;

use num_complex::Complex;
use serde::Deserialize;
use thiserror::Error;

use crate::fundgroup::{manifold_group, FaceCrossing, GroupError, ManifoldGroup, ManifoldSkeleton};
use crate::numfield::{ExactComplex, ExactShape, FieldElement, NumberField};
use crate::scalar::{MatrixScalar, Real};
use crate::triangulation::IdealTriangulation;

#[derive(Debug, Error)]
pub enum HolonomyError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(
        "inconsistent development: relator {relator} is off the identity by {defect:.3e} (tolerance {tolerance:.1e})"
    )]
    InconsistentDevelopment {
        relator: usize,
        defect: f64,
        tolerance: f64,
    },
    #[error("exact development: relator {relator} is not a scalar matrix")]
    ExactlyInconsistent { relator: usize },
    #[error("matrix {index} is singular")]
    SingularMatrix { index: usize },
    #[error("matrix file supplies {got} generators, manifold group needs {expected}")]
    GeneratorCountMismatch { expected: usize, got: usize },
    #[error("triangulation carries no exact shape data")]
    ExactDataMissing,
    #[error("exact shapes mix embedded and split representations")]
    MixedExactShapes,
    #[error("reading matrix file: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing matrix file: {0}")]
    Json(#[from] serde_json::Error),
}

/// 2x2 matrix over any ring-like scalar, considered up to scale.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat2<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub d: S,
}

impl<S: MatrixScalar> Mat2<S> {
    pub fn identity_like(sample: &S) -> Self {
        Mat2 {
            a: sample.one_like(),
            b: sample.zero_like(),
            c: sample.zero_like(),
            d: sample.one_like(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Mat2 {
            a: self.a.clone() * rhs.a.clone() + self.b.clone() * rhs.c.clone(),
            b: self.a.clone() * rhs.b.clone() + self.b.clone() * rhs.d.clone(),
            c: self.c.clone() * rhs.a.clone() + self.d.clone() * rhs.c.clone(),
            d: self.c.clone() * rhs.b.clone() + self.d.clone() * rhs.d.clone(),
        }
    }

    /// Inverse up to the determinant factor.
    pub fn adjugate(&self) -> Self {
        Mat2 {
            a: self.d.clone(),
            b: -self.b.clone(),
            c: -self.c.clone(),
            d: self.a.clone(),
        }
    }

    pub fn trace(&self) -> S {
        self.a.clone() + self.d.clone()
    }

    pub fn det(&self) -> S {
        self.a.clone() * self.d.clone() - self.b.clone() * self.c.clone()
    }

    pub fn apply(&self, p: &ProjPoint<S>) -> ProjPoint<S> {
        ProjPoint(
            self.a.clone() * p.0.clone() + self.b.clone() * p.1.clone(),
            self.c.clone() * p.0.clone() + self.d.clone() * p.1.clone(),
        )
    }

    /// Is this a scalar multiple of the identity, exactly?
    pub fn is_scalar(&self) -> bool {
        self.b.is_zero_elem()
            && self.c.is_zero_elem()
            && (self.a.clone() - self.d.clone()).is_zero_elem()
    }
}

/// Point of the projective line as a homogeneous pair [x : y].
#[derive(Clone, Debug)]
pub struct ProjPoint<S>(pub S, pub S);

impl<S: MatrixScalar> ProjPoint<S> {
    /// Cross product with another point; zero exactly when they coincide.
    pub fn wedge(&self, other: &Self) -> S {
        self.0.clone() * other.1.clone() - self.1.clone() * other.0.clone()
    }
}

/// The Moebius transformation sending 0, infinity, 1 to p, q, r.
pub fn mobius_to_triple<S: MatrixScalar>(
    p: &ProjPoint<S>,
    q: &ProjPoint<S>,
    r: &ProjPoint<S>,
) -> Mat2<S> {
    let s = p.1.clone() * r.0.clone() - p.0.clone() * r.1.clone();
    let t = q.0.clone() * r.1.clone() - q.1.clone() * r.0.clone();
    Mat2 {
        a: q.0.clone() * s.clone(),
        b: p.0.clone() * t.clone(),
        c: q.1.clone() * s,
        d: p.1.clone() * t,
    }
}

/// Reference placement of a tetrahedron with shape z: vertices 0..3 at
/// 0, infinity, 1, z.
fn reference<S: MatrixScalar>(z: &S) -> [ProjPoint<S>; 4] {
    let zero = z.zero_like();
    let one = z.one_like();
    [
        ProjPoint(zero.clone(), one.clone()),
        ProjPoint(one.clone(), zero.clone()),
        ProjPoint(one.clone(), one.clone()),
        ProjPoint(z.clone(), one),
    ]
}

/// The Moebius transformation carrying one projective triple to another.
fn triple_to_triple<S: MatrixScalar>(
    from: [&ProjPoint<S>; 3],
    to: [&ProjPoint<S>; 3],
) -> Mat2<S> {
    mobius_to_triple(to[0], to[1], to[2]).mul(&mobius_to_triple(from[0], from[1], from[2]).adjugate())
}

/// Raw development output: one matrix per generator and one product per
/// edge-class relator, all up to scale.
pub struct Development<S> {
    pub generators: Vec<Mat2<S>>,
    pub relator_products: Vec<Mat2<S>>,
}

/// Develops the triangulation with the given shapes (one per tetrahedron,
/// in any scalar supporting ring arithmetic) over the dual spanning tree
/// and extracts the face-pairing matrices of the non-tree dual edges.
pub fn develop_matrices<R: Real, S: MatrixScalar>(
    tri: &IdealTriangulation<R>,
    shapes: &[S],
    group: &ManifoldGroup,
) -> Development<S> {
    let skeleton = &group.skeleton;
    let t = tri.num_tetrahedra();
    debug_assert_eq!(shapes.len(), t);
    let mut placement: Vec<Option<[ProjPoint<S>; 4]>> = vec![None; t];
    placement[skeleton.bfs_order[0]] = Some(reference(&shapes[skeleton.bfs_order[0]]));

    // Place the far side of a face crossing given the near placement.
    let through = |from: &[ProjPoint<S>; 4], tet: usize, face: usize| -> [ProjPoint<S>; 4] {
        let g = tri.gluing(tet, face);
        let missing = g.perm.apply(face);
        let refs = reference(&shapes[g.tet]);
        let mut known: Vec<(usize, ProjPoint<S>)> = (0..4)
            .filter(|&v| v != face)
            .map(|v| (g.perm.apply(v), from[v].clone()))
            .collect();
        known.sort_by_key(|&(j, _)| j);
        let n = triple_to_triple(
            [&refs[known[0].0], &refs[known[1].0], &refs[known[2].0]],
            [&known[0].1, &known[1].1, &known[2].1],
        );
        let fourth = n.apply(&refs[missing]);
        let mut out: Vec<Option<ProjPoint<S>>> = vec![None; 4];
        for (j, p) in known {
            out[j] = Some(p);
        }
        out[missing] = Some(fourth);
        out.into_iter()
            .map(Option::unwrap)
            .collect::<Vec<_>>()
            .try_into()
            .map_err(|_| ())
            .unwrap()
    };

    for &tet in &skeleton.bfs_order[1..] {
        let e = skeleton.parent_edge[tet].expect("non-root tetrahedra have parents");
        let edge = skeleton.edges[e];
        let (ptet, pface) = if edge.a.0 == tet { edge.b } else { edge.a };
        let from = placement[ptet].clone().expect("parent placed first");
        placement[tet] = Some(through(&from, ptet, pface));
    }

    let mut generators = Vec::with_capacity(skeleton.generator_count);
    for (e, &gen) in skeleton.generator_of_edge.iter().enumerate() {
        if gen.is_none() {
            continue;
        }
        let (atet, aface) = skeleton.edges[e].a;
        let btet = skeleton.edges[e].b.0;
        let across = through(placement[atet].as_ref().unwrap(), atet, aface);
        let tree = placement[btet].as_ref().unwrap();
        generators.push(triple_to_triple(
            [&tree[0], &tree[1], &tree[2]],
            [&across[0], &across[1], &across[2]],
        ));
    }

    let sample = &shapes[0];
    let relator_products = group
        .edge_loops
        .iter()
        .map(|steps| path_matrix(&generators, skeleton, steps, sample))
        .collect();
    Development {
        generators,
        relator_products,
    }
}

/// Product of the letter matrices along a sequence of face crossings.
/// Tree crossings contribute the identity; non-tree crossings contribute
/// the generator or its adjugate depending on direction.
pub fn path_matrix<S: MatrixScalar>(
    generators: &[Mat2<S>],
    skeleton: &ManifoldSkeleton,
    path: &[FaceCrossing],
    sample: &S,
) -> Mat2<S> {
    let mut m = Mat2::identity_like(sample);
    for c in path {
        if let Some((g, sign)) = skeleton.letter(c.tet, c.face) {
            let letter = if sign > 0 {
                generators[g].clone()
            } else {
                generators[g].adjugate()
            };
            m = m.mul(&letter);
        }
    }
    m
}

/// Product of generator matrices along a word of signed one-based letters,
/// negatives meaning inverses via the adjugate (exact for determinant one,
/// and off only by the determinant scalar otherwise, which is invisible
/// projectively).
pub fn word_product<S: MatrixScalar>(
    generators: &[Mat2<S>],
    word: &[i32],
    sample: &S,
) -> Mat2<S> {
    let mut m = Mat2::identity_like(sample);
    for &letter in word {
        debug_assert!(letter != 0);
        let idx = (letter.unsigned_abs() as usize) - 1;
        let g = if letter > 0 {
            generators[idx].clone()
        } else {
            generators[idx].adjugate()
        };
        m = m.mul(&g);
    }
    m
}

// ---------------------------------------------------------------------------
// Numeric holonomy.

/// How far a matrix is from being scalar, relative to its largest entry.
pub fn scalar_defect<R: Real>(m: &Mat2<Complex<R>>) -> R {
    let norm = |z: &Complex<R>| z.norm_sqr().sqrt();
    let scale = norm(&m.a)
        .max(norm(&m.b))
        .max(norm(&m.c))
        .max(norm(&m.d))
        .max(R::of(1e-300));
    let off = norm(&m.b).max(norm(&m.c));
    let diag = norm(&(m.a - m.d));
    off.max(diag) / scale
}

/// Scales a matrix to determinant one; the sign is pinned by requiring the
/// first nonzero entry in row-major order to have argument in
/// (-pi/2, pi/2].
pub fn normalize_det_one<R: Real>(
    m: &Mat2<Complex<R>>,
    index: usize,
) -> Result<Mat2<Complex<R>>, HolonomyError> {
    let det = m.det();
    let norm = |z: &Complex<R>| z.norm_sqr().sqrt();
    let scale = norm(&m.a).max(norm(&m.b)).max(norm(&m.c)).max(norm(&m.d));
    if det.norm_sqr().sqrt() <= R::of(1e-24) * scale * scale {
        return Err(HolonomyError::SingularMatrix { index });
    }
    let root = det.sqrt();
    let inv = Complex::new(R::one(), R::zero()) / root;
    let mut out = Mat2 {
        a: m.a * inv,
        b: m.b * inv,
        c: m.c * inv,
        d: m.d * inv,
    };
    let entries = [out.a, out.b, out.c, out.d];
    let threshold = R::of(1e-12);
    if let Some(first) = entries.iter().find(|z| norm(z) > threshold) {
        let flip = if first.re.abs() > threshold {
            first.re < R::zero()
        } else {
            first.im <= R::zero()
        };
        if flip {
            let neg = Complex::new(-R::one(), R::zero());
            out = Mat2 {
                a: out.a * neg,
                b: out.b * neg,
                c: out.c * neg,
                d: out.d * neg,
            };
        }
    }
    Ok(out)
}

/// Numeric holonomy: determinant-one generators plus the worst relator
/// defect observed while verifying the development.
pub struct Holonomy<R: Real> {
    pub group: ManifoldGroup,
    pub generators: Vec<Mat2<Complex<R>>>,
    pub max_relator_defect: R,
}

pub fn develop<R: Real>(
    tri: &IdealTriangulation<R>,
    tolerance: R,
) -> Result<Holonomy<R>, HolonomyError> {
    let group = manifold_group(tri)?;
    let dev = develop_matrices(tri, tri.shapes(), &group);
    let mut max_defect = R::zero();
    for (i, rel) in dev.relator_products.iter().enumerate() {
        let defect = scalar_defect(rel);
        if defect > tolerance {
            return Err(HolonomyError::InconsistentDevelopment {
                relator: i,
                defect: defect.to_f64().unwrap_or(f64::NAN),
                tolerance: tolerance.to_f64().unwrap_or(f64::NAN),
            });
        }
        max_defect = max_defect.max(defect);
    }
    let generators = dev
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| normalize_det_one(g, i))
        .collect::<Result<_, _>>()?;
    Ok(Holonomy {
        group,
        generators,
        max_relator_defect: max_defect,
    })
}

/// Where a representation's matrices came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepresentationSource {
    FromShapes,
    FromFile,
}

/// A relator-verified assignment of determinant-one matrices to the
/// manifold group generators, with exact matrices alongside when the
/// triangulation carries exact shape data.
pub struct Representation<R: Real> {
    pub source: RepresentationSource,
    pub group: ManifoldGroup,
    pub generators: Vec<Mat2<Complex<R>>>,
    pub exact: Option<ExactHolonomy>,
    pub max_relator_defect: R,
}

impl<R: Real> Representation<R> {
    pub fn from_shapes(
        tri: &IdealTriangulation<R>,
        tolerance: R,
    ) -> Result<Self, HolonomyError> {
        let h = develop(tri, tolerance)?;
        let exact = match tri.exact() {
            Some(_) => Some(develop_exact(tri, &h.group)?),
            None => None,
        };
        Ok(Representation {
            source: RepresentationSource::FromShapes,
            group: h.group,
            generators: h.generators,
            exact,
            max_relator_defect: h.max_relator_defect,
        })
    }

    /// Wraps externally supplied matrices after checking the generator
    /// count and every manifold relator.
    pub fn from_matrices(
        tri: &IdealTriangulation<R>,
        generators: Vec<Mat2<Complex<R>>>,
        tolerance: R,
    ) -> Result<Self, HolonomyError> {
        let group = manifold_group(tri)?;
        if generators.len() != group.skeleton.generator_count {
            return Err(HolonomyError::GeneratorCountMismatch {
                expected: group.skeleton.generator_count,
                got: generators.len(),
            });
        }
        let sample = Complex::new(R::zero(), R::zero());
        let mut max_defect = R::zero();
        for (i, steps) in group.edge_loops.iter().enumerate() {
            let m = path_matrix(&generators, &group.skeleton, steps, &sample);
            let defect = scalar_defect(&m);
            if defect > tolerance {
                return Err(HolonomyError::InconsistentDevelopment {
                    relator: i,
                    defect: defect.to_f64().unwrap_or(f64::NAN),
                    tolerance: tolerance.to_f64().unwrap_or(f64::NAN),
                });
            }
            max_defect = max_defect.max(defect);
        }
        Ok(Representation {
            source: RepresentationSource::FromFile,
            group,
            generators,
            exact: None,
            max_relator_defect: max_defect,
        })
    }

    /// Evaluates a word in the manifold generators: letters are signed
    /// one-based generator indices, negatives meaning inverses. Since the
    /// generators have determinant one, the adjugate is the exact inverse.
    pub fn evaluate_word(&self, word: &[i32]) -> Mat2<Complex<R>> {
        let sample = Complex::new(R::zero(), R::zero());
        word_product(&self.generators, word, &sample)
    }

    /// Matrix of an ambient face-crossing path under this representation.
    pub fn path_matrix(&self, path: &[FaceCrossing]) -> Mat2<Complex<R>> {
        let sample = Complex::new(R::zero(), R::zero());
        path_matrix(&self.generators, &self.group.skeleton, path, &sample)
    }
}

impl Representation<f64> {
    pub fn from_matrix_file(
        tri: &IdealTriangulation<f64>,
        path: &Path,
        tolerance: f64,
    ) -> Result<Self, HolonomyError> {
        let mats = matrices_from_path(path)?;
        Representation::from_matrices(tri, mats, tolerance)
    }
}

// ---------------------------------------------------------------------------
// Exact holonomy.

/// Exact holonomy matrices: either with entries in a number field with a
/// fixed complex embedding, or with real and imaginary parts split over a
/// real field.
pub enum ExactHolonomy {
    Embedded {
        field: Arc<NumberField>,
        generators: Vec<Mat2<FieldElement>>,
    },
    Split {
        field: Arc<NumberField>,
        generators: Vec<Mat2<ExactComplex>>,
    },
}

impl ExactHolonomy {
    pub fn generator_count(&self) -> usize {
        match self {
            ExactHolonomy::Embedded { generators, .. } => generators.len(),
            ExactHolonomy::Split { generators, .. } => generators.len(),
        }
    }
}

pub fn develop_exact<R: Real>(
    tri: &IdealTriangulation<R>,
    group: &ManifoldGroup,
) -> Result<ExactHolonomy, HolonomyError> {
    let exact = tri.exact().ok_or(HolonomyError::ExactDataMissing)?;
    let field = exact.field.clone();
    let embedded: Option<Vec<FieldElement>> = exact
        .shapes
        .iter()
        .map(|s| match s {
            ExactShape::Embedded(e) => Some(e.clone()),
            ExactShape::Pair(_) => None,
        })
        .collect();
    if let Some(shapes) = embedded {
        let dev = develop_matrices(tri, &shapes, group);
        verify_exact(&dev)?;
        return Ok(ExactHolonomy::Embedded {
            field,
            generators: dev.generators,
        });
    }
    let split: Option<Vec<ExactComplex>> = exact
        .shapes
        .iter()
        .map(|s| match s {
            ExactShape::Pair(p) => Some(p.clone()),
            ExactShape::Embedded(_) => None,
        })
        .collect();
    let Some(shapes) = split else {
        return Err(HolonomyError::MixedExactShapes);
    };
    let dev = develop_matrices(tri, &shapes, group);
    verify_exact(&dev)?;
    Ok(ExactHolonomy::Split {
        field,
        generators: dev.generators,
    })
}

fn verify_exact<S: MatrixScalar>(dev: &Development<S>) -> Result<(), HolonomyError> {
    for (i, rel) in dev.relator_products.iter().enumerate() {
        if !rel.is_scalar() {
            return Err(HolonomyError::ExactlyInconsistent { relator: i });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Matrices supplied directly.

#[derive(Deserialize)]
struct RawMatrixFile {
    generators: Vec<[[[f64; 2]; 2]; 2]>,
}

/// Reads determinant-normalized generator matrices from a JSON file of the
/// form {"generators": [[[[a_re,a_im],[b_re,b_im]],[[c_re,c_im],[d_re,d_im]]], ...]}.
pub fn matrices_from_path(path: &Path) -> Result<Vec<Mat2<Complex<f64>>>, HolonomyError> {
    let text = std::fs::read_to_string(path)?;
    let raw: RawMatrixFile = serde_json::from_str(&text)?;
    raw.generators
        .iter()
        .enumerate()
        .map(|(i, rows)| {
            let m = Mat2 {
                a: Complex::new(rows[0][0][0], rows[0][0][1]),
                b: Complex::new(rows[0][1][0], rows[0][1][1]),
                c: Complex::new(rows[1][0][0], rows[1][0][1]),
                d: Complex::new(rows[1][1][0], rows[1][1][1]),
            };
            normalize_det_one(&m, i)
        })
        .collect()
}
