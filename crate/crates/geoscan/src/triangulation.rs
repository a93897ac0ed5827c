//! Ideal triangulations of cusped oriented 3-manifolds.
//!
//! A triangulation is t ideal tetrahedra with their 4t faces glued in pairs.
//! Vertices of each tetrahedron are labeled 0..3 and face f is the one
//! opposite vertex f. A gluing of face f sends it to face sigma(f) of the
//! neighbor via an odd permutation sigma of the vertex labels; odd parity is
//! what keeps the identified tetrahedra coherently oriented. Each
//! tetrahedron carries a shape z in the upper half plane: placing its
//! vertices at 0, infinity, 1, z gives the edge pairs {01}/{23} modulus z,
//! {02}/{13} modulus (z-1)/z, and {03}/{12} modulus 1/(1-z).

use num_complex::Complex;
use serde::Deserialize;
use sha2::{Digest, Sha256};
use std::path::Path;
use thiserror::Error;

use crate::numfield::interval::{ComplexBox, RealBound};
use crate::numfield::poly::{parse_rational, Poly, Q};
use crate::numfield::{
    ExactComplex, ExactShape, ExactStructure, FieldElement, FieldError, FieldOptions, NumberField,
};
use crate::scalar::{MatrixScalar, Real};

/// Vertex pairs of the six tetrahedron edges, in index order.
pub const EDGE_ENDPOINTS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Index of the edge opposite each edge (disjoint vertex pairs).
pub const OPPOSITE_EDGE: [usize; 6] = [5, 4, 3, 2, 1, 0];

/// Shape slot per edge: 0 -> z, 1 -> 1/(1-z), 2 -> (z-1)/z.
const EDGE_KIND: [u8; 6] = [0, 2, 1, 1, 2, 0];

/// Edge index of the unordered pair {a, b}, a != b, both < 4.
pub fn edge_index(a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    EDGE_ENDPOINTS
        .iter()
        .position(|&(x, y)| (x, y) == (a, b))
        .expect("valid vertex pair")
}

/// Permutation of {0,1,2,3} stored as its image array.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Perm4(pub [u8; 4]);

impl Perm4 {
    pub fn is_valid(&self) -> bool {
        let mut seen = [false; 4];
        for &v in &self.0 {
            if v > 3 || seen[v as usize] {
                return false;
            }
            seen[v as usize] = true;
        }
        true
    }

    pub fn apply(&self, v: usize) -> usize {
        self.0[v] as usize
    }

    pub fn is_odd(&self) -> bool {
        let mut inversions = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                if self.0[i] > self.0[j] {
                    inversions += 1;
                }
            }
        }
        inversions % 2 == 1
    }

    pub fn inverse(&self) -> Perm4 {
        let mut out = [0u8; 4];
        for (i, &v) in self.0.iter().enumerate() {
            out[v as usize] = i as u8;
        }
        Perm4(out)
    }

    /// Composition acting left-to-right on points: (a.then(b))(v) = b(a(v)).
    pub fn then(&self, b: &Perm4) -> Perm4 {
        let mut out = [0u8; 4];
        for i in 0..4 {
            out[i] = b.0[self.0[i] as usize];
        }
        Perm4(out)
    }
}

/// One face-pairing: face f of some tetrahedron is glued to face
/// `perm(f)` of tetrahedron `tet` via `perm`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceGluing {
    pub tet: usize,
    pub perm: Perm4,
}

#[derive(Debug, Error)]
pub enum TriangulationError {
    #[error("failed to read triangulation file: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed to parse triangulation JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0} (expected 1)")]
    UnsupportedVersion(u32),
    #[error("triangulation must contain at least one tetrahedron")]
    Empty,
    #[error("{what} count {got} does not match num_tetrahedra {expected}")]
    WrongCount {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("tetrahedron {tet} must list exactly 4 face gluings, got {got}")]
    WrongFaceCount { tet: usize, got: usize },
    #[error("tetrahedron {tet} face {face}: permutation is not a bijection of 0..3")]
    BadPermutation { tet: usize, face: usize },
    #[error("tetrahedron {tet} face {face}: permutation is even; oriented gluings must be odd")]
    EvenPermutation { tet: usize, face: usize },
    #[error("tetrahedron {tet} face {face}: neighbor {neighbor} out of range")]
    BadNeighbor {
        tet: usize,
        face: usize,
        neighbor: usize,
    },
    #[error("tetrahedron {tet} face {face} is glued to itself")]
    SelfGluedFace { tet: usize, face: usize },
    #[error("tetrahedron {tet} face {face}: gluing is not matched by its inverse on the far side")]
    NotInvolution { tet: usize, face: usize },
    #[error("tetrahedron {tet}: shape {shape} is degenerate (0, 1, or not finite)")]
    DegenerateShape { tet: usize, shape: Complex<f64> },
    #[error("tetrahedron {tet}: shape {shape} has negative imaginary part")]
    NegativeOrientation { tet: usize, shape: Complex<f64> },
    #[error("exact_shapes present without a field block (or vice versa)")]
    ExactDataIncomplete,
    #[error("tetrahedron {tet}: exact shape embeds to {exact} but float shape is {float}")]
    ExactShapeMismatch {
        tet: usize,
        exact: Complex<f64>,
        float: Complex<f64>,
    },
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Deserialize)]
struct RawTriangulation {
    version: u32,
    #[serde(default)]
    name: Option<String>,
    num_tetrahedra: usize,
    gluings: Vec<Vec<(usize, [u8; 4])>>,
    shapes: Vec<RawComplex>,
    #[serde(default)]
    field: Option<RawField>,
    #[serde(default)]
    exact_shapes: Option<Vec<RawExactShape>>,
}

#[derive(Deserialize)]
struct RawComplex {
    re: f64,
    im: f64,
}

#[derive(Deserialize)]
struct RawField {
    min_poly: Vec<RawRational>,
    root: RawRoot,
}

#[derive(Deserialize)]
struct RawRoot {
    re: RawRational,
    im: RawRational,
    #[serde(default)]
    radius: Option<RawRational>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawRational {
    Num(f64),
    Str(String),
}

impl RawRational {
    fn to_q(&self) -> Result<Q, FieldError> {
        match self {
            // f64 literals are dyadic rationals; the conversion is exact.
            RawRational::Num(x) => {
                Q::from_float(*x).ok_or_else(|| FieldError::BadRational(format!("{x}")))
            }
            RawRational::Str(s) => parse_rational(s),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawExactShape {
    Embedded { coeffs: Vec<RawRational> },
    Pair {
        re_coeffs: Vec<RawRational>,
        im_coeffs: Vec<RawRational>,
    },
}

/// Validated ideal triangulation with shapes over the scalar `R`.
#[derive(Clone, Debug)]
pub struct IdealTriangulation<R: Real = f64> {
    name: Option<String>,
    shapes: Vec<Complex<R>>,
    gluings: Vec<[FaceGluing; 4]>,
    exact: Option<ExactStructure>,
    source_sha256: Option<String>,
}

impl<R: Real> IdealTriangulation<R> {
    /// Builds and fully validates a triangulation from in-memory data.
    pub fn from_parts(
        shapes: Vec<Complex<R>>,
        gluings: Vec<[FaceGluing; 4]>,
    ) -> Result<Self, TriangulationError> {
        let tri = IdealTriangulation {
            name: None,
            shapes,
            gluings,
            exact: None,
            source_sha256: None,
        };
        tri.validate()?;
        Ok(tri)
    }

    pub fn from_json_str(text: &str) -> Result<Self, TriangulationError> {
        let mut tri = Self::from_raw(serde_json::from_str::<RawTriangulation>(text)?)?;
        tri.source_sha256 = Some(hex_digest(text.as_bytes()));
        Ok(tri)
    }

    pub fn from_path(path: &Path) -> Result<Self, TriangulationError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    fn from_raw(raw: RawTriangulation) -> Result<Self, TriangulationError> {
        if raw.version != 1 {
            return Err(TriangulationError::UnsupportedVersion(raw.version));
        }
        let t = raw.num_tetrahedra;
        if t == 0 {
            return Err(TriangulationError::Empty);
        }
        if raw.gluings.len() != t {
            return Err(TriangulationError::WrongCount {
                what: "gluings",
                got: raw.gluings.len(),
                expected: t,
            });
        }
        if raw.shapes.len() != t {
            return Err(TriangulationError::WrongCount {
                what: "shapes",
                got: raw.shapes.len(),
                expected: t,
            });
        }
        let mut gluings = Vec::with_capacity(t);
        for (tet, row) in raw.gluings.iter().enumerate() {
            if row.len() != 4 {
                return Err(TriangulationError::WrongFaceCount {
                    tet,
                    got: row.len(),
                });
            }
            let mut faces = [FaceGluing {
                tet: 0,
                perm: Perm4([0, 1, 2, 3]),
            }; 4];
            for (face, &(neighbor, perm)) in row.iter().enumerate() {
                faces[face] = FaceGluing {
                    tet: neighbor,
                    perm: Perm4(perm),
                };
            }
            gluings.push(faces);
        }
        let shapes: Vec<Complex<R>> = raw
            .shapes
            .iter()
            .map(|c| Complex::new(R::of(c.re), R::of(c.im)))
            .collect();
        let exact = match (raw.field, raw.exact_shapes) {
            (None, None) => None,
            (Some(field), Some(shapes)) => Some(build_exact(field, shapes)?),
            _ => return Err(TriangulationError::ExactDataIncomplete),
        };
        let tri = IdealTriangulation {
            name: raw.name,
            shapes,
            gluings,
            exact,
            source_sha256: None,
        };
        tri.validate()?;
        Ok(tri)
    }

    fn validate(&self) -> Result<(), TriangulationError> {
        let t = self.num_tetrahedra();
        if t == 0 {
            return Err(TriangulationError::Empty);
        }
        for tet in 0..t {
            for face in 0..4 {
                let g = self.gluings[tet][face];
                if !g.perm.is_valid() {
                    return Err(TriangulationError::BadPermutation { tet, face });
                }
                if !g.perm.is_odd() {
                    return Err(TriangulationError::EvenPermutation { tet, face });
                }
                if g.tet >= t {
                    return Err(TriangulationError::BadNeighbor {
                        tet,
                        face,
                        neighbor: g.tet,
                    });
                }
                let image_face = g.perm.apply(face);
                if g.tet == tet && image_face == face {
                    return Err(TriangulationError::SelfGluedFace { tet, face });
                }
                let back = self.gluings[g.tet][image_face];
                if back.tet != tet || back.perm != g.perm.inverse() {
                    return Err(TriangulationError::NotInvolution { tet, face });
                }
            }
        }
        for (tet, z) in self.shapes.iter().enumerate() {
            let zf = Complex::new(
                z.re.to_f64().unwrap_or(f64::NAN),
                z.im.to_f64().unwrap_or(f64::NAN),
            );
            let finite = zf.re.is_finite() && zf.im.is_finite();
            let degenerate = !finite
                || (zf.im == 0.0 && (zf.re == 0.0 || zf.re == 1.0));
            if degenerate {
                return Err(TriangulationError::DegenerateShape { tet, shape: zf });
            }
            if zf.im < 0.0 {
                return Err(TriangulationError::NegativeOrientation { tet, shape: zf });
            }
        }
        if let Some(exact) = &self.exact {
            if exact.shapes.len() != t {
                return Err(TriangulationError::WrongCount {
                    what: "exact_shapes",
                    got: exact.shapes.len(),
                    expected: t,
                });
            }
            for (tet, ex) in exact.shapes.iter().enumerate() {
                let e = ex.embed_f64();
                let z = self.shapes[tet];
                let zf = Complex::new(z.re.to_f64().unwrap_or(0.0), z.im.to_f64().unwrap_or(0.0));
                if (e - zf).norm() > 1e-6 {
                    return Err(TriangulationError::ExactShapeMismatch {
                        tet,
                        exact: e,
                        float: zf,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn num_tetrahedra(&self) -> usize {
        self.shapes.len()
    }

    pub fn shape(&self, tet: usize) -> Complex<R> {
        self.shapes[tet]
    }

    pub fn shapes(&self) -> &[Complex<R>] {
        &self.shapes
    }

    pub fn gluing(&self, tet: usize, face: usize) -> FaceGluing {
        self.gluings[tet][face]
    }

    pub fn exact(&self) -> Option<&ExactStructure> {
        self.exact.as_ref()
    }

    pub fn source_sha256(&self) -> Option<&str> {
        self.source_sha256.as_deref()
    }

    /// Shape modulus carried by an edge of a tetrahedron.
    pub fn edge_shape(&self, tet: usize, edge: usize) -> Complex<R> {
        shape_of_kind(self.shapes[tet], EDGE_KIND[edge])
    }

    /// A tetrahedron is flat when its shape is real (after the parse-time
    /// guard, that means the imaginary part is exactly zero).
    pub fn is_flat(&self, tet: usize) -> bool {
        self.shapes[tet].im == R::zero()
    }

    pub fn flat_tets(&self) -> Vec<usize> {
        (0..self.num_tetrahedra())
            .filter(|&t| self.is_flat(t))
            .collect()
    }

    /// Groups the 6t tetrahedron edges into classes identified by the face
    /// gluings. Classes and their members are in ascending (tet, edge)
    /// order, so the output is deterministic.
    pub fn edge_classes(&self) -> Vec<EdgeClass> {
        let t = self.num_tetrahedra();
        let mut uf = UnionFind::new(6 * t);
        for tet in 0..t {
            for face in 0..4 {
                let g = self.gluings[tet][face];
                for v in 0..4 {
                    if v == face {
                        continue;
                    }
                    for w in v + 1..4 {
                        if w == face {
                            continue;
                        }
                        let here = 6 * tet + edge_index(v, w);
                        let there = 6 * g.tet + edge_index(g.perm.apply(v), g.perm.apply(w));
                        uf.union(here, there);
                    }
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<(usize, usize)>> =
            std::collections::BTreeMap::new();
        for slot in 0..6 * t {
            groups
                .entry(uf.find(slot))
                .or_default()
                .push((slot / 6, slot % 6));
        }
        let mut classes: Vec<EdgeClass> = groups
            .into_values()
            .map(|members| EdgeClass { members })
            .collect();
        classes.sort_by_key(|c| c.members[0]);
        classes
    }
}

fn shape_of_kind<R: Real>(z: Complex<R>, kind: u8) -> Complex<R> {
    let one = Complex::new(R::one(), R::zero());
    match kind {
        0 => z,
        1 => one / (one - z),
        _ => (z - one) / z,
    }
}

/// Exact counterpart of [`IdealTriangulation::edge_shape`] for shapes over a
/// number field. Fails only on degenerate shapes (division by zero).
pub fn exact_edge_shape(shape: &ExactShape, edge: usize) -> Result<ExactShape, FieldError> {
    let kind = EDGE_KIND[edge];
    Ok(match shape {
        ExactShape::Embedded(z) => {
            let one = z.one_like();
            ExactShape::Embedded(match kind {
                0 => z.clone(),
                1 => one.sub(z)?.inv()?,
                _ => z.sub(&one)?.div(z)?,
            })
        }
        ExactShape::Pair(z) => {
            let one = ExactComplex::from_real(z.re.one_like());
            ExactShape::Pair(match kind {
                0 => z.clone(),
                1 => one.sub(z)?.inv()?,
                _ => z.sub(&one)?.div(z)?,
            })
        }
    })
}

/// An edge of the glued-up manifold: the (tet, edge index) pairs identified
/// to it, ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeClass {
    pub members: Vec<(usize, usize)>,
}

fn build_exact(
    field: RawField,
    shapes: Vec<RawExactShape>,
) -> Result<ExactStructure, TriangulationError> {
    let coeffs: Vec<Q> = field
        .min_poly
        .iter()
        .map(RawRational::to_q)
        .collect::<Result<_, _>>()?;
    let min_poly = Poly::new(coeffs);
    let re = field.root.re.to_q()?;
    let im = field.root.im.to_q()?;
    let radius = match &field.root.radius {
        Some(r) => r.to_q()?,
        None => Q::new(1.into(), 1_000_000.into()),
    };
    let root = ComplexBox::new(
        RealBound::new(&re - &radius, &re + &radius),
        RealBound::new(&im - &radius, &im + &radius),
    );
    let nf = NumberField::new(min_poly, root, FieldOptions::default())?;
    let parse_coeffs = |raw: &[RawRational]| -> Result<FieldElement, FieldError> {
        let cs: Vec<Q> = raw.iter().map(RawRational::to_q).collect::<Result<_, _>>()?;
        FieldElement::from_coeffs(&nf, cs)
    };
    let mut out = Vec::with_capacity(shapes.len());
    for raw in &shapes {
        out.push(match raw {
            RawExactShape::Embedded { coeffs } => ExactShape::Embedded(parse_coeffs(coeffs)?),
            RawExactShape::Pair {
                re_coeffs,
                im_coeffs,
            } => ExactShape::Pair(ExactComplex::new(
                parse_coeffs(re_coeffs)?,
                parse_coeffs(im_coeffs)?,
            )?),
        });
    }
    Ok(ExactStructure {
        field: nf,
        shapes: out,
    })
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Convenience wrapper: parse and validate a triangulation file with f64
/// shapes.
pub fn parse_triangulation(path: &Path) -> Result<IdealTriangulation<f64>, TriangulationError> {
    IdealTriangulation::from_path(path)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Smaller root wins so class representatives are stable.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// SHA-256 of a file's raw bytes, hex-encoded.
pub fn file_sha256(path: &Path) -> std::io::Result<String> {
    Ok(hex_digest(&std::fs::read(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{fig8, t1_twist};
    use num_complex::Complex;

    #[test]
    fn perm_basics() {
        let p = Perm4([1, 2, 3, 0]);
        assert!(p.is_valid());
        assert!(p.is_odd());
        assert_eq!(p.inverse(), Perm4([3, 0, 1, 2]));
        assert_eq!(p.then(&p.inverse()), Perm4([0, 1, 2, 3]));
        assert!(!Perm4([0, 1, 2, 3]).is_odd());
        assert!(!Perm4([1, 1, 2, 3]).is_valid());
        let q = Perm4([0, 1, 3, 2]);
        // then() applies self first: (p.then(q))(0) = q(p(0)) = q(1) = 1.
        assert_eq!(p.then(&q).apply(0), 1);
    }

    #[test]
    fn edge_index_roundtrips() {
        for (i, &(a, b)) in EDGE_ENDPOINTS.iter().enumerate() {
            assert_eq!(edge_index(a, b), i);
            assert_eq!(edge_index(b, a), i);
            let (c, d) = EDGE_ENDPOINTS[OPPOSITE_EDGE[i]];
            assert!(a != c && a != d && b != c && b != d);
        }
    }

    #[test]
    fn fig8_parses_with_two_edge_classes_of_six() {
        let tri = fig8();
        assert_eq!(tri.num_tetrahedra(), 2);
        let classes = tri.edge_classes();
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[0].members.len(), 6);
        assert_eq!(classes[1].members.len(), 6);
        // Every (tet, edge) slot appears exactly once across all classes.
        let mut seen = std::collections::BTreeSet::new();
        for c in &classes {
            for &m in &c.members {
                assert!(seen.insert(m));
            }
        }
        assert_eq!(seen.len(), 12);
    }

    #[test]
    fn t1_twist_edge_class_sizes() {
        let tri = t1_twist();
        assert_eq!(tri.num_tetrahedra(), 1);
        let classes = tri.edge_classes();
        let sizes: Vec<usize> = classes.iter().map(|c| c.members.len()).collect();
        assert_eq!(sizes, vec![1, 4, 1]);
        assert_eq!(classes[0].members, vec![(0, 0)]);
        assert_eq!(classes[2].members, vec![(0, 5)]);
    }

    #[test]
    fn edge_shapes_follow_placement_convention() {
        let z = Complex::new(0.0, 1.0);
        let tri = t1_twist();
        assert!((tri.shape(0) - z).norm() < 1e-12);
        // z' = 1/(1-z) on edges {03} and {12}.
        let zp = Complex::new(1.0, 0.0) / (Complex::new(1.0, 0.0) - z);
        assert!((tri.edge_shape(0, 2) - zp).norm() < 1e-12);
        assert!((tri.edge_shape(0, 3) - zp).norm() < 1e-12);
        // z'' = (z-1)/z on edges {02} and {13}.
        let zpp = (z - Complex::new(1.0, 0.0)) / z;
        assert!((tri.edge_shape(0, 1) - zpp).norm() < 1e-12);
        assert!((tri.edge_shape(0, 4) - zpp).norm() < 1e-12);
        // The three shapes multiply to -1.
        let prod = tri.edge_shape(0, 0) * zp * zpp;
        assert!((prod - Complex::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn fig8_exact_shapes_match_floats() {
        let tri = fig8();
        let exact = tri.exact().expect("fig8 fixture carries exact data");
        assert_eq!(exact.field.degree(), 2);
        assert!(exact.field.root_certified());
        for (tet, ex) in exact.shapes.iter().enumerate() {
            let z = ex.embed_f64();
            assert!((z - tri.shape(tet)).norm() < 1e-9);
        }
    }

    fn fig8_raw_json() -> serde_json::Value {
        serde_json::json!({
            "version": 1,
            "num_tetrahedra": 2,
            "gluings": [
                [[1, [0,1,3,2]], [1, [1,2,3,0]], [1, [2,3,1,0]], [1, [2,1,0,3]]],
                [[0, [0,1,3,2]], [0, [3,2,0,1]], [0, [3,0,1,2]], [0, [2,1,0,3]]]
            ],
            "shapes": [
                {"re": 0.5, "im": 0.8660254037844386},
                {"re": 0.5, "im": 0.8660254037844386}
            ]
        })
    }

    #[test]
    fn validation_rejects_broken_input() {
        // Even permutation.
        let mut v = fig8_raw_json();
        v["gluings"][0][0][1] = serde_json::json!([0, 1, 2, 3]);
        let err = IdealTriangulation::<f64>::from_json_str(&v.to_string()).unwrap_err();
        assert!(matches!(err, TriangulationError::EvenPermutation { .. }));

        // Broken involution: swap one neighbor.
        let mut v = fig8_raw_json();
        v["gluings"][1][0][1] = serde_json::json!([1, 2, 3, 0]);
        let err = IdealTriangulation::<f64>::from_json_str(&v.to_string()).unwrap_err();
        assert!(matches!(err, TriangulationError::NotInvolution { .. }));

        // Neighbor out of range.
        let mut v = fig8_raw_json();
        v["gluings"][0][0][0] = serde_json::json!(7);
        let err = IdealTriangulation::<f64>::from_json_str(&v.to_string()).unwrap_err();
        assert!(matches!(err, TriangulationError::BadNeighbor { .. }));

        // Degenerate shape.
        let mut v = fig8_raw_json();
        v["shapes"][0] = serde_json::json!({"re": 1.0, "im": 0.0});
        let err = IdealTriangulation::<f64>::from_json_str(&v.to_string()).unwrap_err();
        assert!(matches!(err, TriangulationError::DegenerateShape { .. }));

        // Lower half plane shape.
        let mut v = fig8_raw_json();
        v["shapes"][0] = serde_json::json!({"re": 0.5, "im": -0.5});
        let err = IdealTriangulation::<f64>::from_json_str(&v.to_string()).unwrap_err();
        assert!(matches!(err, TriangulationError::NegativeOrientation { .. }));

        // Wrong version.
        let mut v = fig8_raw_json();
        v["version"] = serde_json::json!(2);
        let err = IdealTriangulation::<f64>::from_json_str(&v.to_string()).unwrap_err();
        assert!(matches!(err, TriangulationError::UnsupportedVersion(2)));

        // Shape count mismatch.
        let mut v = fig8_raw_json();
        v["shapes"] = serde_json::json!([{"re": 0.5, "im": 0.8}]);
        let err = IdealTriangulation::<f64>::from_json_str(&v.to_string()).unwrap_err();
        assert!(matches!(err, TriangulationError::WrongCount { .. }));
    }

    #[test]
    fn self_glued_face_is_rejected() {
        // A single tetrahedron with face 0 glued to itself by the odd
        // permutation fixing 0 (a transposition of two other vertices)
        // violates the face-pairing rule.
        let v = serde_json::json!({
            "version": 1,
            "num_tetrahedra": 1,
            "gluings": [
                [[0, [0, 2, 1, 3]], [0, [1, 0, 2, 3]], [0, [0, 1, 3, 2]], [0, [0, 1, 3, 2]]]
            ],
            "shapes": [{"re": 0.0, "im": 1.0}]
        });
        let err = IdealTriangulation::<f64>::from_json_str(&v.to_string()).unwrap_err();
        assert!(matches!(err, TriangulationError::SelfGluedFace { .. }));
    }

    #[test]
    fn flat_tetrahedra_are_flagged_not_rejected() {
        let mut v = fig8_raw_json();
        // Keep combinatorics, make one shape real (and not 0 or 1).
        v["shapes"][0] = serde_json::json!({"re": -0.5, "im": 0.0});
        let tri = IdealTriangulation::<f64>::from_json_str(&v.to_string()).unwrap();
        assert_eq!(tri.flat_tets(), vec![0]);
        assert!(tri.is_flat(0));
        assert!(!tri.is_flat(1));
    }

    #[test]
    fn source_hash_is_stable() {
        let text = fig8_raw_json().to_string();
        let a = IdealTriangulation::<f64>::from_json_str(&text).unwrap();
        let b = IdealTriangulation::<f64>::from_json_str(&text).unwrap();
        assert_eq!(a.source_sha256(), b.source_sha256());
        assert_eq!(a.source_sha256().unwrap().len(), 64);
    }

    #[test]
    fn exact_edge_shape_matches_float_transforms() {
        let tri = fig8();
        let exact = tri.exact().unwrap();
        for edge in 0..6 {
            let ex = exact_edge_shape(&exact.shapes[0], edge).unwrap();
            let want = tri.edge_shape(0, edge);
            assert!((ex.embed_f64() - want).norm() < 1e-9, "edge {edge}");
        }
    }
}
