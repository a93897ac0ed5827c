//! Exact arithmetic in algebraic number fields Q(alpha).
//!
//! A field is a monic irreducible minimal polynomial together with a
//! certified complex interval enclosing the distinguished root alpha.
//! Elements are rational coefficient vectors in the power basis
//! 1, alpha, ..., alpha^(n-1). All ring operations are exact; questions
//! about the complex embedding (is this element real? what sign does it
//! have?) are answered by interval evaluation at the root box, refined by
//! interval Newton until the answer is certified or a budget runs out.

pub mod interval;
pub mod poly;

use num_complex::Complex;
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

use crate::scalar::MatrixScalar;
use interval::{eval_poly_box, refine_root, BoundedRefine, ComplexBox};
use poly::{Poly, Q};

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("invalid rational literal `{0}`")]
    BadRational(String),
    #[error("zero polynomial where a nonzero one is required")]
    ZeroPolynomial,
    #[error("minimal polynomial must have degree at least 1")]
    DegreeZero,
    #[error("minimal polynomial is reducible over Q")]
    Reducible,
    #[error("root enclosure excludes every root of the minimal polynomial")]
    RootExcluded,
    #[error("division by a zero field element")]
    DivisionByZero,
    #[error("operands belong to different number fields")]
    FieldMismatch,
    #[error("coefficient vector has wrong length: got {got}, field degree is {expected}")]
    BadCoefficientCount { got: usize, expected: usize },
    #[error("budget exceeded during {0}")]
    BudgetExceeded(String),
}

#[derive(Clone, Copy, Debug)]
pub struct FieldOptions {
    /// Cap on divisor-combination candidates in the irreducibility test.
    pub irreducibility_budget: usize,
    /// Dyadic precision target for the stored root box.
    pub precision_bits: u32,
    /// Newton/bisection iterations allowed while refining the root box.
    pub refine_steps: usize,
}

impl Default for FieldOptions {
    fn default() -> Self {
        FieldOptions {
            irreducibility_budget: 200_000,
            precision_bits: 128,
            refine_steps: 96,
        }
    }
}

/// Controls how hard realness queries work before giving up.
#[derive(Clone, Copy, Debug)]
pub struct RealnessConfig {
    /// Numeric fallback threshold on |Im| when certification stalls.
    pub threshold: f64,
    /// Dyadic grid for interval refinement.
    pub precision_bits: u32,
    /// Refinement iterations per query.
    pub max_refine: usize,
}

impl Default for RealnessConfig {
    fn default() -> Self {
        RealnessConfig {
            threshold: 0.01,
            precision_bits: 128,
            max_refine: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RealnessVerdict {
    /// The embedding's imaginary part is certifiably nonzero.
    CertifiedNotReal,
    /// Certification did not separate the value from the real line, but the
    /// numeric imaginary part is below the configured threshold.
    NumericallyReal,
    /// Neither certified nonreal nor numerically close to real.
    Inconclusive,
}

pub struct NumberField {
    min_poly: Poly,
    root: ComplexBox,
    degree: usize,
    root_certified: bool,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumberField")
            .field("min_poly", &self.min_poly)
            .field("root", &self.root.mid_f64())
            .field("certified", &self.root_certified)
            .finish()
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.min_poly == other.min_poly && self.root.intersect(&other.root).is_some()
    }
}

impl NumberField {
    /// Validates and constructs a field: the polynomial is normalized monic,
    /// proven irreducible, and the root box is checked to contain a root and
    /// then refined (recording whether Newton certified uniqueness).
    pub fn new(min_poly: Poly, root: ComplexBox, opts: FieldOptions) -> Result<Arc<Self>, FieldError> {
        if min_poly.is_zero() {
            return Err(FieldError::ZeroPolynomial);
        }
        let min_poly = min_poly.monic();
        let degree = min_poly.degree().unwrap();
        if degree == 0 {
            return Err(FieldError::DegreeZero);
        }
        if !poly::is_irreducible(&min_poly, opts.irreducibility_budget)? {
            return Err(FieldError::Reducible);
        }
        if !eval_poly_box(&min_poly, &root).contains_zero() {
            return Err(FieldError::RootExcluded);
        }
        let (refined, status) = refine_root(&min_poly, &root, opts.precision_bits, opts.refine_steps);
        if !eval_poly_box(&min_poly, &refined).contains_zero() {
            return Err(FieldError::RootExcluded);
        }
        Ok(Arc::new(NumberField {
            min_poly,
            root: refined,
            degree,
            root_certified: status == BoundedRefine::CertifiedUnique,
        }))
    }

    pub fn min_poly(&self) -> &Poly {
        &self.min_poly
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn root_box(&self) -> &ComplexBox {
        &self.root
    }

    pub fn root_certified(&self) -> bool {
        self.root_certified
    }

    pub fn root_f64(&self) -> Complex<f64> {
        self.root.mid_f64()
    }

    /// The generator alpha as an element.
    pub fn gen(self: &Arc<Self>) -> FieldElement {
        if self.degree == 1 {
            // alpha = -c0 for x + c0.
            let c0 = self.min_poly.coeff(0);
            return FieldElement::from_rational(self, -c0);
        }
        let mut coeffs = vec![Q::zero(); self.degree];
        coeffs[1] = Q::one();
        FieldElement {
            field: Arc::clone(self),
            coeffs,
        }
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement {
        FieldElement {
            field: Arc::clone(self),
            coeffs: vec![Q::zero(); self.degree],
        }
    }

    pub fn one(self: &Arc<Self>) -> FieldElement {
        FieldElement::from_rational(self, Q::one())
    }
}

fn check_compatible(a: &FieldElement, b: &FieldElement) -> Result<(), FieldError> {
    if Arc::ptr_eq(&a.field, &b.field) || *a.field == *b.field {
        Ok(())
    } else {
        Err(FieldError::FieldMismatch)
    }
}

#[derive(Clone)]
pub struct FieldElement {
    field: Arc<NumberField>,
    /// Coefficients in the power basis, always of length `field.degree`.
    coeffs: Vec<Q>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl FieldElement {
    pub fn from_coeffs(field: &Arc<NumberField>, coeffs: Vec<Q>) -> Result<Self, FieldError> {
        if coeffs.len() != field.degree {
            return Err(FieldError::BadCoefficientCount {
                got: coeffs.len(),
                expected: field.degree,
            });
        }
        Ok(FieldElement {
            field: Arc::clone(field),
            coeffs,
        })
    }

    pub fn from_rational(field: &Arc<NumberField>, c: Q) -> Self {
        let mut coeffs = vec![Q::zero(); field.degree];
        coeffs[0] = c;
        FieldElement {
            field: Arc::clone(field),
            coeffs,
        }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(Zero::is_zero)
    }

    fn as_poly(&self) -> Poly {
        Poly::new(self.coeffs.to_vec())
    }

    fn from_poly(field: &Arc<NumberField>, p: Poly) -> Self {
        let reduced = p.rem(&field.min_poly);
        let mut coeffs = reduced.coeffs().to_vec();
        coeffs.resize(field.degree, Q::zero());
        FieldElement {
            field: Arc::clone(field),
            coeffs,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, FieldError> {
        check_compatible(self, other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(FieldElement {
            field: Arc::clone(&self.field),
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FieldError> {
        check_compatible(self, other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(FieldElement {
            field: Arc::clone(&self.field),
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        FieldElement {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, FieldError> {
        check_compatible(self, other)?;
        Ok(Self::from_poly(
            &self.field,
            self.as_poly().mul(&other.as_poly()),
        ))
    }

    pub fn scale(&self, c: &Q) -> Self {
        FieldElement {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Inverse by the extended Euclidean algorithm against the minimal
    /// polynomial, which is coprime to any nonzero element.
    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let a = self.as_poly();
        let p = &self.field.min_poly;
        let (g, u, _) = ext_gcd(&a, p);
        debug_assert_eq!(g.degree(), Some(0), "element shares a factor with an irreducible modulus");
        let g0 = g.coeff(0);
        Ok(Self::from_poly(&self.field, u.scale(&g0.recip())))
    }

    pub fn div(&self, other: &Self) -> Result<Self, FieldError> {
        self.mul(&other.inv()?)
    }

    /// Interval enclosure of the complex embedding.
    pub fn embed(&self) -> ComplexBox {
        eval_poly_box(&self.as_poly(), &self.field.root)
    }

    /// Floating-point embedding through the root box midpoint.
    pub fn embed_f64(&self) -> Complex<f64> {
        self.as_poly().eval_complex(self.field.root_f64())
    }
}

/// Extended gcd over Q[x]: returns (g, u, v) with u*a + v*b = g.
fn ext_gcd(a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Poly::one(), Poly::zero());
    let (mut t0, mut t1) = (Poly::zero(), Poly::one());
    while !r1.is_zero() {
        let (q, r) = r0.divmod(&r1);
        r0 = std::mem::replace(&mut r1, r);
        let s = s0.sub(&q.mul(&s1));
        s0 = std::mem::replace(&mut s1, s);
        let t = t0.sub(&q.mul(&t1));
        t0 = std::mem::replace(&mut t1, t);
    }
    (r0, s0, t0)
}

/// Exact minimal polynomial of an element: the squarefree part of the
/// characteristic polynomial of multiplication by the element, computed by
/// the Faddeev-LeVerrier recurrence over Q.
pub fn minimal_polynomial(e: &FieldElement) -> Poly {
    let n = e.field.degree;
    if e.is_rational() {
        return Poly::new(vec![-e.coeffs[0].clone(), Q::one()]);
    }
    // Column j holds the coordinates of e * alpha^j.
    let mut mat = vec![vec![Q::zero(); n]; n];
    let mut col = e.clone();
    let alpha = e.field.gen();
    for j in 0..n {
        for i in 0..n {
            mat[i][j] = col.coeffs[i].clone();
        }
        if j + 1 < n {
            col = col.mul(&alpha).expect("same field");
        }
    }
    let char_poly = char_poly_fl(&mat);
    char_poly.squarefree_part()
}

fn char_poly_fl(m: &[Vec<Q>]) -> Poly {
    let n = m.len();
    let trace = |a: &[Vec<Q>]| -> Q {
        let mut t = Q::zero();
        for (i, row) in a.iter().enumerate() {
            t += row[i].clone();
        }
        t
    };
    let mat_mul = |a: &[Vec<Q>], b: &[Vec<Q>]| -> Vec<Vec<Q>> {
        let mut out = vec![vec![Q::zero(); n]; n];
        for i in 0..n {
            for k in 0..n {
                if a[i][k].is_zero() {
                    continue;
                }
                for j in 0..n {
                    let term = &a[i][k] * &b[k][j];
                    out[i][j] += term;
                }
            }
        }
        out
    };
    // p(x) = x^n + c1 x^(n-1) + ... + cn
    let mut cs: Vec<Q> = Vec::with_capacity(n);
    let mut a = m.to_vec();
    let mut c = -trace(&a);
    cs.push(c.clone());
    for k in 2..=n {
        for i in 0..n {
            a[i][i] += c.clone();
        }
        a = mat_mul(m, &a);
        c = -trace(&a) / poly::q_from_i64(k as i64);
        cs.push(c.clone());
    }
    let mut coeffs = vec![Q::one()];
    coeffs.extend(cs);
    coeffs.reverse();
    Poly::new(coeffs)
}

/// Decides whether the complex embedding of an element is real.
///
/// Interval evaluation at the root box is refined until the imaginary part
/// either excludes zero (certified nonreal) or the budget runs out, at which
/// point the numeric embedding breaks the tie against `cfg.threshold`.
pub fn embedding_is_real(e: &FieldElement, cfg: &RealnessConfig) -> RealnessVerdict {
    let p = &e.field.min_poly;
    let mut root = e.field.root.clone();
    for step in 0..=cfg.max_refine {
        let img = eval_poly_box(&e.as_poly(), &root);
        if img.im.strictly_positive() || img.im.strictly_negative() {
            return RealnessVerdict::CertifiedNotReal;
        }
        if step == cfg.max_refine {
            break;
        }
        let (next, _) = refine_root(p, &root, cfg.precision_bits + 16 * step as u32, 1);
        if next == root {
            break;
        }
        root = next;
    }
    let im = e.embed_f64().im;
    if im.abs() < cfg.threshold {
        RealnessVerdict::NumericallyReal
    } else {
        RealnessVerdict::Inconclusive
    }
}

/// Certified sign of the real part of an element's embedding, available only
/// when the imaginary part encloses zero (e.g. elements of real fields).
/// Returns `None` when the budget runs out before the sign separates.
pub fn certified_sign(e: &FieldElement, cfg: &RealnessConfig) -> Option<Ordering> {
    if e.is_zero() {
        return Some(Ordering::Equal);
    }
    let p = &e.field.min_poly;
    let mut root = e.field.root.clone();
    for step in 0..=cfg.max_refine {
        let img = eval_poly_box(&e.as_poly(), &root);
        if img.re.strictly_positive() {
            return Some(Ordering::Greater);
        }
        if img.re.strictly_negative() {
            return Some(Ordering::Less);
        }
        if step == cfg.max_refine {
            break;
        }
        let (next, _) = refine_root(p, &root, cfg.precision_bits + 16 * step as u32, 1);
        if next == root {
            break;
        }
        root = next;
    }
    None
}

impl MatrixScalar for FieldElement {
    fn zero_like(&self) -> Self {
        self.field.zero()
    }
    fn one_like(&self) -> Self {
        self.field.one()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
}

impl std::ops::Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: Self) -> Self {
        FieldElement::add(&self, &rhs).expect("field mismatch in +")
    }
}

impl std::ops::Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: Self) -> Self {
        FieldElement::sub(&self, &rhs).expect("field mismatch in -")
    }
}

impl std::ops::Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: Self) -> Self {
        FieldElement::mul(&self, &rhs).expect("field mismatch in *")
    }
}

impl std::ops::Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> Self {
        FieldElement::neg(&self)
    }
}

/// Complex number with exact field-element components, for triangulations
/// whose shapes are given as real/imaginary parts over a real field.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactComplex {
    pub re: FieldElement,
    pub im: FieldElement,
}

impl ExactComplex {
    pub fn new(re: FieldElement, im: FieldElement) -> Result<Self, FieldError> {
        check_compatible(&re, &im)?;
        Ok(ExactComplex { re, im })
    }

    pub fn from_real(re: FieldElement) -> Self {
        let im = re.zero_like();
        ExactComplex { re, im }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Result<Self, FieldError> {
        Ok(ExactComplex {
            re: self.re.add(&o.re)?,
            im: self.im.add(&o.im)?,
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self, FieldError> {
        Ok(ExactComplex {
            re: self.re.sub(&o.re)?,
            im: self.im.sub(&o.im)?,
        })
    }

    pub fn neg(&self) -> Self {
        ExactComplex {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self, FieldError> {
        let re = self.re.mul(&o.re)?.sub(&self.im.mul(&o.im)?)?;
        let im = self.re.mul(&o.im)?.add(&self.im.mul(&o.re)?)?;
        Ok(ExactComplex { re, im })
    }

    pub fn norm_sq(&self) -> FieldElement {
        let a = self.re.mul(&self.re).expect("same field");
        let b = self.im.mul(&self.im).expect("same field");
        a.add(&b).expect("same field")
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        let d = self.norm_sq().inv()?;
        Ok(ExactComplex {
            re: self.re.mul(&d)?,
            im: self.im.neg().mul(&d)?,
        })
    }

    pub fn div(&self, o: &Self) -> Result<Self, FieldError> {
        self.mul(&o.inv()?)
    }

    pub fn embed_f64(&self) -> Complex<f64> {
        let re = self.re.embed_f64();
        let im = self.im.embed_f64();
        // Components live in a real field; their embeddings are real up to
        // the root box width.
        Complex::new(re.re - im.im, re.im + im.re)
    }
}

impl MatrixScalar for ExactComplex {
    fn zero_like(&self) -> Self {
        ExactComplex {
            re: self.re.zero_like(),
            im: self.re.zero_like(),
        }
    }
    fn one_like(&self) -> Self {
        ExactComplex {
            re: self.re.one_like(),
            im: self.re.zero_like(),
        }
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
}

impl std::ops::Add for ExactComplex {
    type Output = ExactComplex;
    fn add(self, rhs: Self) -> Self {
        ExactComplex::add(&self, &rhs).expect("field mismatch in +")
    }
}

impl std::ops::Sub for ExactComplex {
    type Output = ExactComplex;
    fn sub(self, rhs: Self) -> Self {
        ExactComplex::sub(&self, &rhs).expect("field mismatch in -")
    }
}

impl std::ops::Mul for ExactComplex {
    type Output = ExactComplex;
    fn mul(self, rhs: Self) -> Self {
        ExactComplex::mul(&self, &rhs).expect("field mismatch in *")
    }
}

impl std::ops::Neg for ExactComplex {
    type Output = ExactComplex;
    fn neg(self) -> Self {
        ExactComplex::neg(&self)
    }
}

/// Exact tetrahedron shape: either an element whose complex embedding is the
/// shape, or explicit real/imaginary parts over a real field.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactShape {
    Embedded(FieldElement),
    Pair(ExactComplex),
}

impl ExactShape {
    pub fn embed_f64(&self) -> Complex<f64> {
        match self {
            ExactShape::Embedded(e) => e.embed_f64(),
            ExactShape::Pair(z) => z.embed_f64(),
        }
    }
}

/// Parsed exact data attached to a triangulation: the field plus one exact
/// shape per tetrahedron.
#[derive(Clone, Debug)]
pub struct ExactStructure {
    pub field: Arc<NumberField>,
    pub shapes: Vec<ExactShape>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use poly::q_from_i64;

    fn hex_field() -> Arc<NumberField> {
        // x^2 - x + 1 with root e^{i pi/3}.
        let p = Poly::from_i64(&[1, -1, 1]);
        let root = ComplexBox::from_f64_center(0.5, 0.866, &Q::new(1.into(), 50.into())).unwrap();
        NumberField::new(p, root, FieldOptions::default()).unwrap()
    }

    fn sqrt2_field() -> Arc<NumberField> {
        let p = Poly::from_i64(&[-2, 0, 1]);
        let root = ComplexBox::from_f64_center(1.4, 0.0, &Q::new(1.into(), 10.into())).unwrap();
        NumberField::new(p, root, FieldOptions::default()).unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        let red = Poly::from_i64(&[-1, 0, 1]); // (x-1)(x+1)
        let root = ComplexBox::from_f64_center(1.0, 0.0, &Q::new(1.into(), 10.into())).unwrap();
        assert!(matches!(
            NumberField::new(red, root, FieldOptions::default()),
            Err(FieldError::Reducible)
        ));
        let p = Poly::from_i64(&[-2, 0, 1]);
        let wrong = ComplexBox::from_f64_center(5.0, 5.0, &Q::new(1.into(), 100.into())).unwrap();
        assert!(matches!(
            NumberField::new(p, wrong, FieldOptions::default()),
            Err(FieldError::RootExcluded)
        ));
    }

    #[test]
    fn arithmetic_satisfies_min_poly() {
        let f = hex_field();
        let a = f.gen();
        // alpha^2 - alpha + 1 = 0
        let val = a
            .mul(&a)
            .unwrap()
            .sub(&a)
            .unwrap()
            .add(&f.one())
            .unwrap();
        assert!(val.is_zero());
        // alpha^6 = 1 since alpha is a primitive 6th root of unity.
        let mut p = f.one();
        for _ in 0..6 {
            p = p.mul(&a).unwrap();
        }
        assert_eq!(p, f.one());
    }

    #[test]
    fn inverse_roundtrips() {
        let f = hex_field();
        let a = f.gen();
        let e = a.scale(&q_from_i64(3)).add(&f.one()).unwrap();
        let inv = e.inv().unwrap();
        assert_eq!(e.mul(&inv).unwrap(), f.one());
        assert!(f.zero().inv().is_err());
    }

    #[test]
    fn embedding_matches_root() {
        let f = hex_field();
        let a = f.gen();
        let z = a.embed_f64();
        assert!((z.re - 0.5).abs() < 1e-12);
        assert!((z.im - 3f64.sqrt() / 2.0).abs() < 1e-12);
        let boxed = a.embed();
        assert!(boxed.re.contains(&Q::new(1.into(), 2.into())));
    }

    #[test]
    fn minimal_polynomial_of_generator_and_shifts() {
        let f = hex_field();
        let a = f.gen();
        assert_eq!(minimal_polynomial(&a), Poly::from_i64(&[1, -1, 1]).monic());
        // alpha + 1 satisfies x^2 - 3x + 3.
        let e = a.add(&f.one()).unwrap();
        assert_eq!(minimal_polynomial(&e), Poly::from_i64(&[3, -3, 1]).monic());
        // Rational elements get degree-1 minimal polynomials.
        let half = FieldElement::from_rational(&f, Q::new(1.into(), 2.into()));
        let mp = minimal_polynomial(&half);
        assert_eq!(mp.degree(), Some(1));
        assert!(mp.eval(&Q::new(1.into(), 2.into())).is_zero());
    }

    #[test]
    fn minimal_polynomial_via_multiplication_matrix_is_monic_and_annihilates() {
        let f = sqrt2_field();
        let a = f.gen();
        // 1 + sqrt(2): minimal polynomial x^2 - 2x - 1.
        let e = a.add(&f.one()).unwrap();
        let mp = minimal_polynomial(&e);
        assert_eq!(mp, Poly::from_i64(&[-1, -2, 1]).monic());
        // Evaluate mp at e inside the field: must vanish.
        let mut acc = f.zero();
        for c in mp.coeffs().iter().rev() {
            acc = acc.mul(&e).unwrap();
            acc = acc.add(&FieldElement::from_rational(&f, c.clone())).unwrap();
        }
        assert!(acc.is_zero());
    }

    #[test]
    fn realness_verdicts() {
        let f = hex_field();
        let a = f.gen();
        let cfg = RealnessConfig::default();
        // alpha has imaginary part sqrt(3)/2: certified nonreal.
        assert_eq!(embedding_is_real(&a, &cfg), RealnessVerdict::CertifiedNotReal);
        // 2 alpha - 1 = i sqrt(3): certified nonreal.
        let e = a.scale(&q_from_i64(2)).sub(&f.one()).unwrap();
        assert_eq!(embedding_is_real(&e, &cfg), RealnessVerdict::CertifiedNotReal);
        // Rational element: interval cannot separate, numeric says real.
        let r = FieldElement::from_rational(&f, Q::new(7.into(), 3.into()));
        assert_eq!(embedding_is_real(&r, &cfg), RealnessVerdict::NumericallyReal);
    }

    #[test]
    fn realness_inconclusive_when_starved() {
        // A coarse enclosure plus a zero refinement budget leaves the
        // imaginary part straddling zero, and a tight threshold rejects the
        // numeric fallback: the query must admit it cannot decide.
        let p = Poly::from_i64(&[1, -1, 1]);
        let coarse = ComplexBox::from_f64_center(0.5, 0.5, &Q::new(3.into(), 4.into())).unwrap();
        let opts = FieldOptions {
            refine_steps: 0,
            ..FieldOptions::default()
        };
        let g = NumberField::new(p, coarse, opts).unwrap();
        let b = g.gen();
        let cfg = RealnessConfig {
            threshold: 1e-12,
            max_refine: 0,
            ..RealnessConfig::default()
        };
        assert_eq!(embedding_is_real(&b, &cfg), RealnessVerdict::Inconclusive);
        // Sanity: with budget restored the same query certifies.
        let cfg_full = RealnessConfig::default();
        assert_eq!(
            embedding_is_real(&b, &cfg_full),
            RealnessVerdict::CertifiedNotReal
        );
    }

    #[test]
    fn certified_signs_in_real_field() {
        let f = sqrt2_field();
        let a = f.gen();
        let cfg = RealnessConfig::default();
        // sqrt(2) - 1 > 0.
        let pos = a.sub(&f.one()).unwrap();
        assert_eq!(certified_sign(&pos, &cfg), Some(Ordering::Greater));
        // sqrt(2) - 3/2 < 0.
        let neg = a
            .sub(&FieldElement::from_rational(&f, Q::new(3.into(), 2.into())))
            .unwrap();
        assert_eq!(certified_sign(&neg, &cfg), Some(Ordering::Less));
        assert_eq!(certified_sign(&f.zero(), &cfg), Some(Ordering::Equal));
    }

    #[test]
    fn exact_complex_arithmetic() {
        let f = sqrt2_field();
        let a = f.gen();
        // z = 1 + i sqrt(2)
        let z = ExactComplex::new(f.one(), a.clone()).unwrap();
        let zz = z.mul(&z).unwrap();
        // (1 + i sqrt2)^2 = 1 - 2 + 2 i sqrt2 = -1 + 2 i sqrt2
        assert_eq!(zz.re, f.one().neg());
        assert_eq!(zz.im, a.scale(&q_from_i64(2)));
        let inv = z.inv().unwrap();
        let prod = z.mul(&inv).unwrap();
        assert_eq!(prod.re, f.one());
        assert!(prod.im.is_zero());
        let w = zz.embed_f64();
        assert!((w.re + 1.0).abs() < 1e-10);
        assert!((w.im - 2.0 * 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn field_mismatch_is_detected() {
        let f = hex_field();
        let g = sqrt2_field();
        assert!(matches!(
            f.gen().add(&g.gen()),
            Err(FieldError::FieldMismatch)
        ));
    }
}
