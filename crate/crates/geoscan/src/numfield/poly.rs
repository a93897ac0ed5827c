//! Dense univariate polynomials with exact rational coefficients.
//!
//! Coefficients are stored in ascending degree order with no trailing zeros,
//! so the zero polynomial is the empty vector. Everything here is exact; the
//! only approximate operation is `eval_complex`, used for diagnostics.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

use super::FieldError;

pub type Q = BigRational;

/// Parses a rational from decimal-integer or `numer/denom` notation.
pub fn parse_rational(s: &str) -> Result<Q, FieldError> {
    s.trim()
        .parse::<Q>()
        .map_err(|_| FieldError::BadRational(s.to_string()))
}

pub fn q_from_i64(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Q>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().map_or(false, Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Poly::new(vec![c])
    }

    pub fn x() -> Self {
        Poly::new(vec![Q::zero(), Q::one()])
    }

    /// Builds a polynomial from ascending integer coefficients.
    pub fn from_i64(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| q_from_i64(c)).collect())
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Q> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().map_or(false, One::is_one)
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => {
                let inv = l.recip();
                Poly::new(self.coeffs.iter().map(|c| c * &inv).collect())
            }
        }
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_complex(&self, z: Complex<f64>) -> Complex<f64> {
        let mut acc = Complex::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + Complex::new(rational_to_f64(c), 0.0);
        }
        acc
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        Poly::new(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - other.coeff(i));
        }
        Poly::new(out)
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &Q) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Euclidean division; the divisor must be nonzero.
    pub fn divmod(&self, div: &Poly) -> (Poly, Poly) {
        assert!(!div.is_zero(), "division by the zero polynomial");
        let dd = div.degree().unwrap();
        if self.degree().map_or(true, |d| d < dd) {
            return (Poly::zero(), self.clone());
        }
        let lead_inv = div.leading().unwrap().recip();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Q::zero(); self.coeffs.len() - dd];
        while rem.len() > dd {
            let k = rem.len() - 1;
            let factor = rem[k].clone() * &lead_inv;
            quot[k - dd] = factor.clone();
            for i in 0..dd {
                let delta = &div.coeffs[i] * &factor;
                rem[k - dd + i] -= delta;
            }
            // The top coefficient cancels exactly by construction.
            rem.pop();
            while rem.last().map_or(false, Zero::is_zero) {
                rem.pop();
            }
        }
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn rem(&self, div: &Poly) -> Poly {
        self.divmod(div).1
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            out.push(c * q_from_i64(i as i64));
        }
        Poly::new(out)
    }

    /// Monic gcd via the Euclidean algorithm.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Product of the distinct irreducible factors, made monic.
    pub fn squarefree_part(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            return self.monic();
        }
        self.divmod(&g).0.monic()
    }

    /// Clears denominators and content, returning integer coefficients with a
    /// positive leading entry.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let mut lcm = BigInt::one();
        for c in &self.coeffs {
            lcm = num_integer::lcm(lcm, c.denom().clone());
        }
        let mut ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        let mut content = BigInt::zero();
        for v in &ints {
            content = num_integer::gcd(content, v.clone());
        }
        if content.is_zero() {
            content = BigInt::one();
        }
        if ints.last().map_or(false, Signed::is_negative) {
            content = -content;
        }
        for v in &mut ints {
            *v /= &content;
        }
        ints
    }
}

pub fn rational_to_f64(q: &Q) -> f64 {
    // Scale into i128 range first so huge intermediates do not overflow.
    let n = q.numer();
    let d = q.denom();
    match (i128::try_from(n), i128::try_from(d)) {
        (Ok(n), Ok(d)) => n as f64 / d as f64,
        _ => {
            let bits = n.bits().max(d.bits()).saturating_sub(100);
            let shifted_n = n >> bits;
            let shifted_d = d >> bits;
            let nf = i128::try_from(&shifted_n).map(|v| v as f64).unwrap_or(f64::MAX);
            let df = i128::try_from(&shifted_d).map(|v| v as f64).unwrap_or(f64::MAX);
            nf / df
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootInterval {
    WholeLine,
    /// Open interval (lo, hi).
    Open(i64, i64),
}

/// Number of distinct real roots of `p` on the whole line or an open
/// rational interval, by Sturm's theorem on the squarefree part.
pub fn sturm_real_root_count(p: &Poly, interval: RootInterval) -> Result<usize, FieldError> {
    if p.is_zero() {
        return Err(FieldError::ZeroPolynomial);
    }
    let sf = p.squarefree_part();
    if sf.degree() == Some(0) {
        return Ok(0);
    }
    let chain = sturm_chain(&sf);
    match interval {
        RootInterval::WholeLine => {
            let lo = variations(&chain, Endpoint::NegInf);
            let hi = variations(&chain, Endpoint::PosInf);
            Ok(lo.saturating_sub(hi))
        }
        RootInterval::Open(a, b) => {
            if a >= b {
                return Ok(0);
            }
            let (qa, qb) = (q_from_i64(a), q_from_i64(b));
            let lo = variations(&chain, Endpoint::At(&qa));
            let hi = variations(&chain, Endpoint::At(&qb));
            let mut count = lo.saturating_sub(hi);
            // Sturm counts roots in (a, b]; drop b itself if it is a root.
            if sf.eval(&qb).is_zero() {
                count -= 1;
            }
            Ok(count)
        }
    }
}

fn sturm_chain(sf: &Poly) -> Vec<Poly> {
    let mut chain = vec![sf.clone(), sf.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            return chain;
        }
        let r = chain[n - 2].rem(&chain[n - 1]).neg();
        if r.is_zero() {
            return chain;
        }
        chain.push(r);
    }
}

enum Endpoint<'a> {
    NegInf,
    PosInf,
    At(&'a Q),
}

fn variations(chain: &[Poly], at: Endpoint) -> usize {
    let mut signs: Vec<Ordering> = Vec::with_capacity(chain.len());
    for p in chain {
        let s = match &at {
            Endpoint::At(x) => p.eval(x).cmp(&Q::zero()),
            Endpoint::PosInf => p
                .leading()
                .map_or(Ordering::Equal, |l| l.cmp(&Q::zero())),
            Endpoint::NegInf => p.leading().map_or(Ordering::Equal, |l| {
                let s = l.cmp(&Q::zero());
                if p.degree().unwrap_or(0) % 2 == 1 {
                    s.reverse()
                } else {
                    s
                }
            }),
        };
        signs.push(s);
    }
    let mut count = 0;
    let mut last: Option<Ordering> = None;
    for s in signs {
        if s == Ordering::Equal {
            continue;
        }
        if let Some(prev) = last {
            if prev != s {
                count += 1;
            }
        }
        last = Some(s);
    }
    count
}

/// Complete irreducibility test over Q at small scale: rational-root screen
/// for cubic and lower degrees, Kronecker factor interpolation above that.
/// The divisor enumeration is budgeted; overruns fail loudly instead of
/// guessing.
pub fn is_irreducible(p: &Poly, budget: usize) -> Result<bool, FieldError> {
    let deg = match p.degree() {
        None | Some(0) => return Ok(false),
        Some(1) => return Ok(true),
        Some(d) => d,
    };
    let ints = p.primitive_integer();
    if has_rational_root(&ints, budget)? {
        return Ok(false);
    }
    if deg <= 3 {
        return Ok(true);
    }
    kronecker_has_factor(&ints, budget).map(|found| !found)
}

fn has_rational_root(ints: &[BigInt], budget: usize) -> Result<bool, FieldError> {
    let a0 = &ints[0];
    let an = ints.last().unwrap();
    if a0.is_zero() {
        return Ok(true);
    }
    let p_divs = signed_divisors(a0, budget)?;
    let q_divs = signed_divisors(an, budget)?;
    let poly = Poly::new(
        ints.iter()
            .map(|c| Q::from_integer(c.clone()))
            .collect(),
    );
    for num in &p_divs {
        for den in &q_divs {
            if den.is_negative() {
                continue;
            }
            let cand = Q::new(num.clone(), den.clone());
            if poly.eval(&cand).is_zero() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn signed_divisors(n: &BigInt, budget: usize) -> Result<Vec<BigInt>, FieldError> {
    let n = n.abs();
    let limit = BigInt::from(u64::MAX);
    if n > limit {
        return Err(FieldError::BudgetExceeded("divisor enumeration".into()));
    }
    let n: u64 = n.try_into().unwrap();
    if n == 0 {
        return Ok(vec![BigInt::zero()]);
    }
    let mut divs = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            divs.push(d);
            if d != n / d {
                divs.push(n / d);
            }
        }
        if divs.len() > budget {
            return Err(FieldError::BudgetExceeded("divisor enumeration".into()));
        }
        d += 1;
    }
    let mut out = Vec::with_capacity(divs.len() * 2);
    for d in divs {
        out.push(BigInt::from(d));
        out.push(-BigInt::from(d));
    }
    Ok(out)
}

fn kronecker_has_factor(ints: &[BigInt], budget: usize) -> Result<bool, FieldError> {
    let deg = ints.len() - 1;
    let poly = Poly::new(
        ints.iter()
            .map(|c| Q::from_integer(c.clone()))
            .collect(),
    );
    for d in 2..=deg / 2 {
        // Sample points 0, 1, -1, 2, -2, ... skipping roots (none exist:
        // rational roots were screened out, and integer points with value 0
        // would have been roots).
        let mut points: Vec<Q> = Vec::new();
        let mut k = 0i64;
        while points.len() < d + 1 {
            for cand in [k, -k] {
                if points.len() >= d + 1 {
                    break;
                }
                let q = q_from_i64(cand);
                if points.contains(&q) {
                    continue;
                }
                if !poly.eval(&q).is_zero() {
                    points.push(q);
                }
            }
            k += 1;
        }
        let value_divisors: Vec<Vec<BigInt>> = points
            .iter()
            .map(|x| {
                let v = poly.eval(x);
                debug_assert!(v.is_integer());
                signed_divisors(v.numer(), budget)
            })
            .collect::<Result<_, _>>()?;
        let mut total: usize = 1;
        for (i, ds) in value_divisors.iter().enumerate() {
            let n = if i == 0 { ds.len() / 2 } else { ds.len() };
            total = total.saturating_mul(n.max(1));
            if total > budget {
                return Err(FieldError::BudgetExceeded(
                    "factor candidate enumeration".into(),
                ));
            }
        }
        // Divisor signs double every slot; fixing the first slot's sign to
        // positive halves the search since g and -g divide together.
        let radix =
            |i: usize| -> usize { value_divisors[i].len() / if i == 0 { 2 } else { 1 } };
        let mut choice = vec![0usize; d + 1];
        'combos: loop {
            let values: Vec<Q> = (0..=d)
                .map(|i| {
                    let idx = if i == 0 { choice[i] * 2 } else { choice[i] };
                    Q::from_integer(value_divisors[i][idx].clone())
                })
                .collect();
            if let Some(g) = lagrange(&points, &values) {
                if g.degree() == Some(d) && poly.rem(&g).is_zero() {
                    return Ok(true);
                }
            }
            let mut pos = 0;
            loop {
                if pos > d {
                    break 'combos;
                }
                choice[pos] += 1;
                if choice[pos] < radix(pos) {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
        }
    }
    Ok(false)
}

fn lagrange(xs: &[Q], ys: &[Q]) -> Option<Poly> {
    let mut acc = Poly::zero();
    for i in 0..xs.len() {
        let mut term = Poly::constant(ys[i].clone());
        for j in 0..xs.len() {
            if i == j {
                continue;
            }
            let denom = &xs[i] - &xs[j];
            if denom.is_zero() {
                return None;
            }
            let lin = Poly::new(vec![-&xs[j] * denom.recip(), denom.recip()]);
            term = term.mul(&lin);
        }
        acc = acc.add(&term);
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divmod_reconstructs() {
        let a = Poly::from_i64(&[2, 0, -3, 1, 4]);
        let b = Poly::from_i64(&[1, 2, 1]);
        let (q, r) = a.divmod(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().unwrap_or(0) < b.degree().unwrap());
    }

    #[test]
    fn gcd_of_shared_factor() {
        let shared = Poly::from_i64(&[-1, 1]);
        let a = shared.mul(&Poly::from_i64(&[1, 1]));
        let b = shared.mul(&Poly::from_i64(&[2, 1]));
        assert_eq!(a.gcd(&b), shared.monic());
    }

    #[test]
    fn squarefree_strips_multiplicity() {
        let p = Poly::from_i64(&[-1, 1]); // x - 1
        let sq = p.mul(&p).mul(&Poly::from_i64(&[1, 1]));
        let sf = sq.squarefree_part();
        assert_eq!(sf, Poly::from_i64(&[-1, 0, 1]).monic()); // x^2 - 1
    }

    #[test]
    fn sturm_counts_match_known_roots() {
        // x^2 - 2: one root in (0, 2), two on the line.
        let p = Poly::from_i64(&[-2, 0, 1]);
        assert_eq!(
            sturm_real_root_count(&p, RootInterval::Open(0, 2)).unwrap(),
            1
        );
        assert_eq!(
            sturm_real_root_count(&p, RootInterval::WholeLine).unwrap(),
            2
        );
        // x^2 + 1: no real roots.
        let q = Poly::from_i64(&[1, 0, 1]);
        assert_eq!(
            sturm_real_root_count(&q, RootInterval::WholeLine).unwrap(),
            0
        );
        // x^3 - x: three real roots, one in (0, 2) after excluding endpoints.
        let c = Poly::from_i64(&[0, -1, 0, 1]);
        assert_eq!(
            sturm_real_root_count(&c, RootInterval::WholeLine).unwrap(),
            3
        );
        assert_eq!(
            sturm_real_root_count(&c, RootInterval::Open(0, 2)).unwrap(),
            1
        );
    }

    #[test]
    fn sturm_open_interval_excludes_endpoint_roots() {
        let p = Poly::from_i64(&[0, 1]); // x
        assert_eq!(
            sturm_real_root_count(&p, RootInterval::Open(0, 1)).unwrap(),
            0
        );
        assert_eq!(
            sturm_real_root_count(&p, RootInterval::Open(-1, 0)).unwrap(),
            0
        );
        assert_eq!(
            sturm_real_root_count(&p, RootInterval::Open(-1, 1)).unwrap(),
            1
        );
    }

    #[test]
    fn sturm_repeated_roots_counted_once() {
        let p = Poly::from_i64(&[-1, 1]);
        let p2 = p.mul(&p);
        assert_eq!(
            sturm_real_root_count(&p2, RootInterval::WholeLine).unwrap(),
            1
        );
    }

    #[test]
    fn irreducibility_on_known_cases() {
        assert!(is_irreducible(&Poly::from_i64(&[-2, 0, 1]), 100_000).unwrap()); // x^2-2
        assert!(is_irreducible(&Poly::from_i64(&[1, 0, 1]), 100_000).unwrap()); // x^2+1
        assert!(is_irreducible(&Poly::from_i64(&[1, -1, 1]), 100_000).unwrap()); // x^2-x+1
        assert!(!is_irreducible(&Poly::from_i64(&[-1, 0, 1]), 100_000).unwrap()); // x^2-1
        assert!(!is_irreducible(&Poly::from_i64(&[0, 1, 1]), 100_000).unwrap()); // x^2+x
        // x^4 + 1 is irreducible over Q but reducible mod every prime; the
        // Kronecker search must get this right.
        assert!(is_irreducible(&Poly::from_i64(&[1, 0, 0, 0, 1]), 100_000).unwrap());
        // (x^2+1)(x^2-2) has no rational root yet factors.
        let prod = Poly::from_i64(&[1, 0, 1]).mul(&Poly::from_i64(&[-2, 0, 1]));
        assert!(!is_irreducible(&prod, 100_000).unwrap());
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), Q::new(3.into(), 4.into()));
        assert_eq!(parse_rational("-2").unwrap(), q_from_i64(-2));
        assert!(parse_rational("chaos").is_err());
    }
}
