//! Complex interval arithmetic with exact rational endpoints.
//!
//! Boxes are axis-aligned rectangles whose corners are rationals, so every
//! bound here is exact; rounding happens only through [`ComplexBox::round_out`],
//! which widens endpoints outward onto the dyadic grid `2^-bits` to keep
//! denominators from snowballing across Newton iterations.

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Signed, Zero};

use super::poly::{rational_to_f64, Poly, Q};

/// Closed real interval [lo, hi] with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealBound {
    pub lo: Q,
    pub hi: Q,
}

impl RealBound {
    pub fn new(lo: Q, hi: Q) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RealBound { lo, hi }
    }

    pub fn point(x: Q) -> Self {
        RealBound { lo: x.clone(), hi: x }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn contains(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn strictly_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn strictly_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Q {
        (&self.lo + &self.hi) / Q::from_integer(2.into())
    }

    pub fn mid_f64(&self) -> f64 {
        rational_to_f64(&self.mid())
    }

    pub fn add(&self, other: &RealBound) -> RealBound {
        RealBound::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn sub(&self, other: &RealBound) -> RealBound {
        RealBound::new(&self.lo - &other.hi, &self.hi - &other.lo)
    }

    pub fn neg(&self) -> RealBound {
        RealBound::new(-self.hi.clone(), -self.lo.clone())
    }

    pub fn mul(&self, other: &RealBound) -> RealBound {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let mut lo = products[0].clone();
        let mut hi = products[0].clone();
        for p in &products[1..] {
            if p < &lo {
                lo = p.clone();
            }
            if p > &hi {
                hi = p.clone();
            }
        }
        RealBound::new(lo, hi)
    }

    pub fn square(&self) -> RealBound {
        if self.contains_zero() {
            let a = &self.lo * &self.lo;
            let b = &self.hi * &self.hi;
            RealBound::new(Q::zero(), a.max(b))
        } else {
            self.mul(self)
        }
    }

    /// Reciprocal; defined only for intervals excluding zero.
    pub fn recip(&self) -> Option<RealBound> {
        if self.contains_zero() {
            return None;
        }
        Some(RealBound::new(self.hi.recip(), self.lo.recip()))
    }

    pub fn scale(&self, c: &Q) -> RealBound {
        if c.is_negative() {
            RealBound::new(&self.hi * c, &self.lo * c)
        } else {
            RealBound::new(&self.lo * c, &self.hi * c)
        }
    }

    pub fn is_subset_of(&self, outer: &RealBound) -> bool {
        outer.lo <= self.lo && self.hi <= outer.hi
    }

    pub fn is_interior_of(&self, outer: &RealBound) -> bool {
        outer.lo < self.lo && self.hi < outer.hi
    }

    fn round_out(&self, bits: u32) -> RealBound {
        RealBound::new(dyadic_floor(&self.lo, bits), dyadic_ceil(&self.hi, bits))
    }
}

fn dyadic_floor(x: &Q, bits: u32) -> Q {
    let scale = BigInt::one() << bits;
    let scaled = x * Q::from_integer(scale.clone());
    Q::new(scaled.floor().to_integer(), scale)
}

fn dyadic_ceil(x: &Q, bits: u32) -> Q {
    let scale = BigInt::one() << bits;
    let scaled = x * Q::from_integer(scale.clone());
    Q::new(scaled.ceil().to_integer(), scale)
}

/// Axis-aligned rectangle in C with rational corners.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexBox {
    pub re: RealBound,
    pub im: RealBound,
}

impl ComplexBox {
    pub fn new(re: RealBound, im: RealBound) -> Self {
        ComplexBox { re, im }
    }

    pub fn point(re: Q, im: Q) -> Self {
        ComplexBox {
            re: RealBound::point(re),
            im: RealBound::point(im),
        }
    }

    /// Exact box around an f64 pair (f64 values are dyadic rationals).
    pub fn from_f64_center(re: f64, im: f64, radius: &Q) -> Option<Self> {
        let (re, im) = (Q::from_float(re)?, Q::from_float(im)?);
        Some(ComplexBox {
            re: RealBound::new(&re - radius, &re + radius),
            im: RealBound::new(&im - radius, &im + radius),
        })
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn mid_f64(&self) -> Complex<f64> {
        Complex::new(self.re.mid_f64(), self.im.mid_f64())
    }

    pub fn width_f64(&self) -> f64 {
        rational_to_f64(&self.re.width()).max(rational_to_f64(&self.im.width()))
    }

    pub fn add(&self, other: &ComplexBox) -> ComplexBox {
        ComplexBox::new(self.re.add(&other.re), self.im.add(&other.im))
    }

    pub fn sub(&self, other: &ComplexBox) -> ComplexBox {
        ComplexBox::new(self.re.sub(&other.re), self.im.sub(&other.im))
    }

    pub fn neg(&self) -> ComplexBox {
        ComplexBox::new(self.re.neg(), self.im.neg())
    }

    pub fn mul(&self, other: &ComplexBox) -> ComplexBox {
        let re = self.re.mul(&other.re).sub(&self.im.mul(&other.im));
        let im = self.re.mul(&other.im).add(&self.im.mul(&other.re));
        ComplexBox::new(re, im)
    }

    pub fn scale(&self, c: &Q) -> ComplexBox {
        ComplexBox::new(self.re.scale(c), self.im.scale(c))
    }

    /// |z|^2 as a real interval.
    pub fn norm_sq(&self) -> RealBound {
        self.re.square().add(&self.im.square())
    }

    /// Reciprocal via conj(z)/|z|^2; requires the box to exclude zero.
    pub fn recip(&self) -> Option<ComplexBox> {
        let d = self.norm_sq().recip()?;
        let conj = ComplexBox::new(self.re.clone(), self.im.neg());
        Some(ComplexBox::new(conj.re.mul(&d), conj.im.mul(&d)))
    }

    pub fn div(&self, other: &ComplexBox) -> Option<ComplexBox> {
        Some(self.mul(&other.recip()?))
    }

    pub fn is_subset_of(&self, outer: &ComplexBox) -> bool {
        self.re.is_subset_of(&outer.re) && self.im.is_subset_of(&outer.im)
    }

    pub fn is_interior_of(&self, outer: &ComplexBox) -> bool {
        self.re.is_interior_of(&outer.re) && self.im.is_interior_of(&outer.im)
    }

    pub fn intersect(&self, other: &ComplexBox) -> Option<ComplexBox> {
        let re_lo = self.re.lo.clone().max(other.re.lo.clone());
        let re_hi = self.re.hi.clone().min(other.re.hi.clone());
        let im_lo = self.im.lo.clone().max(other.im.lo.clone());
        let im_hi = self.im.hi.clone().min(other.im.hi.clone());
        if re_lo > re_hi || im_lo > im_hi {
            return None;
        }
        Some(ComplexBox::new(
            RealBound::new(re_lo, re_hi),
            RealBound::new(im_lo, im_hi),
        ))
    }

    /// Widens endpoints outward to the dyadic grid 2^-bits.
    pub fn round_out(&self, bits: u32) -> ComplexBox {
        ComplexBox::new(self.re.round_out(bits), self.im.round_out(bits))
    }
}

/// Interval Horner evaluation of a rational-coefficient polynomial.
pub fn eval_poly_box(p: &Poly, z: &ComplexBox) -> ComplexBox {
    let mut acc = ComplexBox::point(Q::zero(), Q::zero());
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(z);
        acc.re = acc.re.add(&RealBound::point(c.clone()));
    }
    acc
}

/// One interval Newton step for `p` on `boxed`: N = mid - p(mid)/p'(boxed),
/// intersected with the input. Returns the refined box plus a flag that is
/// true when N landed in the interior of the input, which certifies that the
/// box contains exactly one root of `p`.
pub fn newton_step(p: &Poly, dp: &Poly, boxed: &ComplexBox, bits: u32) -> Option<(ComplexBox, bool)> {
    let mid = ComplexBox::point(boxed.re.mid(), boxed.im.mid());
    let num = eval_poly_box(p, &mid);
    let den = eval_poly_box(dp, boxed);
    let quotient = num.div(&den)?;
    let n = mid.sub(&quotient);
    let certified = n.is_interior_of(boxed);
    let refined = n.intersect(boxed)?.round_out(bits);
    Some((refined, certified))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundedRefine {
    /// Newton contracted strictly inside the previous box at least once.
    CertifiedUnique,
    /// Refinement ran but never certified contraction.
    Uncertified,
}

/// Iterates Newton refinement up to `max_steps`, halting early once the box
/// width drops below 2^-bits. Falls back to bisection when the derivative
/// box straddles zero.
pub fn refine_root(
    p: &Poly,
    start: &ComplexBox,
    bits: u32,
    max_steps: usize,
) -> (ComplexBox, BoundedRefine) {
    let dp = p.derivative();
    let mut cur = start.clone();
    let mut status = BoundedRefine::Uncertified;
    let target = Q::new(BigInt::one(), BigInt::one() << bits);
    for _ in 0..max_steps {
        if cur.re.width() < target && cur.im.width() < target {
            break;
        }
        match newton_step(p, &dp, &cur, bits + 8) {
            Some((next, certified)) => {
                if certified {
                    status = BoundedRefine::CertifiedUnique;
                }
                if next == cur {
                    break;
                }
                cur = next;
            }
            None => {
                match bisect_step(p, &cur) {
                    Some(next) => cur = next,
                    None => break,
                }
            }
        }
    }
    (cur, status)
}

/// Splits the wider axis and keeps a half whose image still contains zero,
/// preferring the half containing a numerically polished root.
fn bisect_step(p: &Poly, cur: &ComplexBox) -> Option<ComplexBox> {
    let split_re = cur.re.width() >= cur.im.width();
    let halves = if split_re {
        let m = cur.re.mid();
        [
            ComplexBox::new(RealBound::new(cur.re.lo.clone(), m.clone()), cur.im.clone()),
            ComplexBox::new(RealBound::new(m, cur.re.hi.clone()), cur.im.clone()),
        ]
    } else {
        let m = cur.im.mid();
        [
            ComplexBox::new(cur.re.clone(), RealBound::new(cur.im.lo.clone(), m.clone())),
            ComplexBox::new(cur.re.clone(), RealBound::new(m, cur.im.hi.clone())),
        ]
    };
    let keeps: Vec<&ComplexBox> = halves
        .iter()
        .filter(|h| eval_poly_box(p, h).contains_zero())
        .collect();
    match keeps.len() {
        0 => None,
        1 => Some(keeps[0].clone()),
        _ => {
            // Both halves plausible; polish a float root from the center and
            // keep the half containing it.
            let mut z = cur.mid_f64();
            let dp = p.derivative();
            for _ in 0..50 {
                let d = dp.eval_complex(z);
                if d.norm() < 1e-300 {
                    break;
                }
                let step = p.eval_complex(z) / d;
                z -= step;
                if step.norm() < 1e-15 {
                    break;
                }
            }
            let (zr, zi) = (Q::from_float(z.re)?, Q::from_float(z.im)?);
            for h in &halves {
                if h.re.contains(&zr) && h.im.contains(&zi) {
                    return Some(h.clone());
                }
            }
            Some(halves[0].clone())
        }
    }
}
