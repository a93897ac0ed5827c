//! Scalar abstractions shared by the numeric and exact code paths.
//!
//! Geometry is generic over a floating-point type through [`Real`], so every
//! numeric routine (volumes, holonomy developments, limit sets, circle fits)
//! can run in `f32` or `f64`. Matrix algebra is generic over [`MatrixScalar`],
//! which both `Complex<R>` and exact number-field elements implement; this is
//! what lets the same developing-map code produce floating-point and certified
//! exact holonomy matrices.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, Mul, Neg, Sub};

/// Floating-point scalar for the numeric lane.
pub trait Real:
    Float + FloatConst + FromPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Shorthand for lossy conversion from `f64` constants.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant converts to Real")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Ring operations needed for 2x2 matrix algebra over either `Complex<R>` or
/// an exact field element. Zero and one are instance-derived because exact
/// elements carry their field handle and cannot be conjured from nothing.
pub trait MatrixScalar:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
}

impl<R: Real> MatrixScalar for Complex<R> {
    fn zero_like(&self) -> Self {
        Complex::new(R::zero(), R::zero())
    }

    fn one_like(&self) -> Self {
        Complex::new(R::one(), R::zero())
    }

    fn is_zero_elem(&self) -> bool {
        self.re == R::zero() && self.im == R::zero()
    }
}
