//! Scalar abstractions shared by the exact and the floating-point layers.
//!
//! The group law and the vector-field algebra are polynomial identities, so
//! they are implemented over any commutative ring exposing [`Scalar`].  Exact
//! verification instantiates them with arbitrary-precision rationals, numeric
//! work instantiates them with `f64` (or `f32`).  The analytic layer (grids,
//! operators, representations) additionally needs elementary functions and is
//! generic over [`Real`].

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};

/// Commutative ring with exact small-rational constants.
///
/// `from_ratio(n, d)` must produce the exact ratio when the type is exact
/// (rationals) and the nearest representable value when it is a float.  All
/// coefficients appearing in the Engel group law are dyadic, so both
/// instantiations evaluate the same polynomials without rounding surprises.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
}

impl Scalar for f32 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f32 / den as f32
    }
}

impl Scalar for num_rational::BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num_rational::BigRational::new(num.into(), den.into())
    }
}

/// Complex numbers over a real field form a `Scalar` ring, so polynomials may
/// carry complex coefficients (needed for Fourier-side prefactors).
impl<R: Real> Scalar for Complex<R> {
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(R::from_ratio(num, den), R::zero())
    }
}

/// Floating-point field for the analytic layer.
///
/// `nalgebra::RealField` supplies elementary functions and linear algebra,
/// `FromPrimitive`/`ToPrimitive` bridge literal constants.  Deliberately does
/// not include `num_traits::Float` so that method calls resolve without
/// ambiguity.
pub trait Real:
    nalgebra::RealField + Copy + FromPrimitive + ToPrimitive + Scalar + Default
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` constant into the working real type.
#[inline]
pub fn rf<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("constant not representable")
}

/// Builds a complex number of the working real type from `f64` parts.
#[inline]
pub fn cf<R: Real>(re: f64, im: f64) -> Complex<R> {
    Complex::new(rf(re), rf(im))
}

/// Imaginary unit.
#[inline]
pub fn ci<R: Real>() -> Complex<R> {
    Complex::new(R::zero(), R::one())
}

/// Embeds a real value as a complex number.
#[inline]
pub fn cr<R: Real>(re: R) -> Complex<R> {
    Complex::new(re, R::zero())
}
