//! Verification workbench for the pseudo-differential calculus on the Engel
//! group.
//!
//! The crate is layered:
//!
//! * exact algebra over any [`scalar::Scalar`] ring: the group law
//!   ([`group`]), polynomials ([`poly`]) and the invariant vector fields
//!   ([`fields`]);
//! * analytic machinery over any [`scalar::Real`] float: quadrature,
//!   discretized operators, Gaussian test functions;
//! * the calculus itself: Schroedinger-type representations, the group
//!   Fourier transform, difference operators, symbol seminorms and the
//!   comparison with the flat Weyl quantization.

pub mod deltaops;
pub mod error;
pub mod fields;
pub mod gauss1d;
pub mod gauss4;
pub mod gft;
pub mod grid;
pub mod group;
pub mod heisenberg;
pub mod operator;
pub mod poly;
pub mod quad;
pub mod quadgauss;
pub mod rep;
pub mod scalar;
pub mod symbols;
pub mod verify;
pub mod wavepacket;

pub use error::{Error, Result};

pub use scalar::{Real, Scalar};

/// Arbitrary-precision rational scalar used by the exact layer.
pub type Rational = num_rational::BigRational;

/// Complex double-precision scalar used by the analytic layer.
pub type C64 = num_complex::Complex<f64>;

/// Group element with exact rational coordinates.
pub type GroupElementQ = group::GroupElement<Rational>;

/// Group element with `f64` coordinates.
pub type GroupElementF = group::GroupElement<f64>;

/// Exact polynomial in the group coordinates.
pub type Poly4Q = poly::Poly4<Rational>;

/// Exact differential operator with polynomial coefficients.
pub type PolyDiffOpQ = fields::PolyDiffOp<Rational>;
