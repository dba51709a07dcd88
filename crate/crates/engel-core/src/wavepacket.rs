//! Gaussian wavepackets `exp(a u^2 + b u + c)` with `Re a < 0`.
//!
//! The family is closed under the phase-and-shift action of the Schroedinger
//! type representations, and inner products have closed forms, so matrix
//! elements of represented operators can be validated without quadrature.

use nalgebra::{ComplexField, DVector};
use num_complex::Complex;

use crate::gauss1d::gauss_integral;
use crate::grid::Grid1D;
use crate::scalar::{cr, rf, Real};

#[derive(Clone, Debug)]
pub struct Wavepacket<R: Real> {
    /// Quadratic exponent coefficient, `Re a < 0`.
    pub a: Complex<R>,
    /// Linear exponent coefficient.
    pub b: Complex<R>,
    /// Constant exponent term (complex log-amplitude).
    pub c: Complex<R>,
}

impl<R: Real> Wavepacket<R> {
    pub fn new(a: Complex<R>, b: Complex<R>, c: Complex<R>) -> Self {
        assert!(a.re < R::zero(), "wavepacket needs Re a < 0");
        Self { a, b, c }
    }

    /// Unit-norm packet centered at `center` with width `sigma` and momentum
    /// `momentum`: proportional to `exp(-(u - center)^2 / (2 sigma^2) + i momentum u)`.
    pub fn coherent(center: R, sigma: R, momentum: R) -> Self {
        assert!(sigma > R::zero(), "width must be positive");
        let half_inv_s2 = R::one() / (rf::<R>(2.0) * sigma * sigma);
        let a = Complex::new(-half_inv_s2, R::zero());
        let b = Complex::new(rf::<R>(2.0) * half_inv_s2 * center, momentum);
        let c = Complex::new(-half_inv_s2 * center * center, R::zero());
        let mut packet = Self::new(a, b, c);
        let norm = packet.norm();
        packet.c.re -= norm.ln();
        packet
    }

    pub fn eval(&self, u: R) -> Complex<R> {
        let cu = cr(u);
        (self.a * cu * cu + self.b * cu + self.c).exp()
    }

    pub fn sample(&self, grid: &Grid1D<R>) -> DVector<Complex<R>> {
        grid.sample(|u| self.eval(u))
    }

    /// `L^2` inner product `<self, other> = integral conj(self) * other`,
    /// conjugate-linear in the first slot.
    pub fn inner(&self, other: &Self) -> Complex<R> {
        let a = -(self.a.conj() + other.a);
        let b = self.b.conj() + other.b;
        let c = self.c.conj() + other.c;
        gauss_integral(a, b) * c.exp()
    }

    pub fn norm_sq(&self) -> R {
        self.inner(self).re
    }

    pub fn norm(&self) -> R {
        self.norm_sq().sqrt()
    }

    /// Pointwise multiplication by `exp(i (q u^2 + p u + r))`.
    pub fn modulate(&self, q: R, p: R, r: R) -> Self {
        let i = Complex::new(R::zero(), R::one());
        Self {
            a: self.a + i * cr(q),
            b: self.b + i * cr(p),
            c: self.c + i * cr(r),
        }
    }

    /// Translation `u -> u + s` (left shift of the graph).
    pub fn shift(&self, s: R) -> Self {
        let cs = cr(s);
        Self {
            a: self.a,
            b: self.b + self.a * cs * rf::<R>(2.0),
            c: self.c + self.a * cs * cs + self.b * cs,
        }
    }

    pub fn scale_amplitude(&self, z: Complex<R>) -> Self {
        Self {
            a: self.a,
            b: self.b,
            c: self.c + z.ln(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type C = Complex<f64>;

    #[test]
    fn coherent_state_has_unit_norm() {
        let w = Wavepacket::<f64>::coherent(1.5, 0.8, -2.0);
        assert_relative_eq!(w.norm_sq(), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn inner_product_matches_grid_quadrature() {
        let w1 = Wavepacket::<f64>::coherent(0.5, 1.0, 1.0);
        let w2 = Wavepacket::<f64>::coherent(-0.3, 1.3, -0.7);
        let grid = Grid1D::new(256, 12.0);
        let s1 = w1.sample(&grid);
        let s2 = w2.sample(&grid);
        let numeric = s1.dotc(&s2) * C::new(grid.spacing(), 0.0);
        let closed = w1.inner(&w2);
        assert_relative_eq!(closed.re, numeric.re, epsilon = 1e-12);
        assert_relative_eq!(closed.im, numeric.im, epsilon = 1e-12);
    }

    #[test]
    fn shift_moves_the_center() {
        let w = Wavepacket::<f64>::coherent(0.0, 1.0, 0.0);
        let shifted = w.shift(2.0);
        // (shifted)(u) = w(u + 2): peak at u = -2.
        assert_relative_eq!(shifted.eval(-2.0).norm(), w.eval(0.0).norm(), epsilon = 1e-13);
        assert!(shifted.eval(0.0).norm() < w.eval(0.0).norm());
    }

    #[test]
    fn modulation_preserves_norm() {
        let w = Wavepacket::<f64>::coherent(0.2, 0.9, 0.4);
        let m = w.modulate(0.7, -1.1, 0.3);
        assert_relative_eq!(m.norm_sq(), w.norm_sq(), epsilon = 1e-13);
        let u = 0.37;
        let expected = w.eval(u) * C::new(0.0, 0.7 * u * u - 1.1 * u + 0.3).exp();
        let got = m.eval(u);
        assert_relative_eq!(got.re, expected.re, epsilon = 1e-14);
        assert_relative_eq!(got.im, expected.im, epsilon = 1e-14);
    }
}
