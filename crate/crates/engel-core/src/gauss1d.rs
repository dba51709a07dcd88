//! Closed-form one-dimensional Gaussian integrals with complex parameters.
//!
//! Everything downstream (wavepackets, the four-dimensional Gaussian family,
//! operator kernels) reduces to the two primitives here:
//!
//! * `gauss_integral(a, b) = integral of exp(-a t^2 + b t) dt over the line`
//!   for `Re a > 0`, equal to `sqrt(pi / a) * exp(b^2 / (4a))`;
//! * its polynomial moments `integral of t^k exp(-a t^2 + b t) dt`, obtained
//!   by differentiating the first formula in `b`.

use nalgebra::ComplexField;
use num_complex::Complex;

use crate::scalar::{cr, rf, Real};

/// `integral exp(-a t^2 + b t) dt` with the principal square root.
///
/// Requires `Re a > 0` for convergence.
pub fn gauss_integral<R: Real>(a: Complex<R>, b: Complex<R>) -> Complex<R> {
    assert!(a.re > R::zero(), "Gaussian integral needs Re a > 0");
    (cr::<R>(R::pi()) / a).sqrt() * (b * b / (a * rf::<R>(4.0))).exp()
}

/// Moments `I_k = integral t^k exp(-a t^2 + b t) dt` for `k = 0..=k_max`.
///
/// Uses the recursion `2a I_k = (k - 1) I_{k-2} + b I_{k-1}` obtained from
/// integrating by parts, seeded with `I_0` from [`gauss_integral`].
pub fn gauss_moments<R: Real>(a: Complex<R>, b: Complex<R>, k_max: usize) -> Vec<Complex<R>> {
    let mut moments = Vec::with_capacity(k_max + 1);
    let i0 = gauss_integral(a, b);
    moments.push(i0);
    if k_max == 0 {
        return moments;
    }
    let inv_2a = cr::<R>(R::one()) / (a * rf::<R>(2.0));
    moments.push(b * i0 * inv_2a);
    for k in 2..=k_max {
        let prev = moments[k - 1];
        let prev2 = moments[k - 2];
        moments.push((prev2 * rf::<R>((k - 1) as f64) + b * prev) * inv_2a);
    }
    moments
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{gauss_legendre, panel_rule};
    use approx::assert_relative_eq;

    type C = Complex<f64>;

    fn brute(a: C, b: C, k: usize) -> C {
        // Wide high-order panel quadrature as an independent oracle.
        let rule = panel_rule(-14.0f64, 14.0, 28, 20);
        let mut acc = C::new(0.0, 0.0);
        for &(t, w) in &rule {
            let tk = t.powi(k as i32);
            acc += (C::new(-t * t, 0.0) * a + b * t).exp() * tk * w;
        }
        acc
    }

    #[test]
    fn real_gaussian_integral() {
        let v = gauss_integral(C::new(0.5, 0.0), C::new(0.0, 0.0));
        assert_relative_eq!(v.re, (2.0 * std::f64::consts::PI).sqrt(), epsilon = 1e-14);
        assert_relative_eq!(v.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn complex_parameters_match_quadrature() {
        let cases = [
            (C::new(0.7, 0.3), C::new(0.2, -1.1)),
            (C::new(1.4, -0.9), C::new(-0.5, 0.8)),
            (C::new(0.35, 0.0), C::new(0.0, 2.0)),
        ];
        for (a, b) in cases {
            let closed = gauss_integral(a, b);
            let numeric = brute(a, b, 0);
            assert_relative_eq!(closed.re, numeric.re, epsilon = 1e-11);
            assert_relative_eq!(closed.im, numeric.im, epsilon = 1e-11);
        }
    }

    #[test]
    fn moments_match_quadrature() {
        let a = C::new(0.8, 0.25);
        let b = C::new(0.4, -0.6);
        let moments = gauss_moments(a, b, 6);
        for (k, m) in moments.iter().enumerate() {
            let numeric = brute(a, b, k);
            assert_relative_eq!(m.re, numeric.re, epsilon = 1e-10, max_relative = 1e-10);
            assert_relative_eq!(m.im, numeric.im, epsilon = 1e-10, max_relative = 1e-10);
        }
    }

    #[test]
    fn gauss_legendre_handles_single_point() {
        let rule = gauss_legendre::<f64>(1);
        assert_relative_eq!(rule[0].0, 0.0, epsilon = 1e-15);
        assert_relative_eq!(rule[0].1, 2.0, epsilon = 1e-15);
    }
}
