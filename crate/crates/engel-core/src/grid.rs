//! Uniform periodic grid on `[-L, L)` with dense spectral matrices.
//!
//! All discretized operators share one grid; derivative and translation
//! matrices come from the trigonometric interpolant, so they are spectrally
//! accurate on functions that decay well inside the window.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::scalar::{cr, rf, Real};

/// Uniform grid with `n` points `u_j = -l + j h`, `h = 2 l / n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid1D<R: Real> {
    n: usize,
    l: R,
}

impl<R: Real> Grid1D<R> {
    pub fn new(n: usize, l: R) -> Self {
        assert!(n >= 2 && n % 2 == 0, "grid size must be even and at least 2");
        assert!(l > R::zero(), "grid half-width must be positive");
        Self { n, l }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Half-width `L` of the window `[-L, L)`.
    pub fn half_width(&self) -> R {
        self.l
    }

    /// Mesh spacing `h = 2L / n`.
    pub fn spacing(&self) -> R {
        rf::<R>(2.0) * self.l / rf(self.n as f64)
    }

    pub fn point(&self, j: usize) -> R {
        -self.l + self.spacing() * rf(j as f64)
    }

    pub fn points(&self) -> Vec<R> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Signed spectral frequency of mode `m`: `kappa_m = (pi / L) * m~` with
    /// `m~` in `-n/2 ..= n/2 - 1`.
    pub fn frequency(&self, m: usize) -> R {
        let signed = if m < self.n / 2 {
            m as f64
        } else {
            m as f64 - self.n as f64
        };
        R::pi() / self.l * rf(signed)
    }

    /// Largest resolvable frequency `pi / h` (the Nyquist mode).
    pub fn nyquist(&self) -> R {
        R::pi() / self.spacing()
    }

    /// Samples a function on the grid.
    pub fn sample(&self, f: impl Fn(R) -> Complex<R>) -> DVector<Complex<R>> {
        DVector::from_fn(self.n, |j, _| f(self.point(j)))
    }

    /// Fourier multiplier as a dense matrix: synthesis, diagonal action on
    /// modes, analysis.  `g` receives the mode index and its frequency.
    pub fn multiplier_by_mode(
        &self,
        g: impl Fn(usize, R) -> Complex<R>,
    ) -> DMatrix<Complex<R>> {
        let n = self.n;
        let inv_n = cr::<R>(R::one() / rf(n as f64));
        // synthesis[j, m] = exp(i kappa_m u_j)
        let synthesis = DMatrix::<Complex<R>>::from_fn(n, n, |j, m| {
            phase(self.frequency(m) * self.point(j))
        });
        let mut scaled = synthesis.clone();
        for m in 0..n {
            let gm = g(m, self.frequency(m)) * inv_n;
            for j in 0..n {
                scaled[(j, m)] *= gm;
            }
        }
        scaled * synthesis.adjoint()
    }

    /// Fourier multiplier depending only on the frequency.
    pub fn multiplier(&self, g: impl Fn(R) -> Complex<R>) -> DMatrix<Complex<R>> {
        self.multiplier_by_mode(|_, k| g(k))
    }

    /// Spectral differentiation matrix for `d^order / du^order`.
    ///
    /// The unmatched Nyquist mode is zeroed for odd orders, the standard
    /// choice that keeps odd-order derivatives of real samples real.
    pub fn derivative_matrix(&self, order: u32) -> DMatrix<Complex<R>> {
        let nyq = self.n / 2;
        self.multiplier_by_mode(|m, k| {
            if order % 2 == 1 && m == nyq {
                Complex::new(R::zero(), R::zero())
            } else {
                (Complex::new(R::zero(), R::one()) * cr(k)).powu(order)
            }
        })
    }

    /// Band-limited translation: `(S f)(u) = f(u + s)` on the interpolant.
    pub fn shift_matrix(&self, s: R) -> DMatrix<Complex<R>> {
        self.multiplier(|k| phase(k * s))
    }
}

/// `exp(i theta)` as a complex number.
#[inline]
pub fn phase<R: Real>(theta: R) -> Complex<R> {
    Complex::new(theta.cos(), theta.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type C = Complex<f64>;

    fn gaussian_samples(grid: &Grid1D<f64>) -> DVector<C> {
        grid.sample(|u| C::new((-0.5 * u * u).exp(), 0.0))
    }

    #[test]
    fn grid_geometry() {
        let grid = Grid1D::new(8, 4.0);
        assert_eq!(grid.spacing(), 1.0);
        assert_eq!(grid.point(0), -4.0);
        assert_eq!(grid.point(7), 3.0);
        assert_relative_eq!(grid.nyquist(), std::f64::consts::PI, epsilon = 1e-15);
        assert_eq!(grid.frequency(0), 0.0);
        assert_relative_eq!(grid.frequency(1), std::f64::consts::PI / 4.0, epsilon = 1e-15);
        assert_relative_eq!(grid.frequency(7), -std::f64::consts::PI / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn derivative_is_spectrally_accurate_on_gaussians() {
        let grid = Grid1D::new(128, 10.0);
        let d1 = grid.derivative_matrix(1);
        let f = gaussian_samples(&grid);
        let df = &d1 * &f;
        for (j, u) in grid.points().into_iter().enumerate() {
            let exact = -u * (-0.5 * u * u).exp();
            assert_relative_eq!(df[j].re, exact, epsilon = 1e-10);
            assert!(df[j].im.abs() < 1e-12);
        }
    }

    #[test]
    fn second_derivative_matches_square_of_first_on_band_limited_data() {
        let grid = Grid1D::new(64, 8.0);
        let d2 = grid.derivative_matrix(2);
        let f = gaussian_samples(&grid);
        let d2f = &d2 * &f;
        for (j, u) in grid.points().into_iter().enumerate() {
            let exact = (u * u - 1.0) * (-0.5 * u * u).exp();
            assert_relative_eq!(d2f[j].re, exact, epsilon = 1e-9);
        }
    }

    #[test]
    fn shift_matrix_translates_gaussians() {
        let grid = Grid1D::new(128, 10.0);
        let s = 0.7;
        let shift = grid.shift_matrix(s);
        let f = gaussian_samples(&grid);
        let sf = &shift * &f;
        for (j, u) in grid.points().into_iter().enumerate() {
            let exact = (-0.5 * (u + s) * (u + s)).exp();
            assert_relative_eq!(sf[j].re, exact, epsilon = 1e-11);
            assert!(sf[j].im.abs() < 1e-11);
        }
    }

    #[test]
    fn integer_shift_is_an_exact_permutation() {
        let grid = Grid1D::<f64>::new(16, 8.0);
        let shift = grid.shift_matrix(grid.spacing());
        for j in 0..16 {
            for k in 0..16 {
                let expected = if (j + 1) % 16 == k { 1.0 } else { 0.0 };
                assert_relative_eq!(shift[(j, k)].re, expected, epsilon = 1e-12);
                assert!(shift[(j, k)].im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_order_multiplier_is_identity() {
        let grid = Grid1D::new(32, 5.0);
        let ident = grid.multiplier(|_| C::new(1.0, 0.0));
        for j in 0..32 {
            for k in 0..32 {
                let expected = if j == k { 1.0 } else { 0.0 };
                assert_relative_eq!(ident[(j, k)].re, expected, epsilon = 1e-12);
            }
        }
    }
}
