//! Gaussians with a full (non-separable) quadratic form,
//! `exp(-y^T A y + b . y + c)` with `Re A` positive definite.
//!
//! Left translation of a separable Gaussian by a group element stays exactly
//! in this class, because the group product is affine in its right factor.
//! Integrals and Fourier evaluations are computed pointwise by sequential
//! completion of the square (one coordinate at a time), which keeps every
//! square-root branch principal: each elimination step divides by a diagonal
//! entry with positive real part.

use nalgebra::ComplexField;
use num_complex::Complex;
use num_traits::Zero;

use crate::gauss4::GaussPoly4;
use crate::group::{jacobian_left_translation, GroupElement};
use crate::scalar::{cr, rf, Real};

#[derive(Clone, Debug)]
pub struct QuadGauss4<R: Real> {
    /// Symmetric quadratic form coefficient (exponent carries `-y^T A y`).
    pub a: [[Complex<R>; 4]; 4],
    /// Linear exponent coefficients.
    pub b: [Complex<R>; 4],
    /// Constant exponent term.
    pub c: Complex<R>,
}

impl<R: Real> QuadGauss4<R> {
    /// Embeds a separable Gaussian with trivial prefactor.
    ///
    /// Panics if the prefactor polynomial is not constant.
    pub fn from_separable(f: &GaussPoly4<R>) -> Self {
        let mut scale = Complex::new(R::one(), R::zero());
        for (e, coeff) in f.poly.terms() {
            assert_eq!(e, &[0, 0, 0, 0], "prefactor must be constant");
            scale = *coeff;
        }
        let mut a = [[Complex::zero(); 4]; 4];
        for i in 0..4 {
            a[i][i] = f.alpha[i];
        }
        Self {
            a,
            b: f.beta,
            c: f.logamp + scale.ln(),
        }
    }

    pub fn eval(&self, y: [R; 4]) -> Complex<R> {
        let cy = y.map(cr);
        let mut expo = self.c;
        for i in 0..4 {
            expo += self.b[i] * cy[i];
            for j in 0..4 {
                expo -= self.a[i][j] * cy[i] * cy[j];
            }
        }
        expo.exp()
    }

    /// The left translate `y -> f(x o y)`.
    ///
    /// The product `x o y` equals `x + M y` with `M` the left-translation
    /// Jacobian at the identity (the group law is affine in `y`), so the
    /// composition stays a quadratic-form Gaussian.
    pub fn left_translate(&self, x: &GroupElement<R>) -> Self {
        let m = jacobian_left_translation(x);
        let xc = x.coords.map(cr);
        let mc: [[Complex<R>; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| cr(m[i][j])));
        // A' = M^T A M
        let mut a_new = [[Complex::zero(); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = Complex::zero();
                for p in 0..4 {
                    for q in 0..4 {
                        acc += mc[p][i] * self.a[p][q] * mc[q][j];
                    }
                }
                a_new[i][j] = acc;
            }
        }
        // b' = M^T (b - 2 A x), c' = c + b . x - x^T A x
        let mut ax = [Complex::zero(); 4];
        for i in 0..4 {
            for j in 0..4 {
                ax[i] += self.a[i][j] * xc[j];
            }
        }
        let mut b_new = [Complex::zero(); 4];
        for i in 0..4 {
            for p in 0..4 {
                b_new[i] += mc[p][i] * (self.b[p] - ax[p] * rf::<R>(2.0));
            }
        }
        let mut c_new = self.c;
        for i in 0..4 {
            c_new += self.b[i] * xc[i] - ax[i] * xc[i];
        }
        Self {
            a: a_new,
            b: b_new,
            c: c_new,
        }
    }

    /// Integral over the whole space by sequential completion of the square.
    pub fn integral(&self) -> Complex<R> {
        gauss_reduce(&mut to_vecs(self))
    }

    /// Pointwise full Fourier transform
    /// `(2 pi)^{-2} integral f(y) exp(-i y . zeta) dy`.
    pub fn ft4(&self, zeta: [R; 4]) -> Complex<R> {
        let mut state = to_vecs(self);
        for i in 0..4 {
            state.b[i] -= Complex::new(R::zero(), zeta[i]);
        }
        gauss_reduce(&mut state) * cr(rf::<R>((2.0 * std::f64::consts::PI).powi(-2)))
    }

    /// Partial Fourier transform in coordinates 2, 3, 4, evaluated at first
    /// coordinate `t` and dual variables `w`:
    /// `(2 pi)^{-3/2} integral f(t, y2, y3, y4) exp(-i (y2 w1 + y3 w2 + y4 w3)) dy`.
    pub fn ft_234(&self, t: R, w: [R; 3]) -> Complex<R> {
        let ct = cr(t);
        // Substitute y1 = t, leaving a 3-variable quadratic form.
        let mut a = Vec::with_capacity(3);
        for i in 1..4 {
            let mut row = Vec::with_capacity(3);
            for j in 1..4 {
                row.push(self.a[i][j]);
            }
            a.push(row);
        }
        let mut b = Vec::with_capacity(3);
        for i in 1..4 {
            b.push(
                self.b[i] - (self.a[i][0] + self.a[0][i]) * ct
                    - Complex::new(R::zero(), w[i - 1]),
            );
        }
        let c = self.c + self.b[0] * ct - self.a[0][0] * ct * ct;
        let mut state = GaussState { a, b, c };
        gauss_reduce(&mut state) * cr(rf::<R>((2.0 * std::f64::consts::PI).powf(-1.5)))
    }

    /// Exponent of [`Self::ft_234`] as a function of a shift `s` subtracted
    /// from the first dual variable:
    ///
    /// ```text
    /// ft_234(t, [w0 - s, w1, w2]) = exp(q[0] + q[1] s + q[2] s^2).
    /// ```
    ///
    /// The elimination steps update the linear coefficients linearly in `s`
    /// and the constant by their squares, so the exponent is exactly
    /// quadratic in the shift; this turns one-parameter families of kernel
    /// evaluations (the quasi-central frequency sweep) into closed-form
    /// Gaussian integrals.
    pub fn ft_234_shift_exponent(&self, t: R, w: [R; 3]) -> [Complex<R>; 3] {
        let ct = cr(t);
        let mut a = Vec::with_capacity(3);
        for i in 1..4 {
            let mut row = Vec::with_capacity(3);
            for j in 1..4 {
                row.push(self.a[i][j]);
            }
            a.push(row);
        }
        // Linear coefficients as pairs (constant part, s-coefficient); the
        // shifted dual contributes -i (w0 - s) = -i w0 + i s to the first.
        let mut b: Vec<[Complex<R>; 2]> = Vec::with_capacity(3);
        for i in 1..4 {
            let constant = self.b[i] - (self.a[i][0] + self.a[0][i]) * ct
                - Complex::new(R::zero(), w[i - 1]);
            let slope = if i == 1 {
                Complex::new(R::zero(), R::one())
            } else {
                Complex::zero()
            };
            b.push([constant, slope]);
        }
        let mut q = [
            self.c + self.b[0] * ct - self.a[0][0] * ct * ct,
            Complex::zero(),
            Complex::zero(),
        ];
        let mut amplitude = Complex::new(R::one(), R::zero());
        while let Some(b_k) = b.pop() {
            let k = b.len();
            let row = a.pop().expect("matrix and vector in step");
            let a_kk = row[k];
            assert!(
                a_kk.re > R::zero(),
                "sequential Gaussian elimination needs Re pivot > 0"
            );
            amplitude *= (cr::<R>(R::pi()) / a_kk).sqrt();
            let quarter = Complex::new(R::one(), R::zero()) / (a_kk * rf::<R>(4.0));
            q[0] += b_k[0] * b_k[0] * quarter;
            q[1] += b_k[0] * b_k[1] * quarter * rf::<R>(2.0);
            q[2] += b_k[1] * b_k[1] * quarter;
            for i in 0..k {
                let factor = row[i] / a_kk;
                b[i][0] -= b_k[0] * factor;
                b[i][1] -= b_k[1] * factor;
                for j in 0..k {
                    a[i][j] -= row[i] * row[j] / a_kk;
                }
                a[i].truncate(k);
            }
        }
        q[0] += amplitude.ln() + cr(rf::<R>(-1.5 * (2.0 * std::f64::consts::PI).ln()));
        q
    }
}

struct GaussState<R: Real> {
    a: Vec<Vec<Complex<R>>>,
    b: Vec<Complex<R>>,
    c: Complex<R>,
}

fn to_vecs<R: Real>(q: &QuadGauss4<R>) -> GaussState<R> {
    GaussState {
        a: q.a.iter().map(|row| row.to_vec()).collect(),
        b: q.b.to_vec(),
        c: q.c,
    }
}

/// Integrates out all variables, last index first.
///
/// Each step integrates `exp(-a_kk y_k^2 + L y_k)` in closed form with
/// `L = b_k - 2 sum_i a_ik y_i`; expanding `L^2 / (4 a_kk)` updates the
/// constant, the linear part, and the smaller quadratic form (a Schur
/// complement).  Convergence requires `Re a_kk > 0` at every step, which
/// holds whenever the real part of the full form is positive definite, and
/// keeps every square root principal.
fn gauss_reduce<R: Real>(state: &mut GaussState<R>) -> Complex<R> {
    let mut amplitude = Complex::new(R::one(), R::zero());
    while let Some(b_k) = state.b.pop() {
        let k = state.b.len();
        let row = state.a.pop().expect("matrix and vector in step");
        let a_kk = row[k];
        assert!(
            a_kk.re > R::zero(),
            "sequential Gaussian elimination needs Re pivot > 0"
        );
        amplitude *= (cr::<R>(R::pi()) / a_kk).sqrt();
        state.c += b_k * b_k / (a_kk * rf::<R>(4.0));
        // Cross coefficients a_ik for i < k; the form is symmetric, so row k
        // already holds them.
        for i in 0..k {
            state.b[i] -= b_k * row[i] / a_kk;
            for j in 0..k {
                state.a[i][j] -= row[i] * row[j] / a_kk;
            }
            state.a[i].truncate(k);
        }
    }
    amplitude * state.c.exp()
}
