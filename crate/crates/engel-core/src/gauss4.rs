//! Closed-form test functions on the group: polynomial prefactors times
//! separable complex Gaussians.
//!
//! ```text
//! f(x) = P(x) * exp( sum_i ( -alpha_i x_i^2 + beta_i x_i ) + logamp )
//! ```
//!
//! with `Re alpha_i > 0`.  The family is closed under products, conjugation,
//! application of polynomial-coefficient differential operators, coordinate
//! monomial multiplication, and per-coordinate Fourier transforms in the
//! symmetric normalization
//!
//! ```text
//! (F_i f)(xi) = (2 pi)^{-1/2} integral f e^{-i x_i xi} dx_i,
//! ```
//!
//! so every group Fourier integral used downstream evaluates without
//! numerical quadrature.

use nalgebra::ComplexField;
use num_complex::Complex;
use num_traits::Zero;

use crate::fields::PolyDiffOp;
use crate::gauss1d::gauss_moments;
use crate::poly::{Expo, Poly4};
use crate::scalar::{cf, cr, rf, Real, Scalar};

#[derive(Clone, Debug)]
pub struct GaussPoly4<R: Real> {
    /// Polynomial prefactor with complex coefficients.
    pub poly: Poly4<Complex<R>>,
    /// Per-coordinate quadratic exponent coefficients, `Re alpha_i > 0`.
    pub alpha: [Complex<R>; 4],
    /// Per-coordinate linear exponent coefficients.
    pub beta: [Complex<R>; 4],
    /// Overall complex log-amplitude.
    pub logamp: Complex<R>,
}

impl<R: Real> GaussPoly4<R> {
    /// Separable Gaussian `prod_i exp(-alpha_i (x_i - center_i)^2 + i momentum_i x_i)`.
    pub fn product_gaussian(alpha: [Complex<R>; 4], center: [R; 4], momentum: [R; 4]) -> Self {
        let mut beta = [Complex::zero(); 4];
        let mut logamp = Complex::zero();
        for i in 0..4 {
            assert!(alpha[i].re > R::zero(), "Gaussian width needs Re alpha > 0");
            let s = cr(center[i]);
            beta[i] = alpha[i] * s * rf::<R>(2.0) + cf::<R>(0.0, 1.0) * cr(momentum[i]);
            logamp -= alpha[i] * s * s;
        }
        Self {
            poly: Poly4::constant(Complex::new(R::one(), R::zero())),
            alpha,
            beta,
            logamp,
        }
    }

    /// The standard Gaussian `exp(-|x|^2 / 2)`.
    pub fn standard() -> Self {
        Self::product_gaussian([cf(0.5, 0.0); 4], [R::zero(); 4], [R::zero(); 4])
    }

    pub fn with_poly(mut self, poly: Poly4<Complex<R>>) -> Self {
        self.poly = poly;
        self
    }

    pub fn eval(&self, x: [R; 4]) -> Complex<R> {
        let cx = x.map(cr);
        let mut expo = self.logamp;
        for i in 0..4 {
            expo += -self.alpha[i] * cx[i] * cx[i] + self.beta[i] * cx[i];
        }
        self.poly.eval(&cx) * expo.exp()
    }

    /// Pointwise product; exponents add, prefactors multiply.
    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            poly: &self.poly * &rhs.poly,
            alpha: std::array::from_fn(|i| self.alpha[i] + rhs.alpha[i]),
            beta: std::array::from_fn(|i| self.beta[i] + rhs.beta[i]),
            logamp: self.logamp + rhs.logamp,
        }
    }

    /// Complex conjugate as a function of real arguments.
    pub fn conj(&self) -> Self {
        Self {
            poly: self.poly.map_coeffs(|c| c.conj()),
            alpha: self.alpha.map(|a| a.conj()),
            beta: self.beta.map(|b| b.conj()),
            logamp: self.logamp.conj(),
        }
    }

    pub fn scale(&self, c: Complex<R>) -> Self {
        Self {
            poly: self.poly.scale(&c),
            ..self.clone()
        }
    }

    /// Multiplication by the coordinate monomial `x^expo`.
    pub fn mul_monomial(&self, expo: Expo) -> Self {
        Self {
            poly: &self.poly * &Poly4::monomial(expo, Complex::new(R::one(), R::zero())),
            ..self.clone()
        }
    }

    /// Single partial derivative `d/dx_i`, staying in the family:
    /// `d_i (P e^E) = (d_i P + P (-2 alpha_i x_i + beta_i)) e^E`.
    pub fn partial(&self, i: usize) -> Self {
        let mut linear = Poly4::monomial(
            {
                let mut e = [0u16; 4];
                e[i] = 1;
                e
            },
            -self.alpha[i] * rf::<R>(2.0),
        );
        linear.add_term([0; 4], self.beta[i]);
        Self {
            poly: self.poly.partial_derivative(i) + &self.poly * &linear,
            ..self.clone()
        }
    }

    /// Applies a polynomial-coefficient differential operator.
    pub fn apply_diffop<T: Scalar>(
        &self,
        op: &PolyDiffOp<T>,
        embed: impl Fn(&T) -> Complex<R> + Copy,
    ) -> Self {
        let mut acc: Option<Self> = None;
        for (d, coeff) in op.terms() {
            let mut derived = self.clone();
            for (i, &k) in d.iter().enumerate() {
                for _ in 0..k {
                    derived = derived.partial(i);
                }
            }
            derived.poly = &derived.poly * &coeff.map_coeffs(embed);
            acc = Some(match acc {
                None => derived,
                Some(total) => total.add_same_exponent(&derived),
            });
        }
        acc.unwrap_or_else(|| self.scale(Complex::zero()))
    }

    /// Adds two members sharing the same exponent data (as produced by
    /// repeated differentiation of one function).
    fn add_same_exponent(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.alpha, rhs.alpha);
        debug_assert_eq!(self.beta, rhs.beta);
        debug_assert_eq!(self.logamp, rhs.logamp);
        Self {
            poly: self.poly.clone() + rhs.poly.clone(),
            ..self.clone()
        }
    }

    /// Integral over the whole space, via per-coordinate Gaussian moments.
    pub fn integral(&self) -> Complex<R> {
        let mut degree = [0usize; 4];
        for (e, _) in self.poly.terms() {
            for i in 0..4 {
                degree[i] = degree[i].max(e[i] as usize);
            }
        }
        let moments: [Vec<Complex<R>>; 4] =
            std::array::from_fn(|i| gauss_moments(self.alpha[i], self.beta[i], degree[i]));
        let mut acc = Complex::<R>::zero();
        for (e, c) in self.poly.terms() {
            let mut term = *c;
            for i in 0..4 {
                term *= moments[i][e[i] as usize];
            }
            acc += term;
        }
        acc * self.logamp.exp()
    }

    /// Squared `L^2` norm, in closed form.
    pub fn l2_norm_sq(&self) -> R {
        self.mul(&self.conj()).integral().re
    }

    /// Symmetric Fourier transform in the listed coordinates (zero-based).
    ///
    /// The transformed coordinate is reused for its dual variable.
    pub fn ft(&self, coords: &[usize]) -> Self {
        let mut out = self.clone();
        for &i in coords {
            out = out.ft_one(i);
        }
        out
    }

    fn ft_one(&self, i: usize) -> Self {
        let alpha = self.alpha[i];
        let beta = self.beta[i];
        assert!(alpha.re > R::zero(), "Fourier transform needs Re alpha > 0");
        let two = rf::<R>(2.0);
        let four = rf::<R>(4.0);
        let minus_i = cf::<R>(0.0, -1.0);

        // Highest power of x_i appearing in the prefactor.
        let k_max = self
            .poly
            .terms()
            .map(|(e, _)| e[i] as usize)
            .max()
            .unwrap_or(0);

        // Moment polynomials P_k(b) with I_k = P_k(b) I_0 for the integral
        // I_k = integral t^k exp(-alpha t^2 + b t) dt, via P_k = P_{k-1}' +
        // b P_{k-1} / (2 alpha).  Stored as coefficient vectors in b.
        let inv_2a = cr::<R>(R::one()) / (alpha * two);
        let mut pk: Vec<Vec<Complex<R>>> = vec![vec![Complex::new(R::one(), R::zero())]];
        for k in 1..=k_max {
            let prev = &pk[k - 1];
            let mut next = vec![Complex::zero(); prev.len() + 1];
            for (j, &pj) in prev.iter().enumerate() {
                if j >= 1 {
                    next[j - 1] += pj * rf::<R>(j as f64);
                }
                next[j + 1] += pj * inv_2a;
            }
            pk.push(next);
        }

        // Substitute b = beta - i xi and expand in powers of xi.
        // xi_poly[k][m] = coefficient of xi^m in P_k(beta - i xi).
        let xi_poly: Vec<Vec<Complex<R>>> = pk
            .iter()
            .map(|coeffs| {
                let deg = coeffs.len() - 1;
                let mut out = vec![Complex::zero(); deg + 1];
                for (j, &pj) in coeffs.iter().enumerate() {
                    // (beta - i xi)^j = sum_m C(j, m) beta^{j-m} (-i)^m xi^m
                    for m in 0..=j {
                        let mut term = pj * cr::<R>(rf(binom(j, m) as f64));
                        term *= minus_i.powu(m as u32);
                        term *= beta.powu((j - m) as u32);
                        out[m] += term;
                    }
                }
                out
            })
            .collect();

        let mut poly = Poly4::new();
        for (e, c) in self.poly.terms() {
            let k = e[i] as usize;
            for (m, &coef) in xi_poly[k].iter().enumerate() {
                if coef.is_zero() {
                    continue;
                }
                let mut en = *e;
                en[i] = m as u16;
                poly.add_term(en, *c * coef);
            }
        }

        let mut alpha_new = self.alpha;
        let mut beta_new = self.beta;
        alpha_new[i] = cr::<R>(R::one()) / (alpha * four);
        beta_new[i] = minus_i * beta / (alpha * two);
        // (2 pi)^{-1/2} I_0 = (2 alpha)^{-1/2} exp(beta^2 / (4 alpha)),
        // with the Gaussian part of the exponential absorbed into alpha/beta.
        let logamp = self.logamp - (alpha * two).ln() * cr(rf::<R>(0.5)) + beta * beta / (alpha * four);

        Self {
            poly,
            alpha: alpha_new,
            beta: beta_new,
            logamp,
        }
    }
}

fn binom(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc = 1u64;
    for j in 0..k {
        acc = acc * (n - j) as u64 / (j + 1) as u64;
    }
    acc
}
