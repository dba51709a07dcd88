//! Weyl quantization on the real line and the lambda-symbol
//! renormalization used for the Heisenberg-side comparison.
//!
//! A lambda-symbol is a function `a(xi, u)` attached to one nonzero value of
//! the frequency parameter.  For `lambda > 0` it admits the renormalized
//! form `a~` with
//!
//! ```text
//! a(xi, u) = a~(sqrt|lambda| xi, sqrt(lambda) u),
//! ```
//!
//! a bijective rescaling of the phase-space variables.  For `lambda < 0` the
//! second factor is imaginary and the rescaling is not defined on real
//! phase space; that half-line is reported as flagged rather than given an
//! invented meaning.
//!
//! The Weyl quantization used for comparisons is the midpoint rule
//!
//! ```text
//! Op^W(a) f(u) = (2 pi)^{-1} int int a(xi, (u+v)/2) e^{i(u-v)xi} f(v) dv dxi,
//! ```
//!
//! realized on a grid through its own frequency ladder.  The audited
//! properties are the ones the comparison rests on: self-adjointness for
//! real symbols, the harmonic-oscillator spectrum `1, 3, 5, ...` for
//! `a = xi^2 + u^2`, and the dilation covariance
//! `Op^W(a(s xi, u/s)) = U_s^{-1} Op^W(a) U_s` with `U_s f(u) = sqrt(s) f(su)`.

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{phase, Grid1D};
use crate::operator::GridOperator;
use crate::scalar::{cr, rf, Real};
use crate::wavepacket::Wavepacket;

/// A phase-space symbol attached to one nonzero frequency parameter.
pub struct LambdaSymbol<R: Real> {
    lambda: R,
    symbol: Box<dyn Fn(R, R) -> Complex<R> + Sync>,
}

impl<R: Real> LambdaSymbol<R> {
    pub fn new(lambda: R, symbol: impl Fn(R, R) -> Complex<R> + Sync + 'static) -> Result<Self> {
        if lambda == R::zero() {
            return Err(Error::LambdaZero);
        }
        Ok(Self {
            lambda,
            symbol: Box::new(symbol),
        })
    }

    pub fn lambda(&self) -> R {
        self.lambda
    }

    pub fn eval(&self, xi: R, u: R) -> Complex<R> {
        (self.symbol)(xi, u)
    }

    /// The renormalized form `a~(p, q) = a(p / sqrt|lambda|, q / sqrt(lambda))`.
    ///
    /// Defined for `lambda > 0` only; the negative half-line is flagged
    /// because the rescaling of the second variable leaves real phase space.
    pub fn renormalize(&self) -> Result<impl Fn(R, R) -> Complex<R> + Sync + '_> {
        if self.lambda <= R::zero() {
            return Err(Error::InvalidConfig(
                "renormalization is defined for lambda > 0; negative lambda is flagged".into(),
            ));
        }
        let s1 = self.lambda.abs().sqrt();
        let s2 = self.lambda.sqrt();
        Ok(move |p: R, q: R| (self.symbol)(p / s1, q / s2))
    }

    /// Inverse direction: rebuilds the symbol from its renormalized form by
    /// the forward substitution `a(xi, u) = a~(sqrt|lambda| xi, sqrt(lambda) u)`.
    pub fn from_renormalized(
        lambda: R,
        tilde: impl Fn(R, R) -> Complex<R> + Sync + 'static,
    ) -> Result<Self> {
        if lambda <= R::zero() {
            return Err(Error::InvalidConfig(
                "renormalization is defined for lambda > 0; negative lambda is flagged".into(),
            ));
        }
        let s1 = lambda.abs().sqrt();
        let s2 = lambda.sqrt();
        Self::new(lambda, move |xi: R, u: R| tilde(s1 * xi, s2 * u))
    }
}

/// Weyl (midpoint) quantization of a phase-space symbol on the grid's
/// frequency ladder.
pub fn weyl_quantize<R: Real>(
    a: &(dyn Fn(R, R) -> Complex<R> + Sync),
    grid: &Grid1D<R>,
) -> GridOperator<R> {
    let n = grid.len();
    let points = grid.points();
    let freqs: Vec<R> = (0..n).map(|m| grid.frequency(m)).collect();
    let dkappa = rf::<R>(std::f64::consts::PI) / grid.half_width();
    let scale = cr(grid.spacing() * dkappa / rf::<R>(std::f64::consts::TAU));
    let rows: Vec<Vec<Complex<R>>> = (0..n)
        .into_par_iter()
        .map(|j| {
            (0..n)
                .map(|k| {
                    let mid = (points[j] + points[k]) * rf::<R>(0.5);
                    let diff = points[j] - points[k];
                    let mut acc = Complex::<R>::zero();
                    for &kappa in &freqs {
                        acc += a(kappa, mid) * phase(diff * kappa);
                    }
                    acc * scale
                })
                .collect()
        })
        .collect();
    let mat = nalgebra::DMatrix::from_fn(n, n, |j, k| rows[j][k]);
    GridOperator::from_matrix(grid.clone(), mat)
}

/// Property audit of the Weyl quantization on one symbol.
#[derive(Clone, Debug)]
pub struct WeylReport<R: Real> {
    /// Relative Hermitian defect of `Op^W(Re a)`.
    pub self_adjoint_gap: R,
    /// Weak-form residuals of the dilation covariance, one `(s, residual)`
    /// row per tested scale.
    pub covariance: Vec<(R, R)>,
}

fn packet_inner<R: Real>(
    grid: &Grid1D<R>,
    g: &nalgebra::DVector<Complex<R>>,
    v: &nalgebra::DVector<Complex<R>>,
) -> Complex<R> {
    let mut acc = Complex::<R>::zero();
    for i in 0..g.len() {
        acc += g[i].conj() * v[i];
    }
    acc * cr(grid.spacing())
}

/// Verifies self-adjointness of `Op^W(Re a)` and the dilation covariance
/// `Op^W(a(s xi, u/s)) = U_s^{-1} Op^W(a) U_s` in weak form against
/// localized packets, for `s` in `{1/2, 1, 2}`.  The dilated packets are
/// sampled analytically, so no grid interpolation enters.
pub fn weyl_roundtrip_check<R: Real>(
    a: &(dyn Fn(R, R) -> Complex<R> + Sync),
    grid: &Grid1D<R>,
) -> Result<WeylReport<R>> {
    let real_part = |xi: R, u: R| cr(a(xi, u).re);
    let op_real = weyl_quantize(&real_part, grid);
    let defect = op_real
        .sub(&GridOperator::from_matrix(
            grid.clone(),
            op_real.matrix().adjoint(),
        ))?
        .hs_norm();
    let self_adjoint_gap = defect / op_real.hs_norm().max(R::default_epsilon());

    let op = weyl_quantize(a, grid);
    let packets = [
        Wavepacket::coherent(rf::<R>(0.4), rf::<R>(0.7), rf::<R>(0.6)),
        Wavepacket::coherent(rf::<R>(-0.3), rf::<R>(0.8), rf::<R>(-0.4)),
    ];
    let mut covariance = Vec::new();
    for s in [rf::<R>(0.5), rf::<R>(1.0), rf::<R>(2.0)] {
        let scaled = |xi: R, u: R| a(s * xi, u / s);
        let op_scaled = weyl_quantize(&scaled, grid);
        let mut residual = R::zero();
        for f in &packets {
            for g in &packets {
                let fs = f.sample(grid);
                let gs = g.sample(grid);
                let dilate = |p: &Wavepacket<R>| {
                    grid.sample(|u| cr(s.sqrt()) * p.eval(s * u))
                };
                let fd = dilate(f);
                let gd = dilate(g);
                let lhs = packet_inner(grid, &gs, &op_scaled.apply(&fs));
                let rhs = packet_inner(grid, &gd, &op.apply(&fd));
                let scale = (lhs.norm_sqr().sqrt() + rhs.norm_sqr().sqrt()).max(rf::<R>(1e-30));
                residual = residual.max((lhs - rhs).norm_sqr().sqrt() / scale);
            }
        }
        covariance.push((s, residual));
    }
    Ok(WeylReport {
        self_adjoint_gap,
        covariance,
    })
}
