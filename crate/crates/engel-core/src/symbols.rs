//! Symbol classes and quantization.
//!
//! A symbol is an operator family `sigma(x, lambda, mu)` indexed by a base
//! point and the representation parameters.  This module provides the three
//! ingredients of the calculus built on top of the group Fourier transform:
//!
//! * difference operators `Delta'^alpha` acting on kernel symbols (exact,
//!   via monomial multiplication of the kernel) together with left-invariant
//!   base derivatives `X^beta` (finite differences with Richardson
//!   extrapolation, composed with the polynomial field coefficients);
//!
//! * the seminorm
//!
//!   ```text
//!   sup || pi(I - L)^{(rho [alpha] - m - delta [beta] + gamma)/2}
//!          X^beta Delta'^alpha sigma(x, lambda, mu)
//!        pi(I - L)^{-gamma/2} ||_op,
//!   ```
//!
//!   where `[alpha] = a1 + a2 + 2 a3 + 3 a4` is the homogeneous degree and
//!   the supremum ranges over `[alpha] <= a`, `[beta] <= b`, `0 <= gamma <= c`
//!   and the configured sample points.  Finite sampling makes every reported
//!   value a lower bound for the true supremum;
//!
//! * the quantization pairing
//!
//!   ```text
//!   Op(sigma) phi (x) = c  integral integral
//!       Tr( pi_{lambda,mu}(x) sigma(x, lambda, mu) pi_{lambda,mu}(phi) )
//!       dmu dlambda,
//!   ```
//!
//!   with `c` the inversion constant calibrated against the measured
//!   Plancherel ratio.  The trace is computed without any grid: both factors
//!   are integral operators with closed-form kernels, the `mu`-direction
//!   enters every kernel slot as one common shift (after `t = mu / (2
//!   lambda)` the slot-2 arguments are `lambda v^2/2 - t`), so the
//!   `mu`-integral of each kernel-entry pair is a Gaussian-times-polynomial
//!   integral evaluated exactly.  Only the model variables `u, v` and the
//!   frequency `lambda` are discretized, with windows and step sizes read
//!   off the transformed Gaussian data, so the trace stays accurate
//!   uniformly down to `lambda -> 0` where the kernels spread like
//!   `1/|lambda|`.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::deltaops::richardson;
use crate::error::{Error, Result};
use crate::fields::left_invariant_generators;
use crate::gauss4::GaussPoly4;
use crate::gft::{plancherel_constant, GroupFourier};
use crate::grid::Grid1D;
use crate::group::GroupElement;
use crate::operator::GridOperator;
use crate::quad::panel_rule;
use crate::quadgauss::QuadGauss4;
use crate::rep::RepParams;
use crate::scalar::{cf, cr, rf, Real};

/// Multi-index with the anisotropic weights `(1, 1, 2, 3)` of the dilations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub [u16; 4]);

impl MultiIndex {
    pub const ZERO: Self = MultiIndex([0; 4]);

    /// Homogeneous degree `[alpha] = a1 + a2 + 2 a3 + 3 a4`.
    pub fn homogeneous_degree(&self) -> u16 {
        self.0[0] + self.0[1] + 2 * self.0[2] + 3 * self.0[3]
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0; 4]
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}.{}.{}.{}",
            self.0[0], self.0[1], self.0[2], self.0[3]
        )
    }
}

/// All multi-indices of homogeneous degree at most `cap`, ordered by degree
/// and then lexicographically.
pub fn indices_up_to(cap: u16) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for a1 in 0..=cap {
        for a2 in 0..=cap.saturating_sub(a1) {
            for a3 in 0..=(cap.saturating_sub(a1 + a2)) / 2 {
                for a4 in 0..=(cap.saturating_sub(a1 + a2 + 2 * a3)) / 3 {
                    out.push(MultiIndex([a1, a2, a3, a4]));
                }
            }
        }
    }
    out.sort_by_key(|m| (m.homogeneous_degree(), m.0));
    out
}

/// Operator family `sigma(x, lambda, mu)` in one of the realizations the
/// calculus can work with.
pub enum SymbolField<R: Real> {
    /// The symbol of the identity operator (transform of the unit mass at
    /// the group identity).
    Identity,
    /// Kernel realization: `x` maps to the convolution kernel whose group
    /// Fourier transform is the symbol at `x`.  This is the realization on
    /// which difference operators act exactly.
    Kernel(Box<dyn Fn(&GroupElement<R>) -> GaussPoly4<R> + Sync>),
    /// Direct realization in the model space, for operator data (such as
    /// powers of `I - L`) that is not the transform of a Gaussian kernel.
    Direct(
        #[allow(clippy::type_complexity)]
        Box<dyn Fn(&GroupElement<R>, RepParams<R>, &Grid1D<R>) -> Result<GridOperator<R>> + Sync>,
    ),
}

impl<R: Real> SymbolField<R> {
    /// Kernel family constant in the base point.
    pub fn constant_kernel(kappa: GaussPoly4<R>) -> Self {
        SymbolField::Kernel(Box::new(move |_| kappa.clone()))
    }

    /// Realizes the symbol at one parameter point.
    pub fn realize(
        &self,
        x: &GroupElement<R>,
        rep: RepParams<R>,
        grid: &Grid1D<R>,
    ) -> Result<GridOperator<R>> {
        delta_multi(self, MultiIndex::ZERO, x, rep, grid)
    }
}

/// Iterated difference operator `Delta'^alpha sigma(x, lambda, mu)`.
///
/// On a kernel symbol this is exact: the full multi-index multiplies the
/// kernel by the coordinate monomial `x^alpha` in one step, which is why the
/// result cannot depend on any ordering of the factors.  The identity symbol
/// is the transform of the unit mass at the group identity, where every
/// coordinate vanishes, so its differences are zero.  Direct operator data
/// admits no differences.
pub fn delta_multi<R: Real>(
    sigma: &SymbolField<R>,
    alpha: MultiIndex,
    x: &GroupElement<R>,
    rep: RepParams<R>,
    grid: &Grid1D<R>,
) -> Result<GridOperator<R>> {
    match sigma {
        SymbolField::Identity => {
            if alpha.is_zero() {
                Ok(GridOperator::identity(grid.clone()))
            } else {
                Ok(GridOperator::zero(grid.clone()))
            }
        }
        SymbolField::Kernel(family) => {
            let kernel = family(x).mul_monomial(alpha.0);
            Ok(GroupFourier::new(&kernel, rep).to_operator(grid))
        }
        SymbolField::Direct(family) => {
            if alpha.is_zero() {
                family(x, rep, grid)
            } else {
                Err(Error::InvalidConfig(
                    "difference operators need a kernel realization".into(),
                ))
            }
        }
    }
}

type OpFamily<'a, R> = Box<dyn Fn(&GroupElement<R>) -> Result<GridOperator<R>> + 'a>;

fn x_partial<R: Real>(
    f: &dyn Fn(&GroupElement<R>) -> Result<GridOperator<R>>,
    x: &GroupElement<R>,
    k: usize,
    step: R,
    extrapolate: bool,
) -> Result<GridOperator<R>> {
    let probe = |h: R| -> Result<GridOperator<R>> {
        let mut plus = x.coords;
        plus[k] = plus[k] + h;
        let mut minus = x.coords;
        minus[k] = minus[k] - h;
        let diff = f(&GroupElement::new(plus))?.sub(&f(&GroupElement::new(minus))?)?;
        Ok(diff.scale(cr(R::one() / (h + h))))
    };
    if extrapolate {
        Ok(richardson(probe(step)?, probe(step * rf::<R>(0.5))?))
    } else {
        probe(step)
    }
}

/// One application of the left-invariant field `X_j` to an operator family,
/// as a new family.  The chain rule needs only the coordinate partials and
/// the field's polynomial coefficients at each probe point.
fn x_field_layer<'a, R: Real>(f: OpFamily<'a, R>, j: usize, step: R) -> OpFamily<'a, R> {
    Box::new(move |x: &GroupElement<R>| {
        let coeffs = left_invariant_generators::<R>()[j].coefficients_at(&x.coords);
        let mut total: Option<GridOperator<R>> = None;
        for (k, c) in coeffs.iter().enumerate() {
            if *c == R::zero() {
                continue;
            }
            let term = x_partial(f.as_ref(), x, k, step, true)?.scale(cr(*c));
            total = Some(match total {
                Some(sum) => sum.add(&term)?,
                None => term,
            });
        }
        total.ok_or_else(|| Error::InvalidConfig("vector field with no coefficients".into()))
    })
}

/// `X^beta Delta'^alpha sigma` at the base point `x`, with
/// `X^beta = X_1^{b1} X_2^{b2} X_3^{b3} X_4^{b4}` (the rightmost factor acts
/// first).  Base derivatives use central differences of size `step` with one
/// Richardson extrapolation step.
pub fn x_derivative<R: Real>(
    sigma: &SymbolField<R>,
    alpha: MultiIndex,
    beta: MultiIndex,
    x: &GroupElement<R>,
    rep: RepParams<R>,
    grid: &Grid1D<R>,
    step: R,
) -> Result<GridOperator<R>> {
    let mut family: OpFamily<'_, R> =
        Box::new(move |y: &GroupElement<R>| delta_multi(sigma, alpha, y, rep, grid));
    for j in (0..4).rev() {
        for _ in 0..beta.0[j] {
            family = x_field_layer(family, j, step);
        }
    }
    family(x)
}

/// Cached spectral decomposition of `I - L` for repeated fractional powers.
struct FracPower<R: Real> {
    vals: DVector<R>,
    vecs: DMatrix<Complex<R>>,
}

impl<R: Real> FracPower<R> {
    fn new(rep: RepParams<R>, grid: &Grid1D<R>) -> Result<Self> {
        let iml = GridOperator::identity(grid.clone()).sub(&rep.sublaplacian(grid))?;
        let (vals, vecs) = iml.hermitian_eigen()?;
        Ok(Self { vals, vecs })
    }

    fn power(&self, s: R) -> DMatrix<Complex<R>> {
        let n = self.vals.len();
        let mut scaled = self.vecs.clone();
        for j in 0..n {
            let p = cr(self.vals[j].max(R::default_epsilon()).powf(s));
            for i in 0..n {
                scaled[(i, j)] *= p;
            }
        }
        scaled * self.vecs.adjoint()
    }
}

fn operator_norm<R: Real>(grid: &Grid1D<R>, m: DMatrix<Complex<R>>) -> Result<R> {
    let prod = m.adjoint() * &m;
    let (vals, _) = GridOperator::from_matrix(grid.clone(), prod).hermitian_eigen()?;
    Ok(vals[vals.len() - 1].max(R::zero()).sqrt())
}

/// Parameters of one seminorm evaluation: the class data `(m, rho, delta)`,
/// the index caps, and the finite sample sets over which the supremum is
/// taken.  Any reported value is a lower bound for the supremum over the
/// full parameter space.
#[derive(Clone, Debug)]
pub struct SeminormSpec<R: Real> {
    pub m: R,
    pub rho: R,
    pub delta: R,
    /// Cap on the homogeneous degree `[alpha]` of difference indices.
    pub cap_alpha: u16,
    /// Cap on the homogeneous degree `[beta]` of base-derivative indices.
    pub cap_beta: u16,
    /// Cap on the auxiliary exponent `gamma >= 0`.
    pub cap_gamma: u16,
    pub x_samples: Vec<GroupElement<R>>,
    /// `(lambda, mu)` sample pairs.
    pub rep_samples: Vec<(R, R)>,
    /// Base-derivative finite-difference step.
    pub fd_step: R,
}

impl<R: Real> SeminormSpec<R> {
    pub fn new(m: R, rho: R, delta: R) -> Self {
        Self {
            m,
            rho,
            delta,
            cap_alpha: 1,
            cap_beta: 1,
            cap_gamma: 1,
            x_samples: vec![
                GroupElement::identity(),
                GroupElement::new([rf::<R>(0.4), rf::<R>(-0.3), rf::<R>(0.2), rf::<R>(0.1)]),
            ],
            rep_samples: vec![(rf::<R>(1.0), rf::<R>(0.0)), (rf::<R>(1.6), rf::<R>(0.7))],
            fd_step: rf::<R>(1e-3),
        }
    }
}

/// One sampled term of the seminorm supremum.
#[derive(Clone, Debug)]
pub struct SeminormRow<R: Real> {
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    pub gamma: u16,
    pub x: [R; 4],
    pub lambda: R,
    pub mu: R,
    pub value: R,
}

/// Seminorm value with the witness term attaining it and all sampled terms.
#[derive(Clone, Debug)]
pub struct SeminormReport<R: Real> {
    pub value: R,
    pub witness: SeminormRow<R>,
    pub rows: Vec<SeminormRow<R>>,
}

/// Evaluates the symbol-class seminorm over the configured samples.
pub fn seminorm<R: Real>(
    sigma: &SymbolField<R>,
    spec: &SeminormSpec<R>,
    grid: &Grid1D<R>,
) -> Result<SeminormReport<R>> {
    let alphas = indices_up_to(spec.cap_alpha);
    let betas = indices_up_to(spec.cap_beta);
    let mut rows = Vec::new();
    for &(lambda, mu) in &spec.rep_samples {
        let rep = RepParams::new(lambda, mu)?;
        let frac = FracPower::new(rep, grid)?;
        for alpha in &alphas {
            for beta in &betas {
                for x in &spec.x_samples {
                    let derived =
                        x_derivative(sigma, *alpha, *beta, x, rep, grid, spec.fd_step)?;
                    for gamma in 0..=spec.cap_gamma {
                        let g = rf::<R>(f64::from(gamma));
                        let left = (spec.rho * rf::<R>(f64::from(alpha.homogeneous_degree()))
                            - spec.m
                            - spec.delta * rf::<R>(f64::from(beta.homogeneous_degree()))
                            + g)
                            * rf::<R>(0.5);
                        let sandwich =
                            frac.power(left) * derived.matrix() * frac.power(-g * rf::<R>(0.5));
                        rows.push(SeminormRow {
                            alpha: *alpha,
                            beta: *beta,
                            gamma,
                            x: x.coords,
                            lambda,
                            mu,
                            value: operator_norm(grid, sandwich)?,
                        });
                    }
                }
            }
        }
    }
    let witness = rows
        .iter()
        .max_by(|a, b| a.value.partial_cmp(&b.value).unwrap_or(std::cmp::Ordering::Equal))
        .cloned()
        .ok_or_else(|| Error::InvalidConfig("seminorm needs at least one sample".into()))?;
    Ok(SeminormReport {
        value: witness.value,
        witness,
        rows,
    })
}

/// Quadrature controls for the quantization double integral.
#[derive(Clone, Debug)]
pub struct QuadratureSpec<R: Real> {
    /// Hard cap on `|lambda|`; the effective window is the intersection
    /// with the decay windows of the transformed kernels.
    pub lambda_max: R,
    /// Panels per half-axis of the `lambda` window.
    pub panels: usize,
    /// Gauss-Legendre order inside each `lambda` panel.
    pub order: usize,
    /// Log-magnitude truncation margin: windows keep every factor whose
    /// Gaussian exponent is above `-margin`.
    pub margin: R,
    /// Dimensionless resolution factor: model-variable steps are this value
    /// divided by the square root of the local exponent curvature (and are
    /// separately capped by the local phase frequency).
    pub resolution: R,
}

impl<R: Real> Default for QuadratureSpec<R> {
    fn default() -> Self {
        Self {
            lambda_max: rf::<R>(8.0),
            panels: 6,
            order: 10,
            margin: rf::<R>(36.0),
            resolution: rf::<R>(0.3),
        }
    }
}

/// Contribution of one `lambda` panel to the quantization integral.
#[derive(Clone, Debug)]
pub struct QuantizePanel<R: Real> {
    pub lambda_lo: R,
    pub lambda_hi: R,
    pub partial: Complex<R>,
}

#[derive(Clone, Debug)]
pub struct QuantizeReport<R: Real> {
    pub value: Complex<R>,
    pub panels: Vec<QuantizePanel<R>>,
}

const LN_TWO_PI: f64 = 1.837_877_066_409_345_3;

/// `I_k / I_0` for the Gaussian moments `I_k = integral t^k exp(-a t^2 + b t) dt`.
fn moment_ratios<R: Real>(a: Complex<R>, b: Complex<R>, k_max: usize) -> Vec<Complex<R>> {
    let mut m = Vec::with_capacity(k_max + 1);
    m.push(Complex::new(R::one(), R::zero()));
    if k_max >= 1 {
        m.push(b / (a + a));
    }
    for k in 2..=k_max {
        let prev = m[k - 1];
        let prev2 = m[k - 2];
        m.push((prev2 * rf::<R>((k - 1) as f64) + b * prev) / (a + a));
    }
    m
}

fn binomial(n: u16, k: u16) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v = v * f64::from(n - i) / f64::from(i + 1);
    }
    v
}

/// Profile of a transformed kernel entry as a function of the shift `s`
/// subtracted from its second slot:
///
/// ```text
/// hat(slots[0], slots[1] - s, slots[2], slots[3])
///     = exp(e[0] + e[1] s + e[2] s^2) * sum_k p[k] s^k.
/// ```
fn shift_profile<R: Real>(
    hat: &GaussPoly4<R>,
    slots: [R; 4],
) -> ([Complex<R>; 3], Vec<Complex<R>>) {
    let c = cr::<R>(slots[1]);
    let mut e0 = hat.logamp - hat.alpha[1] * c * c + hat.beta[1] * c;
    for i in [0usize, 2, 3] {
        let w = cr::<R>(slots[i]);
        e0 += -hat.alpha[i] * w * w + hat.beta[i] * w;
    }
    let e1 = hat.alpha[1] * c * rf::<R>(2.0) - hat.beta[1];
    let e2 = -hat.alpha[1];
    let max_deg = hat
        .poly
        .terms()
        .map(|(e, _)| e[1] as usize)
        .max()
        .unwrap_or(0);
    let mut p = vec![Complex::<R>::zero(); max_deg + 1];
    for (expo, coeff) in hat.poly.terms() {
        let mut base = *coeff;
        for i in [0usize, 2, 3] {
            base *= cr::<R>(slots[i]).powu(u32::from(expo[i]));
        }
        let k = expo[1];
        for j in 0..=k {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            p[j as usize] +=
                base * cr::<R>(rf::<R>(sign * binomial(k, j))) * c.powu(u32::from(k - j));
        }
    }
    ([e0, e1, e2], p)
}

/// Exact `t`-integral of the product of two shift profiles with an extra
/// exponent `extra0 + extra1 t`:
///
/// ```text
/// integral exp(ek . (1, t, t^2)) Pk(t) exp(ef . (1, t, t^2)) Pf(t)
///          exp(extra0 + extra1 t) dt.
/// ```
fn pair_t_integral<R: Real>(
    e_k: [Complex<R>; 3],
    p_k: &[Complex<R>],
    e_f: [Complex<R>; 3],
    p_f: &[Complex<R>],
    extra0: Complex<R>,
    extra1: Complex<R>,
) -> Complex<R> {
    let e0 = e_k[0] + e_f[0] + extra0;
    let e1 = e_k[1] + e_f[1] + extra1;
    let a = -(e_k[2] + e_f[2]);
    let mut poly = vec![Complex::<R>::zero(); p_k.len() + p_f.len() - 1];
    for (i, ck) in p_k.iter().enumerate() {
        for (j, cf_) in p_f.iter().enumerate() {
            poly[i + j] += *ck * *cf_;
        }
    }
    let exponent = e0 + e1 * e1 / (a * rf::<R>(4.0));
    if exponent.re < rf::<R>(-60.0) {
        return Complex::zero();
    }
    let ratios = moment_ratios(a, e1, poly.len() - 1);
    let mut sum = Complex::<R>::zero();
    for (k, c) in poly.iter().enumerate() {
        sum += *c * ratios[k];
    }
    sum * (cr::<R>(R::pi()) / a).sqrt() * exponent.exp()
}

/// Decay windows and oscillation data of one transformed kernel, read off
/// the Gaussian exponent slots.  Peaks and half-widths describe where the
/// modulus exceeds `exp(-margin)` of its maximum.
struct HatWindows<R: Real> {
    pos_center: R,
    pos_half: R,
    w2_peak: R,
    w2_alpha: R,
    w3_center: R,
    w3_half: R,
    w4_center: R,
    w4_half: R,
    a1_mag: R,
    a3_mag: R,
    b1_im: R,
    b2_im: R,
    b3_im: R,
}

fn hat_windows<R: Real>(hat: &GaussPoly4<R>, margin: R) -> HatWindows<R> {
    let slot = |i: usize| {
        let a = hat.alpha[i].re.max(rf::<R>(1e-12));
        (hat.beta[i].re / (a + a), (margin / a).sqrt())
    };
    let (pos_center, pos_half) = slot(0);
    let (w2_peak, _) = slot(1);
    let (w3_center, w3_half) = slot(2);
    let (w4_center, w4_half) = slot(3);
    HatWindows {
        pos_center,
        pos_half,
        w2_peak,
        w2_alpha: hat.alpha[1].re.max(rf::<R>(1e-12)),
        w3_center,
        w3_half,
        w4_center,
        w4_half,
        a1_mag: norm_c(hat.alpha[0]),
        a3_mag: norm_c(hat.alpha[2]),
        b1_im: hat.beta[0].im.abs(),
        b2_im: hat.beta[1].im.abs(),
        b3_im: hat.beta[2].im.abs(),
    }
}

fn norm_c<R: Real>(z: Complex<R>) -> R {
    (z.re * z.re + z.im * z.im).sqrt()
}

fn intersect<R: Real>(a: (R, R), b: (R, R)) -> Option<(R, R)> {
    let lo = a.0.max(b.0);
    let hi = a.1.min(b.1);
    (lo < hi).then_some((lo, hi))
}

/// Interval of `y` with `lin * y` inside `center +- half` (`lin != 0`).
fn linear_window<R: Real>(lin: R, center: R, half: R) -> (R, R) {
    let lo = (center - half) / lin;
    let hi = (center + half) / lin;
    if lo <= hi {
        (lo, hi)
    } else {
        (hi, lo)
    }
}

/// Test-function side of a trace pairing.
enum PhiSide<'a, R: Real> {
    /// Untranslated separable test function (paired with the conjugation
    /// phase and argument shift of the outer group element).
    Plain(&'a GaussPoly4<R>),
    /// Left-translated test function as a full quadratic Gaussian.
    Translated(&'a QuadGauss4<R>),
}

impl<R: Real> PhiSide<'_, R> {
    fn profile(&self, r: R, slots: [R; 3]) -> ([Complex<R>; 3], Vec<Complex<R>>) {
        match self {
            PhiSide::Plain(hat) => shift_profile(hat, [r, slots[0], slots[1], slots[2]]),
            PhiSide::Translated(q) => (
                q.ft_234_shift_exponent(r, slots),
                vec![Complex::new(R::one(), R::zero())],
            ),
        }
    }
}

/// Trace of the product of two kernel operators, `mu`-integrated:
///
/// ```text
/// integral Tr dmu = 2 |lambda| integral dt
///     sum_u sum_r K_kappa(u + kappa_shift, u + r) K_phi(u + r, u) phase(u)
/// ```
///
/// with the `t`-integral in closed form and midpoint sums over analysis
/// windows in `u` and `r = v - u`.
#[allow(clippy::too_many_arguments)]
fn pair_lambda_sum<R: Real>(
    lam: R,
    hat_k: &GaussPoly4<R>,
    wk: &HatWindows<R>,
    kappa_shift: R,
    phi: &PhiSide<'_, R>,
    wf: &HatWindows<R>,
    phi_pos_center: R,
    phi_center_shift: R,
    x: Option<&GroupElement<R>>,
    spec: &QuadratureSpec<R>,
) -> Complex<R> {
    let zero = Complex::<R>::zero();
    let half_pad = rf::<R>(0.5);
    // r-window from both position slots.
    let r_kappa = (
        kappa_shift - (wk.pos_center + wk.pos_half) - half_pad,
        kappa_shift - (wk.pos_center - wk.pos_half) + half_pad,
    );
    let r_phi = (
        phi_pos_center - wf.pos_half - half_pad,
        phi_pos_center + wf.pos_half + half_pad,
    );
    let Some((r_lo, r_hi)) = intersect(r_kappa, r_phi) else {
        return zero;
    };
    let w3max_f = wf.w3_center.abs() + wf.w3_half;
    let alpha_sq = wk.w2_alpha * wf.w2_alpha / (wk.w2_alpha + wf.w2_alpha);
    let x2 = x.map_or(R::zero(), |g| g.coords[1]);
    let x3 = x.map_or(R::zero(), |g| g.coords[2]);
    let alpha_r = wk.a1_mag + wf.a1_mag + alpha_sq * w3max_f * w3max_f * rf::<R>(0.25);
    let freq_r = wk.b1_im + wf.b1_im + x2.abs() * w3max_f * rf::<R>(0.5) + rf::<R>(0.3);
    let spacing_r = (spec.resolution / alpha_r.sqrt()).min(R::pi() / (rf::<R>(3.0) * freq_r));
    let nr = (((r_hi - r_lo) / spacing_r).ceil().to_usize().unwrap_or(1)).clamp(1, 4000);
    let hr = (r_hi - r_lo) / rf::<R>(nr as f64);
    let squeeze_half = (spec.margin / alpha_sq).sqrt();
    let delta_peak = wk.w2_peak - wf.w2_peak;
    let ln_norm = cr::<R>(rf::<R>(3.0 * LN_TWO_PI));

    let mut total = zero;
    for ir in 0..nr {
        let r = r_lo + (rf::<R>(ir as f64) + rf::<R>(0.5)) * hr;
        // u-window: both slot-3 constraints plus the squeeze of the paired
        // slot-2 arguments left over after the t-integration.
        let i1 = {
            let (lo, hi) = linear_window(-lam, wf.w3_center, wf.w3_half + half_pad);
            (lo - phi_center_shift, hi - phi_center_shift)
        };
        let i2 = {
            let (lo, hi) = linear_window(-lam, wk.w3_center, wk.w3_half + half_pad);
            (lo - r, hi - r)
        };
        let Some(mut window) = intersect(i1, i2) else {
            continue;
        };
        let a_coef = lam * (r - phi_center_shift);
        let b_coef = lam * (r * r - phi_center_shift * phi_center_shift) * rf::<R>(0.5)
            - delta_peak;
        if a_coef.abs() > rf::<R>(1e-9) {
            let i3 = linear_window(a_coef, -b_coef, squeeze_half + R::one());
            match intersect(window, i3) {
                Some(w) => window = w,
                None => continue,
            }
        }
        let alpha_u =
            (wk.a3_mag + wf.a3_mag) * lam * lam + alpha_sq * a_coef * a_coef;
        let freq_u = lam.abs() * (x3.abs() + wk.b3_im + wf.b3_im)
            + (x2.abs() + wk.b2_im + wf.b2_im) * a_coef.abs() * rf::<R>(0.6)
            + rf::<R>(0.3);
        let spacing_u = (spec.resolution / alpha_u.max(rf::<R>(1e-12)).sqrt())
            .min(R::pi() / (rf::<R>(3.0) * freq_u));
        let nu = (((window.1 - window.0) / spacing_u).ceil().to_usize().unwrap_or(1))
            .clamp(1, 8000);
        let hu = (window.1 - window.0) / rf::<R>(nu as f64);
        let mut row = zero;
        for iu in 0..nu {
            let u = window.0 + (rf::<R>(iu as f64) + rf::<R>(0.5)) * hu;
            let v = u + r;
            let (e_k, p_k) = shift_profile(
                hat_k,
                [
                    kappa_shift - r,
                    lam * v * v * rf::<R>(0.5),
                    -lam * v,
                    lam,
                ],
            );
            let (e_f, p_f) = phi.profile(
                r,
                [lam * u * u * rf::<R>(0.5), -lam * u, lam],
            );
            let (extra0, extra1) = match x {
                Some(g) => {
                    let phase = lam
                        * (g.coords[3] - g.coords[2] * u
                            + g.coords[1] * u * u * rf::<R>(0.5));
                    (ln_norm + Complex::new(R::zero(), phase), cf::<R>(0.0, -1.0) * x2)
                }
                None => (ln_norm, zero),
            };
            row += pair_t_integral(e_k, &p_k, e_f, &p_f, extra0, extra1);
        }
        total += row * cr(hu * hr);
    }
    total
}

/// Diagonal trace of a single kernel operator, `mu`-integrated; covers the
/// identity symbol where the pairing collapses to
/// `integral K_phi'(u, u) du` with `phi'` the translated test function.
fn single_lambda_sum<R: Real>(
    lam: R,
    phi: &PhiSide<'_, R>,
    wf: &HatWindows<R>,
    slot1_arg: R,
    phi_center_shift: R,
    x: Option<&GroupElement<R>>,
    spec: &QuadratureSpec<R>,
) -> Complex<R> {
    let zero = Complex::<R>::zero();
    let (lo, hi) = {
        let (lo, hi) = linear_window(-lam, wf.w3_center, wf.w3_half + rf::<R>(0.5));
        (lo - phi_center_shift, hi - phi_center_shift)
    };
    let x2 = x.map_or(R::zero(), |g| g.coords[1]);
    let x3 = x.map_or(R::zero(), |g| g.coords[2]);
    let w3max = wf.w3_center.abs() + wf.w3_half;
    let alpha_u = wf.a3_mag * lam * lam;
    let freq_u = lam.abs() * (x3.abs() + wf.b3_im) + wf.b2_im * w3max * rf::<R>(0.5)
        + rf::<R>(0.3);
    let spacing_u = (spec.resolution / alpha_u.max(rf::<R>(1e-12)).sqrt())
        .min(R::pi() / (rf::<R>(3.0) * freq_u));
    let nu = (((hi - lo) / spacing_u).ceil().to_usize().unwrap_or(1)).clamp(1, 8000);
    let hu = (hi - lo) / rf::<R>(nu as f64);
    let ln_norm = cr::<R>(rf::<R>(1.5 * LN_TWO_PI));
    let trivial = [Complex::<R>::zero(); 3];
    let unit = [Complex::new(R::one(), R::zero())];
    let mut total = zero;
    for iu in 0..nu {
        let u = lo + (rf::<R>(iu as f64) + rf::<R>(0.5)) * hu;
        let (e_f, p_f) = phi.profile(
            slot1_arg,
            [lam * u * u * rf::<R>(0.5), -lam * u, lam],
        );
        let (extra0, extra1) = match x {
            Some(g) => {
                let phase = lam
                    * (g.coords[3] - g.coords[2] * u + g.coords[1] * u * u * rf::<R>(0.5));
                (ln_norm + Complex::new(R::zero(), phase), cf::<R>(0.0, -1.0) * x2)
            }
            None => (ln_norm, zero),
        };
        total += pair_t_integral(trivial, &unit, e_f, &p_f, extra0, extra1);
    }
    total * cr(hu)
}

fn lambda_panels<R: Real>(window: (R, R), panels: usize) -> Vec<(R, R)> {
    let mut out = Vec::new();
    let mut side = |lo: R, hi: R| {
        if lo >= hi {
            return;
        }
        let width = (hi - lo) / rf::<R>(panels as f64);
        for i in 0..panels {
            let a = lo + width * rf::<R>(i as f64);
            let b = if i + 1 == panels {
                hi
            } else {
                lo + width * rf::<R>((i + 1) as f64)
            };
            out.push((a, b));
        }
    };
    side(window.0, window.1.min(R::zero()));
    side(window.0.max(R::zero()), window.1);
    out
}

/// Integrates `2 |lambda| trace(lambda)` over the window, scaled by the
/// inversion constant, recording per-panel partial sums.
fn lambda_quadrature<R: Real>(
    window: Option<(R, R)>,
    spec: &QuadratureSpec<R>,
    trace: impl Fn(R) -> Complex<R> + Sync,
) -> QuantizeReport<R> {
    let c = plancherel_constant::<R>();
    let Some(window) = window else {
        return QuantizeReport {
            value: Complex::zero(),
            panels: Vec::new(),
        };
    };
    let panels: Vec<QuantizePanel<R>> = lambda_panels(window, spec.panels)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut partial = Complex::<R>::zero();
            for (lam, w) in panel_rule(lo, hi, 1, spec.order) {
                partial += trace(lam) * cr(w * lam.abs() * rf::<R>(2.0) * c);
            }
            QuantizePanel {
                lambda_lo: lo,
                lambda_hi: hi,
                partial,
            }
        })
        .collect();
    let value = panels
        .iter()
        .fold(Complex::<R>::zero(), |acc, p| acc + p.partial);
    QuantizeReport { value, panels }
}

fn slot4_window<R: Real>(w: &HatWindows<R>, cap: R) -> Option<(R, R)> {
    intersect((w.w4_center - w.w4_half, w.w4_center + w.w4_half), (-cap, cap))
}

/// `Op(sigma) phi (x)`: the quantization pairing of a symbol with a test
/// function at a base point.  The symbol must be the identity or a kernel
/// family; direct operator data has no off-grid kernel to integrate.
pub fn quantize<R: Real>(
    sigma: &SymbolField<R>,
    phi: &GaussPoly4<R>,
    x: &GroupElement<R>,
    spec: &QuadratureSpec<R>,
) -> Result<QuantizeReport<R>> {
    let hat_phi = phi.ft(&[1, 2, 3]);
    let wf = hat_windows(&hat_phi, spec.margin);
    match sigma {
        SymbolField::Identity => {
            let window = slot4_window(&wf, spec.lambda_max);
            let x1 = x.coords[0];
            Ok(lambda_quadrature(window, spec, |lam| {
                single_lambda_sum(
                    lam,
                    &PhiSide::Plain(&hat_phi),
                    &wf,
                    x1,
                    R::zero(),
                    Some(x),
                    spec,
                )
            }))
        }
        SymbolField::Kernel(family) => {
            let hat_k = family(x).ft(&[1, 2, 3]);
            let wk = hat_windows(&hat_k, spec.margin);
            let window = slot4_window(&wf, spec.lambda_max)
                .and_then(|w| slot4_window(&wk, spec.lambda_max).and_then(|v| intersect(w, v)));
            let x1 = x.coords[0];
            Ok(lambda_quadrature(window, spec, |lam| {
                pair_lambda_sum(
                    lam,
                    &hat_k,
                    &wk,
                    x1,
                    &PhiSide::Plain(&hat_phi),
                    &wf,
                    wf.pos_center,
                    R::zero(),
                    Some(x),
                    spec,
                )
            }))
        }
        SymbolField::Direct(_) => Err(Error::InvalidConfig(
            "quantization needs a kernel realization of the symbol".into(),
        )),
    }
}

/// The same pairing computed through the composed form: the outer factor is
/// absorbed by left-translating the test function, `phi'(y) = phi(x o y)`,
/// and the trace pairs the two Kohn-Nirenberg operators directly:
///
/// ```text
/// Op(sigma) phi (x) = c integral integral
///     Tr( Op(a_kappa) Op(a_phi') ) dmu dlambda.
/// ```
///
/// The translated function is a full quadratic Gaussian, so this path
/// requires a plain Gaussian test function (constant prefactor).
pub fn quantize_composed<R: Real>(
    sigma: &SymbolField<R>,
    phi: &GaussPoly4<R>,
    x: &GroupElement<R>,
    spec: &QuadratureSpec<R>,
) -> Result<QuantizeReport<R>> {
    for (expo, _) in phi.poly.terms() {
        if expo != &[0, 0, 0, 0] {
            return Err(Error::InvalidConfig(
                "composed quantization needs a plain Gaussian test function".into(),
            ));
        }
    }
    let hat_phi = phi.ft(&[1, 2, 3]);
    let wf = hat_windows(&hat_phi, spec.margin);
    let translated = QuadGauss4::from_separable(phi).left_translate(x);
    let x1 = x.coords[0];
    // Window data of the translated side: slot 4 is unmixed, slot 3 shifts
    // by x1 lambda (handled through the center shift), and the position
    // window shifts by -x1.
    match sigma {
        SymbolField::Identity => {
            let window = slot4_window(&wf, spec.lambda_max);
            Ok(lambda_quadrature(window, spec, |lam| {
                single_lambda_sum(
                    lam,
                    &PhiSide::Translated(&translated),
                    &wf,
                    R::zero(),
                    x1,
                    None,
                    spec,
                )
            }))
        }
        SymbolField::Kernel(family) => {
            let hat_k = family(x).ft(&[1, 2, 3]);
            let wk = hat_windows(&hat_k, spec.margin);
            let window = slot4_window(&wf, spec.lambda_max)
                .and_then(|w| slot4_window(&wk, spec.lambda_max).and_then(|v| intersect(w, v)));
            Ok(lambda_quadrature(window, spec, |lam| {
                pair_lambda_sum(
                    lam,
                    &hat_k,
                    &wk,
                    R::zero(),
                    &PhiSide::Translated(&translated),
                    &wf,
                    wf.pos_center - x1,
                    x1,
                    None,
                    spec,
                )
            }))
        }
        SymbolField::Direct(_) => Err(Error::InvalidConfig(
            "quantization needs a kernel realization of the symbol".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cf;

    type C = Complex<f64>;

    fn grid() -> Grid1D<f64> {
        Grid1D::new(64, 9.0)
    }

    fn gaussian(widths: [f64; 4], center: [f64; 4], momentum: [f64; 4]) -> GaussPoly4<f64> {
        let alpha = widths.map(|w| cf(0.5 / (w * w), 0.0));
        GaussPoly4::product_gaussian(alpha, center, momentum)
    }

    fn test_phi() -> GaussPoly4<f64> {
        gaussian(
            [1.0, 0.9, 1.1, 1.0],
            [0.2, -0.1, 0.15, 0.0],
            [0.3, 0.2, -0.1, 0.25],
        )
    }

    fn test_kappa() -> GaussPoly4<f64> {
        gaussian(
            [0.9, 1.0, 1.0, 1.1],
            [-0.1, 0.2, 0.0, 0.1],
            [-0.2, 0.1, 0.2, -0.3],
        )
    }

    fn rel(a: C, b: C) -> f64 {
        (a - b).norm() / b.norm().max(1e-12)
    }

    #[test]
    fn homogeneous_degree_weights_the_strata() {
        assert_eq!(MultiIndex([0, 0, 0, 0]).homogeneous_degree(), 0);
        assert_eq!(MultiIndex([1, 1, 1, 1]).homogeneous_degree(), 7);
        assert_eq!(MultiIndex([2, 0, 1, 0]).homogeneous_degree(), 4);
    }

    #[test]
    fn index_enumeration_is_complete_and_ordered() {
        let up2 = indices_up_to(2);
        assert!(up2.contains(&MultiIndex([0, 0, 1, 0])));
        assert!(!up2.contains(&MultiIndex([0, 0, 0, 1])));
        assert!(up2.iter().all(|m| m.homogeneous_degree() <= 2));
        let degrees: Vec<u16> = up2.iter().map(|m| m.homogeneous_degree()).collect();
        let mut sorted = degrees.clone();
        sorted.sort_unstable();
        assert_eq!(degrees, sorted);
        // degree counts: 1 of degree 0, 2 of degree 1, 4 of degree 2
        assert_eq!(up2.len(), 7);
    }

    #[test]
    fn differences_are_order_independent() {
        let rep = RepParams::new(1.3, 0.5).unwrap();
        let grid = grid();
        let sigma = SymbolField::constant_kernel(test_kappa());
        let x = GroupElement::identity();
        let joint = delta_multi(&sigma, MultiIndex([1, 1, 0, 0]), &x, rep, &grid).unwrap();
        let one_two = GroupFourier::new(
            &test_kappa().mul_monomial([1, 0, 0, 0]).mul_monomial([0, 1, 0, 0]),
            rep,
        )
        .to_operator(&grid);
        let two_one = GroupFourier::new(
            &test_kappa().mul_monomial([0, 1, 0, 0]).mul_monomial([1, 0, 0, 0]),
            rep,
        )
        .to_operator(&grid);
        let gap1 = joint.sub(&one_two).unwrap().hs_norm() / joint.hs_norm();
        let gap2 = joint.sub(&two_one).unwrap().hs_norm() / joint.hs_norm();
        assert!(gap1 < 1e-12 && gap2 < 1e-12, "gaps {gap1}, {gap2}");
    }

    #[test]
    fn base_derivative_is_second_order() {
        // Family with exact derivative: a scalar cubic profile times a fixed
        // kernel, so the finite-difference error is purely the h^2 term.
        let kernel = test_kappa();
        let sigma = SymbolField::Kernel(Box::new(move |x: &GroupElement<f64>| {
            let g = x.coords[0];
            kernel.clone().scale(cf(g * g * g, 0.0))
        }));
        let rep = RepParams::new(1.0, 0.0).unwrap();
        let grid = grid();
        let x = GroupElement::new([0.7, 0.0, 0.0, 0.0]);
        let exact = SymbolField::constant_kernel(test_kappa())
            .realize(&x, rep, &grid)
            .unwrap()
            .scale(cf(3.0 * 0.7 * 0.7, 0.0));
        let family = |y: &GroupElement<f64>| {
            delta_multi(&sigma, MultiIndex::ZERO, y, rep, &grid)
        };
        let err = |h: f64| {
            x_partial(&family, &x, 0, h, false)
                .unwrap()
                .sub(&exact)
                .unwrap()
                .hs_norm()
        };
        let ratio = err(0.02) / err(0.01);
        assert!(
            (ratio - 4.0).abs() < 0.8,
            "second-order convergence ratio {ratio}"
        );
    }

    #[test]
    fn base_derivative_matches_analytic_field_action() {
        // kappa_x = g(x) kappa with Gaussian g: X_j (g kappa) = (X_j g) kappa.
        let envelope = gaussian(
            [1.4, 1.2, 1.3, 1.5],
            [0.1, -0.2, 0.2, 0.1],
            [0.1, 0.05, -0.1, 0.2],
        );
        let env = envelope.clone();
        let sigma = SymbolField::Kernel(Box::new(move |x: &GroupElement<f64>| {
            test_kappa().scale(env.eval(x.coords))
        }));
        let rep = RepParams::new(1.2, -0.4).unwrap();
        let grid = grid();
        let x = GroupElement::new([0.5, -0.3, 0.2, 0.4]);
        let base = SymbolField::constant_kernel(test_kappa())
            .realize(&x, rep, &grid)
            .unwrap();
        for (j, beta) in [
            (0usize, MultiIndex([1, 0, 0, 0])),
            (1, MultiIndex([0, 1, 0, 0])),
            (3, MultiIndex([0, 0, 0, 1])),
        ] {
            let fields = left_invariant_generators::<f64>();
            let coeffs = fields[j].coefficients_at(&x.coords);
            let mut scalar = C::new(0.0, 0.0);
            for (k, c) in coeffs.iter().enumerate() {
                if *c != 0.0 {
                    scalar += envelope.partial(k).eval(x.coords) * *c;
                }
            }
            let exact = base.scale(scalar);
            let numeric =
                x_derivative(&sigma, MultiIndex::ZERO, beta, &x, rep, &grid, 1e-3).unwrap();
            let gap = numeric.sub(&exact).unwrap().hs_norm() / exact.hs_norm();
            assert!(gap < 1e-7, "field {} derivative gap {gap}", j + 1);
        }
    }

    #[test]
    fn seminorm_of_identity_is_one_at_matching_order() {
        let spec = SeminormSpec::new(0.0, 1.0, 0.0);
        let report = seminorm(&SymbolField::Identity, &spec, &grid()).unwrap();
        assert!(
            (report.value - 1.0).abs() < 1e-6,
            "identity seminorm {}",
            report.value
        );
        assert!(report.witness.alpha.is_zero());
    }

    #[test]
    fn seminorm_of_matching_sublaplacian_power_is_one() {
        let m = 2.0;
        let sigma = SymbolField::<f64>::Direct(Box::new(
            move |_x, rep: RepParams<f64>, grid: &Grid1D<f64>| {
                rep.i_minus_sublaplacian_power(grid, m * 0.5)
            },
        ));
        let mut spec = SeminormSpec::new(m, 1.0, 0.0);
        spec.cap_alpha = 0;
        spec.cap_beta = 0;
        spec.cap_gamma = 2;
        let report = seminorm(&sigma, &spec, &grid()).unwrap();
        assert!(
            (report.value - 1.0).abs() < 1e-4,
            "matching-order seminorm {}",
            report.value
        );
        for row in &report.rows {
            assert!((row.value - 1.0).abs() < 1e-4, "row value {}", row.value);
        }
    }

    #[test]
    fn seminorm_grows_with_enlarged_index_caps_and_samples() {
        let sigma = SymbolField::constant_kernel(test_kappa());
        let mut small = SeminormSpec::new(0.0, 1.0, 0.0);
        small.cap_alpha = 0;
        small.cap_beta = 0;
        small.cap_gamma = 0;
        small.x_samples = vec![GroupElement::identity()];
        small.rep_samples = vec![(1.0, 0.0)];
        let mut mid = small.clone();
        mid.cap_alpha = 1;
        mid.cap_gamma = 1;
        let mut large = mid.clone();
        large.rep_samples = vec![(1.0, 0.0), (0.7, 0.4), (1.6, -0.5)];
        let g = grid();
        let v_small = seminorm(&sigma, &small, &g).unwrap().value;
        let v_mid = seminorm(&sigma, &mid, &g).unwrap().value;
        let v_large = seminorm(&sigma, &large, &g).unwrap().value;
        assert!(v_small <= v_mid + 1e-12 && v_mid <= v_large + 1e-12);
        assert!(v_small > 0.0);
    }

    #[test]
    fn seminorm_is_nonincreasing_in_the_order_parameter() {
        // Raising m multiplies the sandwiched operator by a negative
        // fractional power of I - L, whose spectrum lies in (0, 1].
        let kappa = test_kappa().mul_monomial([0, 0, 0, 1]);
        let sigma = SymbolField::constant_kernel(kappa);
        let g = grid();
        let mut prev = f64::INFINITY;
        let mut values = Vec::new();
        for m in [0.0, 1.0, 2.0, 3.0] {
            let mut spec = SeminormSpec::new(m, 1.0, 0.0);
            spec.cap_alpha = 1;
            spec.cap_beta = 0;
            spec.cap_gamma = 1;
            spec.x_samples = vec![GroupElement::identity()];
            let value = seminorm(&sigma, &spec, &g).unwrap().value;
            assert!(value <= prev + 1e-8, "order {m}: {value} > {prev}");
            prev = value;
            values.push(value);
        }
        assert!(values[0] > values[3]);
    }

    fn convolution_oracle(phi: &GaussPoly4<f64>, kappa: &GaussPoly4<f64>, x: [f64; 4]) -> C {
        // (phi * kappa)(x) = integral phi(b) kappa(b^{-1} o x) db.
        let rule = panel_rule(-6.5f64, 6.5, 6, 8);
        let xg = GroupElement::new(x);
        rule.par_iter()
            .map(|&(b1, w1)| {
                let mut acc = C::new(0.0, 0.0);
                for &(b2, w2) in &rule {
                    for &(b3, w3) in &rule {
                        for &(b4, w4) in &rule {
                            let b = GroupElement::new([b1, b2, b3, b4]);
                            let arg = b.inverse().multiply(&xg);
                            acc += phi.eval([b1, b2, b3, b4])
                                * kappa.eval(arg.coords)
                                * (w2 * w3 * w4);
                        }
                    }
                }
                acc * w1
            })
            .sum()
    }

    #[test]
    fn quantizing_the_identity_symbol_recovers_the_test_function() {
        let spec = QuadratureSpec::default();
        let phi = test_phi();
        for coords in [
            [0.0, 0.0, 0.0, 0.0],
            [0.3, -0.2, 0.4, 0.1],
            [-0.5, 0.4, 0.0, -0.3],
            [0.2, 0.5, -0.3, 0.6],
            [0.8, -0.6, 0.2, -0.4],
        ] {
            let x = GroupElement::new(coords);
            let got = quantize(&SymbolField::Identity, &phi, &x, &spec)
                .unwrap()
                .value;
            let want = phi.eval(coords);
            assert!(
                rel(got, want) < 1e-3,
                "inversion at {coords:?}: got {got}, want {want}, rel {}",
                rel(got, want)
            );
        }
    }

    #[test]
    fn quantizing_a_kernel_symbol_is_group_convolution() {
        let spec = QuadratureSpec::default();
        let phi = test_phi();
        let kappa = test_kappa();
        let sigma = SymbolField::constant_kernel(kappa.clone());
        for coords in [[0.0, 0.0, 0.0, 0.0], [0.4, -0.3, 0.2, 0.3]] {
            let x = GroupElement::new(coords);
            let got = quantize(&sigma, &phi, &x, &spec).unwrap().value;
            let want = convolution_oracle(&phi, &kappa, coords);
            assert!(
                rel(got, want) < 1e-3,
                "convolution at {coords:?}: got {got}, want {want}, rel {}",
                rel(got, want)
            );
        }
    }

    #[test]
    fn quantization_is_linear_in_both_arguments() {
        let spec = QuadratureSpec::default();
        let phi = test_phi();
        let x = GroupElement::new([0.3, 0.1, -0.2, 0.2]);
        let kappa = test_kappa();
        let scaled = SymbolField::constant_kernel(kappa.clone().scale(cf(1.7, -0.4)));
        let base = quantize(&SymbolField::constant_kernel(kappa.clone()), &phi, &x, &spec)
            .unwrap()
            .value;
        let got = quantize(&scaled, &phi, &x, &spec).unwrap().value;
        assert!(rel(got, base * cf(1.7, -0.4)) < 1e-8);

        // Sum of two prefactor polynomials over one exponent: quantization
        // distributes over the kernel sum exactly.
        let with_poly = |p: crate::poly::Poly4<C>| {
            SymbolField::constant_kernel(kappa.clone().with_poly(p))
        };
        let mut p1 = crate::poly::Poly4::constant(C::new(1.0, 0.0));
        p1.add_term([1, 0, 0, 0], cf(0.5, 0.2));
        let mut p2 = crate::poly::Poly4::constant(C::new(0.0, 0.0));
        p2.add_term([0, 0, 1, 0], cf(-0.3, 0.4));
        let sum = p1.clone() + p2.clone();
        let q1 = quantize(&with_poly(p1), &phi, &x, &spec).unwrap().value;
        let q2 = quantize(&with_poly(p2), &phi, &x, &spec).unwrap().value;
        let qs = quantize(&with_poly(sum), &phi, &x, &spec).unwrap().value;
        assert!((qs - (q1 + q2)).norm() / qs.norm() < 1e-8);

        let phi_scaled = phi.clone().scale(cf(0.0, 2.0));
        let got_phi = quantize(&SymbolField::constant_kernel(kappa), &phi_scaled, &x, &spec)
            .unwrap()
            .value;
        assert!(rel(got_phi, base * cf(0.0, 2.0)) < 1e-8);
    }

    #[test]
    fn trace_pairing_is_cyclic() {
        // At the identity the pairing is symmetric in the two kernels:
        // Tr(pi(kappa) pi(phi)) = Tr(pi(phi) pi(kappa)).
        let spec = QuadratureSpec::default();
        let e = GroupElement::identity();
        let phi = test_phi();
        let kappa = test_kappa();
        let ab = quantize(&SymbolField::constant_kernel(kappa.clone()), &phi, &e, &spec)
            .unwrap()
            .value;
        let ba = quantize(&SymbolField::constant_kernel(phi), &kappa, &e, &spec)
            .unwrap()
            .value;
        assert!(rel(ab, ba) < 1e-6, "cyclic gap {}", rel(ab, ba));
    }

    #[test]
    fn composed_form_agrees_with_direct_quantization() {
        let spec = QuadratureSpec::default();
        let phi = gaussian(
            [1.0, 0.9, 1.1, 1.0],
            [0.2, -0.1, 0.15, 0.0],
            [0.3, 0.2, -0.1, 0.25],
        );
        let triples: [([f64; 4], GaussPoly4<f64>); 3] = [
            ([0.0, 0.0, 0.0, 0.0], test_kappa()),
            (
                [0.4, -0.3, 0.2, 0.3],
                gaussian(
                    [1.1, 1.0, 0.9, 1.0],
                    [0.0, 0.1, -0.1, 0.2],
                    [0.2, -0.2, 0.1, 0.1],
                ),
            ),
            (
                [-0.6, 0.2, 0.3, -0.2],
                gaussian(
                    [0.9, 1.1, 1.0, 1.2],
                    [0.1, -0.1, 0.2, 0.0],
                    [-0.1, 0.3, 0.0, -0.2],
                ),
            ),
        ];
        for (coords, kappa) in triples {
            let x = GroupElement::new(coords);
            let sigma = SymbolField::constant_kernel(kappa);
            let direct = quantize(&sigma, &phi, &x, &spec).unwrap().value;
            let composed = quantize_composed(&sigma, &phi, &x, &spec).unwrap().value;
            assert!(
                rel(direct, composed) < 1e-3,
                "composed gap at {coords:?}: direct {direct}, composed {composed}, rel {}",
                rel(direct, composed)
            );
        }
    }

    #[test]
    fn composed_form_reduces_at_the_identity() {
        // At x = e the translation is trivial and the two paths evaluate the
        // same double integral through different kernel representations.
        let spec = QuadratureSpec::default();
        let phi = gaussian(
            [1.0, 1.0, 1.0, 1.0],
            [0.1, 0.0, -0.1, 0.1],
            [0.2, 0.1, 0.0, -0.1],
        );
        let e = GroupElement::identity();
        let sigma = SymbolField::constant_kernel(test_kappa());
        let direct = quantize(&sigma, &phi, &e, &spec).unwrap().value;
        let composed = quantize_composed(&sigma, &phi, &e, &spec).unwrap().value;
        assert!(rel(direct, composed) < 1e-6, "gap {}", rel(direct, composed));
        let ident = quantize_composed(&SymbolField::Identity, &phi, &e, &spec)
            .unwrap()
            .value;
        assert!(rel(ident, phi.eval([0.0; 4])) < 1e-3);
    }

    #[test]
    fn quantization_report_partials_sum_to_the_value() {
        let spec = QuadratureSpec::default();
        let phi = test_phi();
        let x = GroupElement::new([0.2, 0.1, -0.1, 0.3]);
        let report = quantize(&SymbolField::constant_kernel(test_kappa()), &phi, &x, &spec)
            .unwrap();
        let sum: C = report
            .panels
            .iter()
            .fold(C::new(0.0, 0.0), |acc, p| acc + p.partial);
        assert!((sum - report.value).norm() < 1e-14);
        assert_eq!(report.panels.len(), 2 * spec.panels);
    }

    #[test]
    fn quantization_rejects_direct_operator_data() {
        let sigma = SymbolField::<f64>::Direct(Box::new(|_, _, grid: &Grid1D<f64>| {
            Ok(GridOperator::identity(grid.clone()))
        }));
        let err = quantize(
            &sigma,
            &test_phi(),
            &GroupElement::identity(),
            &QuadratureSpec::default(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn left_translation_composes_with_the_group_product() {
        // Guard for the composed path: phi'(y) = phi(x o y) realized through
        // the quadratic-Gaussian translation agrees pointwise.
        let phi = gaussian(
            [1.0, 1.0, 1.0, 1.0],
            [0.1, 0.0, -0.1, 0.1],
            [0.2, 0.1, 0.0, -0.1],
        );
        let x = GroupElement::new([0.4, -0.3, 0.2, 0.3]);
        let q = QuadGauss4::from_separable(&phi).left_translate(&x);
        for y in [[0.0, 0.0, 0.0, 0.0], [0.3, -0.2, 0.5, 0.1]] {
            let composed = x.multiply(&GroupElement::new(y));
            let want = phi.eval(composed.coords);
            let got = q.eval(y);
            assert!((got - want).norm() < 1e-12);
        }
    }
}
