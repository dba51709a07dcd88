//! Difference operators on the Fourier side.
//!
//! For a kernel function `kappa` the difference operators act on its
//! transform by coordinate multiplication,
//!
//! ```text
//! Delta_{x_i} pi(kappa) := pi(x_i kappa),
//! ```
//!
//! which stays inside the Gaussian-polynomial family, so the defining path
//! (`delta_direct`) is closed-form.  Each operator also satisfies a formula
//! expressing it through the representation's generators and parameter
//! derivatives; this module implements both and the workbench compares them:
//!
//! ```text
//! Delta_{x_1} A = (i/lambda) (dpi(X3) A - A dpi(X3))
//! Delta_{x_2} A = (2 lambda / i) d/dmu A
//! Delta_{x_3} A = (i/lambda) (Delta_{x_2} A dpi(X3) + A dpi(X1) - dpi(X1) A)
//! Delta_{x_4} A = i d/dlambda A - (mu/(2 lambda^2) + u^2/2) Delta_{x_2} A
//!                 + u Delta_{x_3} A - Delta_{x_3} Delta_{x_1} A
//!                 + u Delta_{x_2} Delta_{x_1} A
//!                 - (1/2) Delta_{x_2} Delta_{x_1}^2 A
//! ```
//!
//! with `A = pi(kappa)`, multiplication operators composing on the left,
//! and iterated differences taken on the exact path (nested finite
//! differences would drown the last identity in noise).
//!
//! The example table `Delta_{x_i} pi(X_j)` is reproduced by narrow-Gaussian
//! approximation of the relevant distributions; each cell carries the
//! claimed value, the product-rule (Leibniz) value `-delta_{ij} I`, and
//! the measured limit, so disagreements surface as data instead of test
//! failures.

use num_complex::Complex;

use crate::error::Result;
use crate::fields::left_invariant_generators;
use crate::gauss4::GaussPoly4;
use crate::gft::GroupFourier;
use crate::grid::Grid1D;
use crate::operator::GridOperator;
use crate::rep::RepParams;
use crate::scalar::{cf, rf, Real};
use crate::wavepacket::Wavepacket;

/// Difference-operator context: one representation, one grid.
#[derive(Clone, Debug)]
pub struct DeltaOps<R: Real> {
    rep: RepParams<R>,
    grid: Grid1D<R>,
}

/// How the lower-order difference operators inside the `Delta_{x_4}` formula
/// are computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaPath {
    /// `Delta_{x_2}` and `Delta_{x_3}` through their own formulas (embedded
    /// finite differences).
    Formulas,
    /// Every difference operator through the defining closed form; only the
    /// `d/dlambda` term remains a finite difference.
    Exact,
}

impl<R: Real> DeltaOps<R> {
    pub fn new(rep: RepParams<R>, grid: Grid1D<R>) -> Self {
        Self { rep, grid }
    }

    pub fn rep(&self) -> &RepParams<R> {
        &self.rep
    }

    pub fn grid(&self) -> &Grid1D<R> {
        &self.grid
    }

    /// The transform `pi(kappa)` itself.
    pub fn transform(&self, kappa: &GaussPoly4<R>) -> GridOperator<R> {
        GroupFourier::new(kappa, self.rep).to_operator(&self.grid)
    }

    /// The defining path: `pi` applied to a coordinate-multiplied kernel.
    /// `expo` lists the multiplicity of each coordinate, so
    /// `[1, 0, 2, 0]` computes `pi(x1 x3^2 kappa)`.
    pub fn direct_multi(&self, expo: [u16; 4], kappa: &GaussPoly4<R>) -> GridOperator<R> {
        self.transform(&kappa.mul_monomial(expo))
    }

    /// `Delta_{x_i} pi(kappa)` by definition (`i` zero-based).
    pub fn direct(&self, i: usize, kappa: &GaussPoly4<R>) -> GridOperator<R> {
        let mut expo = [0u16; 4];
        expo[i] = 1;
        self.direct_multi(expo, kappa)
    }

    /// Commutator formula for `Delta_{x_1}`.
    pub fn x1_formula(&self, kappa: &GaussPoly4<R>) -> GridOperator<R> {
        let a = self.transform(kappa);
        let d3 = self.rep.generator(&self.grid, 2);
        let comm = d3.commutator(&a).expect("same grid");
        comm.scale(cf::<R>(0.0, 1.0) / Complex::new(self.rep.lambda(), R::zero()))
    }

    /// `mu`-derivative formula for `Delta_{x_2}`, Richardson-extrapolated
    /// central difference with base step `step`.
    pub fn x2_formula(&self, kappa: &GaussPoly4<R>, step: R) -> GridOperator<R> {
        let two_lambda_over_i = cf::<R>(0.0, -2.0) * Complex::new(self.rep.lambda(), R::zero());
        self.mu_derivative(kappa, step).scale(two_lambda_over_i)
    }

    /// `Delta_{x_3}` through the generator formula; the embedded
    /// `mu`-difference uses `step`.
    pub fn x3_formula(&self, kappa: &GaussPoly4<R>, step: R) -> GridOperator<R> {
        let a = self.transform(kappa);
        let d1 = self.rep.generator(&self.grid, 0);
        let d3 = self.rep.generator(&self.grid, 2);
        let delta2 = self.x2_formula(kappa, step);
        let inner = delta2
            .compose(&d3)
            .and_then(|t| t.add(&a.compose(&d1)?))
            .and_then(|t| t.sub(&d1.compose(&a)?))
            .expect("same grid");
        inner.scale(cf::<R>(0.0, 1.0) / Complex::new(self.rep.lambda(), R::zero()))
    }

    /// The six-term formula for `Delta_{x_4}`.  `step_mu` drives the
    /// embedded `mu`-differences when `path` is [`DeltaPath::Formulas`];
    /// `step_lambda` drives the (always finite-difference) `d/dlambda`.
    pub fn x4_formula(
        &self,
        kappa: &GaussPoly4<R>,
        step_mu: R,
        step_lambda: R,
        path: DeltaPath,
    ) -> Result<GridOperator<R>> {
        let lambda = self.rep.lambda();
        let mu = self.rep.mu();
        let (delta2, delta3) = match path {
            DeltaPath::Formulas => (
                self.x2_formula(kappa, step_mu),
                self.x3_formula(kappa, step_mu),
            ),
            DeltaPath::Exact => (self.direct(1, kappa), self.direct(2, kappa)),
        };
        let d31 = self.direct_multi([1, 0, 1, 0], kappa);
        let d21 = self.direct_multi([1, 1, 0, 0], kappa);
        let d211 = self.direct_multi([2, 1, 0, 0], kappa);

        let mult_u = GridOperator::diagonal(self.grid.clone(), |u| Complex::new(u, R::zero()));
        let half = rf::<R>(0.5);
        let coeff = mu / (rf::<R>(2.0) * lambda * lambda);
        let weight = GridOperator::diagonal(self.grid.clone(), move |u| {
            Complex::new(coeff + half * u * u, R::zero())
        });

        let dlambda = self
            .lambda_derivative(kappa, step_lambda)?
            .scale(cf::<R>(0.0, 1.0));
        dlambda
            .sub(&weight.compose(&delta2)?)?
            .add(&mult_u.compose(&delta3)?)?
            .sub(&d31)?
            .add(&mult_u.compose(&d21)?)?
            .sub(&d211.scale(Complex::new(half, R::zero())))
    }

    /// Richardson-extrapolated central `mu`-difference of the transform.
    fn mu_derivative(&self, kappa: &GaussPoly4<R>, step: R) -> GridOperator<R> {
        let at = |mu: R| {
            let rep = RepParams::new(self.rep.lambda(), mu).expect("lambda unchanged");
            GroupFourier::new(kappa, rep).to_operator(&self.grid)
        };
        let mu = self.rep.mu();
        let central = |h: R| {
            at(mu + h)
                .sub(&at(mu - h))
                .expect("same grid")
                .scale(Complex::new(R::one() / (rf::<R>(2.0) * h), R::zero()))
        };
        richardson(central(step), central(step * rf::<R>(0.5)))
    }

    /// Richardson-extrapolated central `lambda`-difference of the transform.
    /// Fails when the step would straddle `lambda = 0`.
    fn lambda_derivative(&self, kappa: &GaussPoly4<R>, step: R) -> Result<GridOperator<R>> {
        let lambda = self.rep.lambda();
        let at = |l: R| -> Result<GridOperator<R>> {
            let rep = RepParams::new(l, self.rep.mu())?;
            Ok(GroupFourier::new(kappa, rep).to_operator(&self.grid))
        };
        let central = |h: R| -> Result<GridOperator<R>> {
            if (lambda + h) * (lambda - h) <= R::zero() {
                return Err(crate::error::Error::LambdaZero);
            }
            Ok(at(lambda + h)?
                .sub(&at(lambda - h)?)
                .expect("same grid")
                .scale(Complex::new(R::one() / (rf::<R>(2.0) * h), R::zero())))
        };
        Ok(richardson(central(step)?, central(step * rf::<R>(0.5))?))
    }
}

/// Eliminates the leading quadratic error term from two central differences
/// at steps `h` and `h/2`.
pub(crate) fn richardson<R: Real>(coarse: GridOperator<R>, fine: GridOperator<R>) -> GridOperator<R> {
    let third = R::one() / rf::<R>(3.0);
    fine.scale(Complex::new(rf::<R>(4.0) * third, R::zero()))
        .sub(&coarse.scale(Complex::new(third, R::zero())))
        .expect("same grid")
}

/// Neville extrapolation of operator values `f(nodes[k])` to `f(0)`.
fn extrapolate_to_zero<R: Real>(nodes: &[R], values: Vec<GridOperator<R>>) -> GridOperator<R> {
    assert_eq!(nodes.len(), values.len());
    let mut table = values;
    for m in 1..nodes.len() {
        for k in 0..(nodes.len() - m) {
            let denom = nodes[k + m] - nodes[k];
            let right = table[k + 1].scale(Complex::new(-nodes[k] / denom, R::zero()));
            let left = table[k].scale(Complex::new(nodes[k + m] / denom, R::zero()));
            table[k] = left.add(&right).expect("same grid");
        }
    }
    table.swap_remove(0)
}

/// A multiplication operator with polynomial coefficient
/// `c0 + c1 u + c2 u^2`, the value class appearing in the example table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultPoly<R: Real> {
    pub coeffs: [R; 3],
}

impl<R: Real> MultPoly<R> {
    pub fn scalar(c: R) -> Self {
        Self {
            coeffs: [c, R::zero(), R::zero()],
        }
    }

    pub fn zero() -> Self {
        Self::scalar(R::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == R::zero())
    }

    pub fn to_operator(&self, grid: &Grid1D<R>) -> GridOperator<R> {
        let [c0, c1, c2] = self.coeffs;
        GridOperator::diagonal(grid.clone(), move |u| {
            Complex::new(c0 + c1 * u + c2 * u * u, R::zero())
        })
    }

    /// Rough size of the coefficient function on the unit scale, used to
    /// normalize deviations.
    fn magnitude(&self) -> R {
        self.coeffs
            .iter()
            .fold(R::zero(), |acc, c| acc + c.abs())
    }
}

impl<R: Real> std::fmt::Display for MultPoly<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let [c0, c1, c2] = self.coeffs;
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = Vec::new();
        if c0 != R::zero() {
            parts.push(format!("({c0}) I"));
        }
        if c1 != R::zero() {
            parts.push(format!("({c1}) u"));
        }
        if c2 != R::zero() {
            parts.push(format!("({c2}) u^2"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// One cell of the example table `Delta_{x_i} pi(X_j)`.
#[derive(Clone, Debug)]
pub struct TableCell<R: Real> {
    /// One-based coordinate index of the difference operator.
    pub i: usize,
    /// One-based generator index.
    pub j: usize,
    /// Claimed values for this cell (one entry is stated twice with
    /// different values, one not at all).
    pub claimed: Vec<MultPoly<R>>,
    /// The product-rule value `-delta_{ij} I`.
    pub product_rule: MultPoly<R>,
    /// Relative deviation of the measured limit from each claimed value.
    pub measured_vs_claimed: Vec<R>,
    /// Relative deviation of the measured limit from the product rule.
    pub measured_vs_product_rule: R,
}

impl<R: Real> TableCell<R> {
    /// A cell is contested when the stated values disagree among themselves
    /// or with the product rule.
    pub fn contested(&self) -> bool {
        self.claimed.len() != 1 || self.claimed[0] != self.product_rule
    }
}

/// The claimed table.  An empty vector marks the one missing cell.
fn claimed_cell<R: Real>(i: usize, j: usize, lambda: R, mu: R) -> Vec<MultPoly<R>> {
    let one = R::one();
    match (i, j) {
        (1, 1) => vec![MultPoly::scalar(-one)],
        (2, 2) => vec![MultPoly::scalar(-lambda)],
        (3, 2) => vec![MultPoly {
            coeffs: [R::zero(), one - lambda, R::zero()],
        }],
        (3, 3) => vec![MultPoly::scalar(-one)],
        (4, 2) => vec![MultPoly {
            coeffs: [
                mu / (rf::<R>(2.0) * lambda),
                R::zero(),
                (one - lambda) * rf::<R>(0.5),
            ],
        }],
        (4, 3) => vec![],
        (4, 4) => vec![MultPoly::zero(), MultPoly::scalar(-one)],
        _ => vec![MultPoly::zero()],
    }
}

/// Normalized Gaussian approximate identity of width `eps`.
fn delta_approximant<R: Real>(eps: R) -> GaussPoly4<R> {
    let alpha = Complex::new(R::one() / (rf::<R>(2.0) * eps * eps), R::zero());
    let g = GaussPoly4::product_gaussian([alpha; 4], [R::zero(); 4], [R::zero(); 4]);
    // Mass one: divide by (2 pi eps^2)^2.
    let norm = rf::<R>(std::f64::consts::TAU) * eps * eps;
    g.scale(Complex::new(R::one() / (norm * norm), R::zero()))
}

/// Measures the whole example table by extrapolating in the squared width
/// of the delta approximant, comparing each measured operator with the
/// stated and product-rule values on localized test vectors.
///
/// The test vectors stay narrow on purpose: the approximation error carries
/// factors of the quadratic generator symbol, so wide packets push mass into
/// regions where the width expansion converges slowly.
pub fn delta_table<R: Real>(
    rep: RepParams<R>,
    grid: &Grid1D<R>,
    widths: &[R],
) -> Vec<TableCell<R>> {
    let ops = DeltaOps::new(rep, grid.clone());
    let fields = left_invariant_generators::<R>();
    let packets = [
        Wavepacket::coherent(rf::<R>(0.5), rf::<R>(0.6), rf::<R>(-0.3)),
        Wavepacket::coherent(rf::<R>(-0.4), rf::<R>(0.5), rf::<R>(0.9)),
    ];
    let samples: Vec<_> = packets.iter().map(|p| p.sample(grid)).collect();
    let nodes: Vec<R> = widths.iter().map(|&e| e * e).collect();

    let mut cells = Vec::with_capacity(16);
    for i in 1..=4usize {
        for j in 1..=4usize {
            // pi(x_i X_j G_eps) for each width, extrapolated to eps^2 = 0.
            let measure = |eps: &R| {
                let kernel = delta_approximant(*eps).apply_diffop(&fields[j - 1], |&c| {
                    Complex::new(c, R::zero())
                });
                ops.direct(i - 1, &kernel)
            };
            let measured = extrapolate_to_zero(&nodes, widths.iter().map(measure).collect());

            let deviation = |target: &MultPoly<R>| -> R {
                let t = target.to_operator(grid);
                let scale = target.magnitude().max(R::one());
                let mut worst = R::zero();
                for v in &samples {
                    let err = (measured.apply(v) - t.apply(v)).norm() / (v.norm() * scale);
                    worst = worst.max(err);
                }
                worst
            };

            let claimed = claimed_cell(i, j, rep.lambda(), rep.mu());
            let product_rule = if i == j {
                MultPoly::scalar(-R::one())
            } else {
                MultPoly::zero()
            };
            cells.push(TableCell {
                i,
                j,
                measured_vs_claimed: claimed.iter().map(&deviation).collect(),
                measured_vs_product_rule: deviation(&product_rule),
                claimed,
                product_rule,
            });
        }
    }
    cells
}
