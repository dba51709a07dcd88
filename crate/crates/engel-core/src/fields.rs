//! Differential operators with polynomial coefficients and the invariant
//! vector fields of the group.
//!
//! An operator is a finite sum `sum_a p_a(x) D^a` with `D^a` the partial
//! derivative multi-index and `p_a` a [`Poly4`].  Composition uses the exact
//! Leibniz rule, so every algebraic identity below (brackets, invariance,
//! gradation) is a polynomial identity checked without tolerances.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::Zero;

use crate::group::{jacobian_left_translation, jacobian_right_translation, GroupElement};
use crate::poly::Poly4;
use crate::scalar::Scalar;

/// Derivative multi-index `D^a = d^{a1}_{x1} ... d^{a4}_{x4}`.
pub type DExpo = [u8; 4];

/// Differential operator with polynomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyDiffOp<T: Scalar> {
    terms: BTreeMap<DExpo, Poly4<T>>,
}

impl<T: Scalar> PolyDiffOp<T> {
    pub fn new() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn identity() -> Self {
        Self::term([0; 4], Poly4::constant(T::one()))
    }

    /// The plain partial derivative `d_{x_{i+1}}`.
    pub fn partial(i: usize) -> Self {
        assert!(i < 4, "coordinate index out of range");
        let mut d = [0u8; 4];
        d[i] = 1;
        Self::term(d, Poly4::constant(T::one()))
    }

    /// Single term `p(x) D^a`.
    pub fn term(d: DExpo, p: Poly4<T>) -> Self {
        let mut op = Self::new();
        op.add_assign_term(d, p);
        op
    }

    pub fn add_assign_term(&mut self, d: DExpo, p: Poly4<T>) {
        if p.is_zero() {
            return;
        }
        match self.terms.entry(d) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + p;
                if sum.is_zero() {
                    e.remove();
                } else {
                    e.insert(sum);
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DExpo, &Poly4<T>)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest total derivative order appearing with a nonzero coefficient.
    pub fn order(&self) -> u32 {
        self.terms
            .keys()
            .map(|d| d.iter().map(|&k| k as u32).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::new();
        for (d, p) in &self.terms {
            out.add_assign_term(*d, p.scale(c));
        }
        out
    }

    /// Multiplies on the left by the polynomial `q(x)`.
    pub fn premultiply(&self, q: &Poly4<T>) -> Self {
        let mut out = Self::new();
        for (d, p) in &self.terms {
            out.add_assign_term(*d, q * p);
        }
        out
    }

    /// Applies the operator to a polynomial.
    pub fn apply(&self, f: &Poly4<T>) -> Poly4<T> {
        let mut out = Poly4::zero();
        for (d, p) in &self.terms {
            out = out + p * &derive_poly(f, d);
        }
        out
    }

    /// Operator composition: `(self.compose(rhs))(f) = self(rhs(f))`.
    ///
    /// Expanded with the Leibniz rule so the result is again in normal form
    /// (coefficients to the left of the derivatives).
    pub fn compose(&self, rhs: &Self) -> Self {
        let mut out = Self::new();
        for (a, p) in &self.terms {
            for (b, q) in &rhs.terms {
                for c in sub_indices(a) {
                    let dq = derive_poly(q, &c);
                    if dq.is_zero() {
                        continue;
                    }
                    let mut d = [0u8; 4];
                    for i in 0..4 {
                        d[i] = a[i] - c[i] + b[i];
                    }
                    let coeff = multi_binom::<T>(a, &c);
                    out.add_assign_term(d, (p * &dq).scale(&coeff));
                }
            }
        }
        out
    }

    /// Lie bracket in the convention `[A, B] = B A - A B`.
    ///
    /// With this sign the generator relations read `[X1, X2] = X3` and
    /// `[X1, X3] = X4`; all other generator brackets vanish.
    pub fn bracket(&self, rhs: &Self) -> Self {
        rhs.compose(self) - self.compose(rhs)
    }

    /// Coefficient polynomial of `d_{x_{i+1}}` if the operator is a vector
    /// field written in normal form.
    pub fn first_order_coefficient(&self, i: usize) -> Poly4<T> {
        let mut d = [0u8; 4];
        d[i] = 1;
        self.terms.get(&d).cloned().unwrap_or_else(Poly4::zero)
    }

    /// Divergence `sum_i d_i c_i` of a vector field `sum_i c_i d_i`.
    pub fn divergence(&self) -> Poly4<T> {
        let mut div = Poly4::zero();
        for i in 0..4 {
            div = div + self.first_order_coefficient(i).partial_derivative(i);
        }
        div
    }

    /// Evaluates the coefficient vector of a vector field at a point.
    pub fn coefficients_at(&self, x: &[T; 4]) -> [T; 4] {
        std::array::from_fn(|i| self.first_order_coefficient(i).eval(x))
    }

    pub fn map_coeffs<U: Scalar>(&self, f: impl Fn(&T) -> U + Copy) -> PolyDiffOp<U> {
        let mut out = PolyDiffOp::new();
        for (d, p) in &self.terms {
            out.add_assign_term(*d, p.map_coeffs(f));
        }
        out
    }
}

fn derive_poly<T: Scalar>(p: &Poly4<T>, d: &DExpo) -> Poly4<T> {
    let mut out = p.clone();
    for (i, &k) in d.iter().enumerate() {
        for _ in 0..k {
            out = out.partial_derivative(i);
        }
    }
    out
}

fn sub_indices(a: &DExpo) -> Vec<DExpo> {
    let mut out = Vec::new();
    for c1 in 0..=a[0] {
        for c2 in 0..=a[1] {
            for c3 in 0..=a[2] {
                for c4 in 0..=a[3] {
                    out.push([c1, c2, c3, c4]);
                }
            }
        }
    }
    out
}

fn multi_binom<T: Scalar>(a: &DExpo, c: &DExpo) -> T {
    let mut b = 1i64;
    for i in 0..4 {
        b *= binom(a[i] as i64, c[i] as i64);
    }
    T::from_int(b)
}

fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        return 0;
    }
    let mut acc = 1i64;
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

impl<T: Scalar> Default for PolyDiffOp<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Add for PolyDiffOp<T> {
    type Output = PolyDiffOp<T>;
    fn add(self, rhs: PolyDiffOp<T>) -> PolyDiffOp<T> {
        let mut out = self;
        for (d, p) in rhs.terms {
            out.add_assign_term(d, p);
        }
        out
    }
}

impl<T: Scalar> Sub for PolyDiffOp<T> {
    type Output = PolyDiffOp<T>;
    fn sub(self, rhs: PolyDiffOp<T>) -> PolyDiffOp<T> {
        let mut out = self;
        for (d, p) in rhs.terms {
            out.add_assign_term(d, -p);
        }
        out
    }
}

impl<T: Scalar> Neg for PolyDiffOp<T> {
    type Output = PolyDiffOp<T>;
    fn neg(self) -> PolyDiffOp<T> {
        let mut out = PolyDiffOp::new();
        for (d, p) in self.terms {
            out.add_assign_term(d, -p);
        }
        out
    }
}

impl<T: Scalar> fmt::Display for PolyDiffOp<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, p) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "[{p}]")?;
            for (i, &k) in d.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, " d{}", i + 1)?,
                    _ => write!(f, " d{}^{}", i + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

/// The left-invariant frame `X1..X4` used throughout:
///
/// ```text
/// X1 = d1
/// X2 = d2 - x1 d3 + (x1^2 / 2) d4
/// X3 = d3 - x1 d4
/// X4 = d4
/// ```
pub fn left_invariant_generators<T: Scalar>() -> [PolyDiffOp<T>; 4] {
    let x1 = Poly4::<T>::var(0);
    let half_x1_sq = Poly4::monomial([2, 0, 0, 0], T::from_ratio(1, 2));
    let mut x2 = PolyDiffOp::partial(1);
    x2.add_assign_term([0, 0, 1, 0], -x1.clone());
    x2.add_assign_term([0, 0, 0, 1], half_x1_sq);
    let mut x3 = PolyDiffOp::partial(2);
    x3.add_assign_term([0, 0, 0, 1], -x1);
    [PolyDiffOp::partial(0), x2, x3, PolyDiffOp::partial(3)]
}

/// The right-invariant frame agreeing with `X1..X4` at the identity:
///
/// ```text
/// Y1 = d1 - x2 d3 - x3 d4
/// Y2 = d2
/// Y3 = d3
/// Y4 = d4
/// ```
pub fn right_invariant_generators<T: Scalar>() -> [PolyDiffOp<T>; 4] {
    let mut y1 = PolyDiffOp::partial(0);
    y1.add_assign_term([0, 0, 1, 0], -Poly4::var(1));
    y1.add_assign_term([0, 0, 0, 1], -Poly4::var(2));
    [
        y1,
        PolyDiffOp::partial(1),
        PolyDiffOp::partial(2),
        PolyDiffOp::partial(3),
    ]
}

/// Sub-Laplacian `X1^2 + X2^2` as an exact second-order operator.
pub fn sublaplacian<T: Scalar>() -> PolyDiffOp<T> {
    let [x1, x2, _, _] = left_invariant_generators::<T>();
    x1.compose(&x1) + x2.compose(&x2)
}

/// Outcome of an exact invariance check of a vector field.
#[derive(Clone, Debug)]
pub struct InvarianceCheck<T: Scalar> {
    /// Residual coefficient polynomials; all zero iff the field is invariant.
    pub residuals: [Poly4<T>; 4],
}

impl<T: Scalar> InvarianceCheck<T> {
    pub fn is_invariant(&self) -> bool {
        self.residuals.iter().all(|p| p.is_zero())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FieldError {
    #[error("operator of order {order} is not a vector field")]
    NotAVectorField { order: u32 },
}

fn check_vector_field<T: Scalar>(op: &PolyDiffOp<T>) -> Result<(), FieldError> {
    let order = op.order();
    if order != 1 {
        return Err(FieldError::NotAVectorField { order });
    }
    if !op.terms.get(&[0, 0, 0, 0]).map_or(true, Poly4::is_zero) {
        return Err(FieldError::NotAVectorField { order: 0 });
    }
    Ok(())
}

/// Checks exactly that a vector field is left-invariant: its coefficient
/// vector at `x` must be the left-translation Jacobian applied to its
/// coefficient vector at the identity, as an identity of polynomials.
pub fn verify_left_invariance<T: Scalar>(
    op: &PolyDiffOp<T>,
) -> Result<InvarianceCheck<T>, FieldError> {
    check_vector_field(op)?;
    invariance_residuals(op, |x| jacobian_left_translation(x))
}

/// Same as [`verify_left_invariance`] for right translations.
pub fn verify_right_invariance<T: Scalar>(
    op: &PolyDiffOp<T>,
) -> Result<InvarianceCheck<T>, FieldError> {
    check_vector_field(op)?;
    invariance_residuals(op, |x| jacobian_right_translation(x))
}

fn invariance_residuals<T: Scalar>(
    op: &PolyDiffOp<T>,
    jacobian: impl Fn(&GroupElement<Poly4<T>>) -> [[Poly4<T>; 4]; 4],
) -> Result<InvarianceCheck<T>, FieldError> {
    // Promote the coordinates to symbolic variables and compare coefficient
    // polynomials on both sides of the push-forward identity.
    let x_sym = GroupElement::new([
        Poly4::<T>::var(0),
        Poly4::var(1),
        Poly4::var(2),
        Poly4::var(3),
    ]);
    let jac = jacobian(&x_sym);
    let zero = [T::zero(), T::zero(), T::zero(), T::zero()];
    let at_zero = op.coefficients_at(&zero);
    let residuals = std::array::from_fn(|i| {
        let mut pushed = Poly4::zero();
        for j in 0..4 {
            pushed = pushed + jac[i][j].scale(&at_zero[j]);
        }
        op.first_order_coefficient(i) - pushed
    });
    Ok(InvarianceCheck { residuals })
}

/// Structure report for the graded Lie algebra spanned by `X1..X4`.
#[derive(Clone, Debug)]
pub struct GradationReport {
    /// Dimensions of the lower central series `g, [g,g], [g,[g,g]], ...`
    /// until it vanishes.
    pub series_dims: Vec<usize>,
    /// Nilpotency step (first power of the series that is zero).
    pub step: usize,
    /// Rank of the span of `X1, X2` together with their iterated brackets.
    pub hormander_rank: usize,
    /// Whether the layers of degrees 1, 2, 3 bracket into each other as a
    /// stratification: `[V1, V1] = V2`, `[V1, V2] = V3`, `[V1, V3] = 0`.
    pub stratified: bool,
}

impl GradationReport {
    pub fn is_valid(&self) -> bool {
        self.series_dims == vec![4, 2, 1] && self.step == 3 && self.hormander_rank == 4 && self.stratified
    }
}

/// Expands a constant-coefficient field in the basis `X1..X4`, if possible.
///
/// Returns the coordinates when `op` equals the corresponding combination
/// exactly, `None` otherwise.
pub fn in_generator_span<T: Scalar>(op: &PolyDiffOp<T>) -> Option<[T; 4]> {
    let gens = left_invariant_generators::<T>();
    let zero = [T::zero(), T::zero(), T::zero(), T::zero()];
    let coords = op.coefficients_at(&zero);
    let mut combo = PolyDiffOp::new();
    for (c, g) in coords.iter().zip(&gens) {
        combo = combo + g.scale(c);
    }
    (&combo == op).then_some(coords)
}

/// Verifies the graded structure of the algebra exactly.
pub fn verify_gradation<T: Scalar>() -> GradationReport {
    let gens = left_invariant_generators::<T>();
    let basis_coords = |ops: &[PolyDiffOp<T>]| -> Vec<[T; 4]> {
        ops.iter()
            .map(|op| in_generator_span(op).expect("bracket left the generator span"))
            .collect()
    };

    // Lower central series via exhaustive generator brackets.
    let mut series_dims = vec![4usize];
    let mut layer: Vec<PolyDiffOp<T>> = gens.to_vec();
    let mut step = 0;
    loop {
        let mut next = Vec::new();
        for g in &gens {
            for h in &layer {
                let br = g.bracket(h);
                if !br.is_zero() {
                    next.push(br);
                }
            }
        }
        if next.is_empty() {
            step = series_dims.len();
            break;
        }
        let dim = rank_of(&basis_coords(&next));
        series_dims.push(dim);
        layer = next;
        if series_dims.len() > 8 {
            break; // not nilpotent; report what we saw
        }
    }

    // Hoermander condition from the horizontal fields alone.
    let x3 = gens[0].bracket(&gens[1]);
    let x4 = gens[0].bracket(&x3);
    let horizontal = vec![gens[0].clone(), gens[1].clone(), x3.clone(), x4.clone()];
    let hormander_rank = rank_of(&basis_coords(&horizontal));

    // Stratification: V1 = span{X1, X2}, V2 = span{X3}, V3 = span{X4}.
    let v1v1 = [gens[0].bracket(&gens[1])];
    let v1v2 = [gens[0].bracket(&gens[2]), gens[1].bracket(&gens[2])];
    let v1v3 = [gens[0].bracket(&gens[3]), gens[1].bracket(&gens[3])];
    let v2v2: [PolyDiffOp<T>; 1] = [gens[2].bracket(&gens[2])];
    let in_layer = |ops: &[PolyDiffOp<T>], lo: usize, hi: usize| {
        ops.iter().all(|op| {
            in_generator_span(op).is_some_and(|c| {
                c.iter()
                    .enumerate()
                    .all(|(i, ci)| (lo..=hi).contains(&i) || ci.is_zero())
            })
        })
    };
    let stratified = in_layer(&v1v1, 2, 2)
        && v1v1.iter().any(|op| !op.is_zero())
        && in_layer(&v1v2, 3, 3)
        && v1v2.iter().any(|op| !op.is_zero())
        && v1v3.iter().all(|op| op.is_zero())
        && v2v2.iter().all(|op| op.is_zero());

    GradationReport {
        series_dims,
        step,
        hormander_rank,
        stratified,
    }
}

/// Rank of a list of exact coordinate vectors via fraction-free elimination.
fn rank_of<T: Scalar>(rows: &[[T; 4]]) -> usize {
    let mut m: Vec<[T; 4]> = rows.to_vec();
    let mut rank = 0;
    for col in 0..4 {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let pv = m[rank].clone();
        for r in (rank + 1)..m.len() {
            let factor = m[r][col].clone();
            if factor.is_zero() {
                continue;
            }
            for c in 0..4 {
                m[r][c] = m[r][c].clone() * pv[col].clone() - pv[c].clone() * factor.clone();
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    #[test]
    fn generator_brackets_close_the_algebra() {
        let [x1, x2, x3, x4] = left_invariant_generators::<Q>();
        assert_eq!(x1.bracket(&x2), x3, "[X1, X2] = X3");
        assert_eq!(x1.bracket(&x3), x4, "[X1, X3] = X4");
        for (a, b) in [
            (&x1, &x4),
            (&x2, &x3),
            (&x2, &x4),
            (&x3, &x4),
        ] {
            assert!(a.bracket(b).is_zero(), "[{a}, {b}] should vanish");
        }
    }

    #[test]
    fn apply_matches_hand_computation() {
        let [_, x2, _, _] = left_invariant_generators::<Q>();
        let result = x2.apply(&Poly4::var(2));
        assert_eq!(result, -Poly4::var(0), "X2 x3 = -x1");
        let sq = x2.apply(&(Poly4::<Q>::var(2) * Poly4::var(2)));
        let expected = Poly4::monomial([1, 0, 1, 0], q(-2, 1));
        assert_eq!(sq, expected, "X2 x3^2 = -2 x1 x3");
    }

    #[test]
    fn left_fields_pass_and_right_fields_fail_left_invariance() {
        for (i, x) in left_invariant_generators::<Q>().iter().enumerate() {
            let check = verify_left_invariance(x).unwrap();
            assert!(check.is_invariant(), "X{} residual {:?}", i + 1, check.residuals);
        }
        let ys = right_invariant_generators::<Q>();
        assert!(!verify_left_invariance(&ys[0]).unwrap().is_invariant());
        assert!(!verify_left_invariance(&ys[1]).unwrap().is_invariant());
        assert!(!verify_left_invariance(&ys[2]).unwrap().is_invariant());
        // d4 is central, hence invariant on both sides.
        assert!(verify_left_invariance(&ys[3]).unwrap().is_invariant());
    }

    #[test]
    fn right_fields_pass_right_invariance() {
        for (i, y) in right_invariant_generators::<Q>().iter().enumerate() {
            let check = verify_right_invariance(y).unwrap();
            assert!(check.is_invariant(), "Y{} residual {:?}", i + 1, check.residuals);
        }
    }

    #[test]
    fn invariance_rejects_higher_order_operators() {
        let lap = sublaplacian::<Q>();
        assert!(matches!(
            verify_left_invariance(&lap),
            Err(FieldError::NotAVectorField { order: 2 })
        ));
    }

    #[test]
    fn left_and_right_frames_commute() {
        let xs = left_invariant_generators::<Q>();
        let ys = right_invariant_generators::<Q>();
        for x in &xs {
            for y in &ys {
                assert!(x.bracket(y).is_zero(), "[{x}, {y}] != 0");
            }
        }
    }

    #[test]
    fn jacobi_identity_holds() {
        let gens = left_invariant_generators::<Q>();
        for a in &gens {
            for b in &gens {
                for c in &gens {
                    let total = a.bracket(&b.bracket(c))
                        + b.bracket(&c.bracket(a))
                        + c.bracket(&a.bracket(b));
                    assert!(total.is_zero());
                }
            }
        }
    }

    #[test]
    fn gradation_report_is_valid() {
        let report = verify_gradation::<Q>();
        assert_eq!(report.series_dims, vec![4, 2, 1]);
        assert_eq!(report.step, 3);
        assert_eq!(report.hormander_rank, 4);
        assert!(report.stratified);
        assert!(report.is_valid());
    }

    #[test]
    fn generators_are_divergence_free() {
        for x in left_invariant_generators::<Q>() {
            assert!(x.divergence().is_zero());
        }
        for y in right_invariant_generators::<Q>() {
            assert!(y.divergence().is_zero());
        }
    }

    #[test]
    fn sublaplacian_expands_in_normal_form() {
        // X1^2 + X2^2 = d1^2 + (d2 - x1 d3 + x1^2/2 d4)^2 expanded:
        // d2^2 + x1^2 d3^2 + x1^4/4 d4^2 - 2 x1 d2 d3 + x1^2 d2 d4
        // - x1^3 d3 d4 + d1^2 (no lower-order terms; the frame is
        // divergence-free).
        let lap = sublaplacian::<Q>();
        assert_eq!(lap.order(), 2);
        let f = Poly4::<Q>::var(3); // x4
        assert!(lap.apply(&f).is_zero(), "L x4 = 0");
        let g = Poly4::<Q>::var(2) * Poly4::var(2); // x3^2
        assert_eq!(lap.apply(&g), Poly4::monomial([2, 0, 0, 0], q(2, 1)), "L x3^2 = 2 x1^2");
        // No zeroth or first order part.
        assert!(lap.terms.get(&[0, 0, 0, 0]).is_none());
        for i in 0..4 {
            let mut d = [0u8; 4];
            d[i] = 1;
            assert!(lap.terms.get(&d).is_none(), "unexpected first-order term d{}", i + 1);
        }
    }

    #[test]
    fn composition_is_associative_on_samples() {
        let [x1, x2, x3, _] = left_invariant_generators::<Q>();
        let a = x2.compose(&x1);
        let lhs = a.compose(&x3);
        let rhs = x2.compose(&x1.compose(&x3));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn generator_span_detection() {
        let [x1, x2, x3, x4] = left_invariant_generators::<Q>();
        let combo = x1.scale(&q(2, 1)) + x3.scale(&q(-1, 3)) + x4.scale(&q(5, 1)) + x2.scale(&q(7, 2));
        let coords = in_generator_span(&combo).unwrap();
        assert_eq!(coords, [q(2, 1), q(7, 2), q(-1, 3), q(5, 1)]);
        let outside = PolyDiffOp::term([0, 0, 1, 0], Poly4::<Q>::var(1)); // x2 d3
        assert!(in_generator_span(&outside).is_none());
    }
}
