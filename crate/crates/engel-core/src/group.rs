//! The Engel group: exact polynomial group law on four coordinates.
//!
//! Points live in coordinates `(x1, x2, x3, x4)` of homogeneous degrees
//! `(1, 1, 2, 3)`.  The product is
//!
//! ```text
//! (x o y)_1 = x1 + y1
//! (x o y)_2 = x2 + y2
//! (x o y)_3 = x3 + y3 - x1 y2
//! (x o y)_4 = x4 + y4 + x1^2 y2 / 2 - x1 y3
//! ```
//!
//! a three-step nilpotent law whose coefficients are dyadic rationals, so all
//! identities here are verified exactly over arbitrary-precision rationals and
//! reused verbatim over floats.

use std::fmt;

use crate::scalar::Scalar;

/// Point of the Engel group in exponential coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement<T: Scalar> {
    pub coords: [T; 4],
}

impl<T: Scalar> GroupElement<T> {
    pub fn new(coords: [T; 4]) -> Self {
        Self { coords }
    }

    /// Builds an element from small rationals, exact in every scalar type.
    pub fn from_ratios(coords: [(i64, i64); 4]) -> Self {
        Self::new(coords.map(|(n, d)| T::from_ratio(n, d)))
    }

    pub fn identity() -> Self {
        Self::new([T::zero(), T::zero(), T::zero(), T::zero()])
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Group product `self o rhs`.
    pub fn multiply(&self, rhs: &Self) -> Self {
        let [x1, x2, x3, x4] = self.coords.clone();
        let [y1, y2, y3, y4] = rhs.coords.clone();
        let half = T::from_ratio(1, 2);
        let z1 = x1.clone() + y1;
        let z2 = x2.clone() + y2.clone();
        let z3 = x3 + y3.clone() - x1.clone() * y2.clone();
        let z4 = x4 + y4 + half * x1.clone() * x1.clone() * y2 - x1 * y3;
        Self::new([z1, z2, z3, z4])
    }

    /// Group inverse in closed form.
    ///
    /// Satisfies `x o x^{-1} = x^{-1} o x = identity` exactly.
    pub fn inverse(&self) -> Self {
        let [x1, x2, x3, x4] = self.coords.clone();
        let half = T::from_ratio(1, 2);
        let z1 = -x1.clone();
        let z2 = -x2.clone();
        let z3 = -(x3.clone() + x1.clone() * x2.clone());
        let z4 = -(x4 + half * x1.clone() * x1.clone() * x2 + x1 * x3);
        Self::new([z1, z2, z3, z4])
    }

    /// Anisotropic dilation `(r x1, r x2, r^2 x3, r^3 x4)`.
    ///
    /// For every scalar `r` this is a group automorphism; the homogeneous
    /// degrees `(1, 1, 2, 3)` sum to the homogeneous dimension 7.
    pub fn dilate(&self, r: &T) -> Self {
        let r2 = r.clone() * r.clone();
        let r3 = r2.clone() * r.clone();
        let [x1, x2, x3, x4] = self.coords.clone();
        Self::new([r.clone() * x1, r.clone() * x2, r2 * x3, r3 * x4])
    }

    /// Conjugation `self o rhs o self^{-1}`.
    pub fn conjugate(&self, rhs: &Self) -> Self {
        self.multiply(rhs).multiply(&self.inverse())
    }
}

/// Homogeneous degrees of the four coordinates under [`GroupElement::dilate`].
pub const COORD_DEGREES: [u32; 4] = [1, 1, 2, 3];

/// Homogeneous dimension (sum of the coordinate degrees).
pub const HOMOGENEOUS_DIMENSION: u32 = 7;

/// Jacobian matrix of left translation `y -> x o y` at `y = 0`.
///
/// Row `i`, column `j` holds the partial derivative of coordinate `i` of
/// `x o y` with respect to `y_j`, evaluated at the identity.  Its determinant
/// is 1 (Lebesgue measure is the bi-invariant Haar measure).
pub fn jacobian_left_translation<T: Scalar>(x: &GroupElement<T>) -> [[T; 4]; 4] {
    let o = T::zero;
    let l = T::one;
    let x1 = x.coords[0].clone();
    let half_x1_sq = T::from_ratio(1, 2) * x1.clone() * x1.clone();
    [
        [l(), o(), o(), o()],
        [o(), l(), o(), o()],
        [o(), -x1.clone(), l(), o()],
        [o(), half_x1_sq, -x1, l()],
    ]
}

/// Jacobian matrix of right translation `y -> y o x` at `y = 0`.
///
/// Same orientation as [`jacobian_left_translation`]; also unimodular.
pub fn jacobian_right_translation<T: Scalar>(x: &GroupElement<T>) -> [[T; 4]; 4] {
    let o = T::zero;
    let l = T::one;
    let x2 = x.coords[1].clone();
    let x3 = x.coords[2].clone();
    [
        [l(), o(), o(), o()],
        [o(), l(), o(), o()],
        [-x2, o(), l(), o()],
        [-x3, o(), o(), l()],
    ]
}

impl<T: Scalar> fmt::Display for GroupElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            self.coords[0], self.coords[1], self.coords[2], self.coords[3]
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Zero;
    use proptest::prelude::*;

    type Q = BigRational;
    type GQ = GroupElement<Q>;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    fn gq(c: [(i64, i64); 4]) -> GQ {
        GQ::from_ratios(c)
    }

    /// Dual number `re + eps * d` with `eps^2 = 0`, used to differentiate the
    /// group law symbolically without writing a second implementation of it.
    #[derive(Clone, Debug, PartialEq)]
    struct Dual {
        re: Q,
        d: Q,
    }

    impl Dual {
        fn var(re: Q) -> Self {
            Dual { re, d: Q::from_int(0) }
        }

        fn eps() -> Self {
            Dual { re: Q::from_int(0), d: Q::from_int(1) }
        }
    }

    impl std::fmt::Display for Dual {
        fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
            write!(f, "{}+{}e", self.re, self.d)
        }
    }

    impl std::ops::Add for Dual {
        type Output = Dual;
        fn add(self, rhs: Dual) -> Dual {
            Dual { re: self.re + rhs.re, d: self.d + rhs.d }
        }
    }

    impl std::ops::Sub for Dual {
        type Output = Dual;
        fn sub(self, rhs: Dual) -> Dual {
            Dual { re: self.re - rhs.re, d: self.d - rhs.d }
        }
    }

    impl std::ops::Mul for Dual {
        type Output = Dual;
        fn mul(self, rhs: Dual) -> Dual {
            Dual {
                re: self.re.clone() * rhs.re.clone(),
                d: self.re * rhs.d + self.d * rhs.re,
            }
        }
    }

    impl std::ops::Neg for Dual {
        type Output = Dual;
        fn neg(self) -> Dual {
            Dual { re: -self.re, d: -self.d }
        }
    }

    impl num_traits::Zero for Dual {
        fn zero() -> Self {
            Dual::var(Q::from_int(0))
        }
        fn is_zero(&self) -> bool {
            self.re.is_zero() && self.d.is_zero()
        }
    }

    impl num_traits::One for Dual {
        fn one() -> Self {
            Dual::var(Q::from_int(1))
        }
    }

    impl Scalar for Dual {
        fn from_ratio(num: i64, den: i64) -> Self {
            Dual::var(Q::from_ratio(num, den))
        }
    }

    #[test]
    fn multiply_matches_worked_example() {
        let x = gq([(1, 1), (2, 1), (3, 1), (4, 1)]);
        let y = gq([(5, 1), (6, 1), (7, 1), (8, 1)]);
        let expected = gq([(6, 1), (8, 1), (4, 1), (8, 1)]);
        assert_eq!(x.multiply(&y), expected);
    }

    #[test]
    fn inverse_matches_closed_form_and_cancels() {
        let x = gq([(1, 1), (2, 1), (3, 1), (4, 1)]);
        let inv = x.inverse();
        assert_eq!(inv, gq([(-1, 1), (-2, 1), (-5, 1), (-8, 1)]));
        assert!(x.multiply(&inv).is_identity());
        assert!(inv.multiply(&x).is_identity());
    }

    #[test]
    fn identity_is_neutral() {
        let x = gq([(3, 2), (-1, 3), (7, 5), (-2, 7)]);
        let e = GQ::identity();
        assert_eq!(x.multiply(&e), x);
        assert_eq!(e.multiply(&x), x);
    }

    #[test]
    fn dilation_is_an_automorphism_exactly() {
        let x = gq([(1, 2), (2, 3), (-3, 1), (5, 7)]);
        let y = gq([(-2, 5), (1, 1), (4, 3), (-1, 2)]);
        for r in [q(2, 1), q(-3, 2), q(1, 7)] {
            let lhs = x.multiply(&y).dilate(&r);
            let rhs = x.dilate(&r).multiply(&y.dilate(&r));
            assert_eq!(lhs, rhs, "dilation by {r} failed to commute with the product");
        }
    }

    #[test]
    fn jacobians_match_dual_number_differentiation() {
        let x = gq([(3, 2), (-5, 3), (7, 4), (-1, 6)]);
        let xd = GroupElement::<Dual>::new(x.coords.clone().map(Dual::var));
        let left = jacobian_left_translation(&x);
        let right = jacobian_right_translation(&x);
        for j in 0..4 {
            let mut dir = GroupElement::<Dual>::identity();
            dir.coords[j] = Dual::eps();
            let dz_left = xd.multiply(&dir);
            let dz_right = dir.multiply(&xd);
            for i in 0..4 {
                assert_eq!(dz_left.coords[i].d, left[i][j], "left Jacobian entry ({i},{j})");
                assert_eq!(dz_right.coords[i].d, right[i][j], "right Jacobian entry ({i},{j})");
            }
        }
    }

    #[test]
    fn jacobians_are_unit_lower_triangular() {
        let x = gq([(9, 1), (-4, 3), (1, 8), (6, 5)]);
        for jac in [jacobian_left_translation(&x), jacobian_right_translation(&x)] {
            for i in 0..4 {
                assert_eq!(jac[i][i], Q::from_int(1));
                for j in (i + 1)..4 {
                    assert!(jac[i][j].is_zero(), "entry ({i},{j}) above the diagonal");
                }
            }
        }
    }

    fn arb_element() -> impl Strategy<Value = GQ> {
        let coord = (-9i64..=9, 1i64..=9).prop_map(|(n, d)| q(n, d));
        [coord.clone(), coord.clone(), coord.clone(), coord].prop_map(GQ::new)
    }

    proptest! {
        #[test]
        fn product_is_associative(x in arb_element(), y in arb_element(), z in arb_element()) {
            prop_assert_eq!(x.multiply(&y).multiply(&z), x.multiply(&y.multiply(&z)));
        }

        #[test]
        fn inverse_cancels(x in arb_element()) {
            prop_assert!(x.multiply(&x.inverse()).is_identity());
            prop_assert!(x.inverse().multiply(&x).is_identity());
        }

        #[test]
        fn inverse_reverses_products(x in arb_element(), y in arb_element()) {
            prop_assert_eq!(x.multiply(&y).inverse(), y.inverse().multiply(&x.inverse()));
        }
    }

    #[test]
    fn float_law_agrees_with_rational_law() {
        let xq = gq([(1, 3), (2, 7), (-4, 5), (9, 2)]);
        let yq = gq([(-5, 6), (3, 4), (1, 9), (-2, 3)]);
        let xf = GroupElement::<f64>::from_ratios([(1, 3), (2, 7), (-4, 5), (9, 2)]);
        let yf = GroupElement::<f64>::from_ratios([(-5, 6), (3, 4), (1, 9), (-2, 3)]);
        let zq = xq.multiply(&yq);
        let zf = xf.multiply(&yf);
        for i in 0..4 {
            let want = zq.coords[i].numer().to_string().parse::<f64>().unwrap()
                / zq.coords[i].denom().to_string().parse::<f64>().unwrap();
            assert!((zf.coords[i] - want).abs() < 1e-14);
        }
    }
}
