//! Sparse polynomials in the four group coordinates.
//!
//! Keys are exponent vectors `[e1, e2, e3, e4]`, values are coefficients in
//! any [`Scalar`] ring.  The map is kept canonical: no explicit zero
//! coefficients are stored, so `==` decides polynomial identity exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// Exponent vector of a monomial in `x1..x4`.
pub type Expo = [u16; 4];

/// Sparse polynomial in the coordinates `x1, x2, x3, x4`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly4<T: Scalar> {
    terms: BTreeMap<Expo, T>,
}

impl<T: Scalar> Poly4<T> {
    pub fn new() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn constant(c: T) -> Self {
        let mut p = Self::new();
        p.add_term([0; 4], c);
        p
    }

    /// The coordinate polynomial `x_i` (zero-based index).
    pub fn var(i: usize) -> Self {
        assert!(i < 4, "coordinate index out of range");
        let mut expo = [0u16; 4];
        expo[i] = 1;
        Self::monomial(expo, T::one())
    }

    pub fn monomial(expo: Expo, coeff: T) -> Self {
        let mut p = Self::new();
        p.add_term(expo, coeff);
        p
    }

    /// Adds `coeff * x^expo`, dropping the entry if it cancels to zero.
    pub fn add_term(&mut self, expo: Expo, coeff: T) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(expo) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    e.insert(sum);
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Expo, &T)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, expo: &Expo) -> T {
        self.terms.get(expo).cloned().unwrap_or_else(T::zero)
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::new();
        for (e, a) in &self.terms {
            out.add_term(*e, a.clone() * c.clone());
        }
        out
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&k| k as u32).sum())
            .max()
    }

    pub fn eval(&self, x: &[T; 4]) -> T {
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    term = term * x[i].clone();
                }
            }
            acc = acc + term;
        }
        acc
    }

    /// Formal partial derivative with respect to `x_{i+1}`.
    pub fn partial_derivative(&self, i: usize) -> Self {
        assert!(i < 4, "coordinate index out of range");
        let mut out = Self::new();
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut de = *e;
            de[i] -= 1;
            out.add_term(de, c.clone() * T::from_int(e[i] as i64));
        }
        out
    }

    /// Applies a ring map to every coefficient (for example rational to float).
    pub fn map_coeffs<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Poly4<U> {
        let mut out = Poly4::new();
        for (e, c) in &self.terms {
            out.add_term(*e, f(c));
        }
        out
    }
}

impl<T: Scalar> Default for Poly4<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Add for Poly4<T> {
    type Output = Poly4<T>;
    fn add(self, rhs: Poly4<T>) -> Poly4<T> {
        let mut out = self;
        for (e, c) in rhs.terms {
            out.add_term(e, c);
        }
        out
    }
}

impl<T: Scalar> Sub for Poly4<T> {
    type Output = Poly4<T>;
    fn sub(self, rhs: Poly4<T>) -> Poly4<T> {
        let mut out = self;
        for (e, c) in rhs.terms {
            out.add_term(e, -c);
        }
        out
    }
}

impl<T: Scalar> Neg for Poly4<T> {
    type Output = Poly4<T>;
    fn neg(self) -> Poly4<T> {
        let mut out = Poly4::new();
        for (e, c) in self.terms {
            out.add_term(e, -c);
        }
        out
    }
}

impl<T: Scalar> Mul for Poly4<T> {
    type Output = Poly4<T>;
    fn mul(self, rhs: Poly4<T>) -> Poly4<T> {
        &self * &rhs
    }
}

impl<T: Scalar> Mul for &Poly4<T> {
    type Output = Poly4<T>;
    fn mul(self, rhs: &Poly4<T>) -> Poly4<T> {
        let mut out = Poly4::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<T: Scalar> Zero for Poly4<T> {
    fn zero() -> Self {
        Self::new()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<T: Scalar> One for Poly4<T> {
    fn one() -> Self {
        Self::constant(T::one())
    }
}

/// Polynomials form a `Scalar` ring themselves, which lets the group law run
/// with symbolic coordinates (exact identities in the coordinate variables).
impl<T: Scalar> Scalar for Poly4<T> {
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::constant(T::from_ratio(num, den))
    }
}

impl<T: Scalar> fmt::Display for Poly4<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupElement;
    use num_rational::BigRational;

    type Q = BigRational;
    type P = Poly4<Q>;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    #[test]
    fn arithmetic_keeps_canonical_form() {
        let p = P::var(0) + P::constant(q(1, 2));
        let m = p.clone() - p.clone();
        assert!(m.is_zero());
        assert_eq!(m.num_terms(), 0);
    }

    #[test]
    fn product_expands_binomial() {
        // (x1 + x2)^2 = x1^2 + 2 x1 x2 + x2^2
        let s = P::var(0) + P::var(1);
        let sq = &s * &s;
        assert_eq!(sq.coefficient(&[2, 0, 0, 0]), q(1, 1));
        assert_eq!(sq.coefficient(&[1, 1, 0, 0]), q(2, 1));
        assert_eq!(sq.coefficient(&[0, 2, 0, 0]), q(1, 1));
        assert_eq!(sq.num_terms(), 3);
    }

    #[test]
    fn derivative_and_eval_agree() {
        // p = x1^2 x3 - x4 / 3, dp/dx1 = 2 x1 x3
        let p = P::monomial([2, 0, 1, 0], q(1, 1)) - P::monomial([0, 0, 0, 1], q(1, 3));
        let dp = p.partial_derivative(0);
        assert_eq!(dp, P::monomial([1, 0, 1, 0], q(2, 1)));
        let at = [q(2, 1), q(7, 1), q(3, 1), q(9, 1)];
        assert_eq!(p.eval(&at), q(12, 1) - q(3, 1));
        assert_eq!(dp.eval(&at), q(12, 1));
    }

    #[test]
    fn symbolic_coordinates_cancel_inverse_identically() {
        // Run the group law with x_i as indeterminates: x o x^{-1} must be the
        // zero polynomial in all four coordinates, not merely zero pointwise.
        let x = GroupElement::<P>::new([P::var(0), P::var(1), P::var(2), P::var(3)]);
        let prod = x.multiply(&x.inverse());
        for (i, c) in prod.coords.iter().enumerate() {
            assert!(c.is_zero(), "coordinate {} residual: {}", i + 1, c);
        }
        let prod_rev = x.inverse().multiply(&x);
        assert!(prod_rev.coords.iter().all(|c| c.is_zero()));
    }

    #[test]
    fn symbolic_associativity_in_eight_variables() {
        // Treat x as symbolic and y as a second symbolic copy embedded via
        // constants in a nested polynomial ring: Poly4<Poly4<Q>> carries the
        // x-variables in the outer layer and the y-variables in the inner one.
        type PP = Poly4<Poly4<Q>>;
        let xs = GroupElement::<PP>::new([PP::var(0), PP::var(1), PP::var(2), PP::var(3)]);
        let ys = GroupElement::<PP>::new([
            PP::constant(Poly4::var(0)),
            PP::constant(Poly4::var(1)),
            PP::constant(Poly4::var(2)),
            PP::constant(Poly4::var(3)),
        ]);
        let zs = GroupElement::<PP>::new([
            PP::constant(Poly4::constant(q(5, 7))),
            PP::constant(Poly4::constant(q(-2, 3))),
            PP::constant(Poly4::constant(q(1, 4))),
            PP::constant(Poly4::constant(q(8, 5))),
        ]);
        let lhs = xs.multiply(&ys).multiply(&zs);
        let rhs = xs.multiply(&ys.multiply(&zs));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn display_is_readable() {
        let p = P::monomial([2, 1, 0, 0], q(-3, 2)) + P::constant(q(1, 1));
        assert_eq!(p.to_string(), "(1) + (-3/2)*x1^2*x2");
    }
}
