//! Gauss-Legendre quadrature with uniform panel subdivision.
//!
//! Nodes and weights are computed by Newton iteration on the Legendre
//! recurrence, so there is no tabulated order limit.  Panel rules keep the
//! truncated improper integrals over the dual parameters honest: doubling the
//! panel count until the result stalls gives a self-validating estimate.

use crate::scalar::{rf, Real};

/// Nodes and weights of the `order`-point Gauss-Legendre rule on `[-1, 1]`.
///
/// Exact for polynomials of degree `2 * order - 1`.
pub fn gauss_legendre<R: Real>(order: usize) -> Vec<(R, R)> {
    assert!(order >= 1, "quadrature order must be positive");
    let n = order;
    let mut rule = Vec::with_capacity(n);
    let nf = n as f64;
    for k in 0..n {
        // Chebyshev-like initial guess, then Newton on P_n.
        let mut x: R = rf((std::f64::consts::PI * (k as f64 + 0.75) / (nf + 0.5)).cos());
        let mut dp = R::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= R::default_epsilon() * rf(4.0) {
                break;
            }
        }
        let w = rf::<R>(2.0) / ((R::one() - x * x) * dp * dp);
        rule.push((x, w));
    }
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    rule
}

/// Value and derivative of the Legendre polynomial `P_n` at `x`.
fn legendre_with_derivative<R: Real>(n: usize, x: R) -> (R, R) {
    let mut p0 = R::one();
    let mut p1 = x;
    for j in 2..=n {
        let jf = rf::<R>(j as f64);
        let p2 = ((rf::<R>(2.0 * j as f64 - 1.0)) * x * p1 - (jf - R::one()) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (R::one(), R::zero());
    }
    let dp = rf::<R>(n as f64) * (x * p1 - p0) / (x * x - R::one());
    (p1, dp)
}

/// Composite rule: `panels` uniform subintervals of `[a, b]`, each carrying a
/// Gauss-Legendre rule of the given order.  Returns `(node, weight)` pairs.
pub fn panel_rule<R: Real>(a: R, b: R, panels: usize, order: usize) -> Vec<(R, R)> {
    assert!(panels >= 1, "at least one panel required");
    let base = gauss_legendre::<R>(order);
    let width = (b - a) / rf(panels as f64);
    let mut rule = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + width * rf(p as f64);
        let mid = lo + width * rf(0.5);
        let half = width * rf(0.5);
        for &(x, w) in &base {
            rule.push((mid + half * x, half * w));
        }
    }
    rule
}

/// Integrates a scalar function against a `(node, weight)` rule.
pub fn integrate<R: Real, F: Fn(R) -> R>(rule: &[(R, R)], f: F) -> R {
    rule.iter().fold(R::zero(), |acc, &(x, w)| acc + w * f(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn nodes_are_symmetric_and_interior() {
        let rule = gauss_legendre::<f64>(13);
        assert_eq!(rule.len(), 13);
        for &(x, w) in &rule {
            assert!(x.abs() < 1.0);
            assert!(w > 0.0);
        }
        for k in 0..13 {
            assert_relative_eq!(rule[k].0, -rule[12 - k].0, epsilon = 1e-14);
            assert_relative_eq!(rule[k].1, rule[12 - k].1, epsilon = 1e-14);
        }
        let total: f64 = rule.iter().map(|&(_, w)| w).sum();
        assert_relative_eq!(total, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let rule = gauss_legendre::<f64>(5);
        // integral of x^9 over [-1,1] is 0; x^8 gives 2/9.
        let odd = integrate(&rule, |x| x.powi(9));
        assert!(odd.abs() < 1e-15);
        let even = integrate(&rule, |x| x.powi(8));
        assert_relative_eq!(even, 2.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn panel_rule_integrates_smooth_functions() {
        let rule = panel_rule(0.0f64, 1.0, 4, 10);
        let value = integrate(&rule, f64::exp);
        assert_relative_eq!(value, std::f64::consts::E - 1.0, epsilon = 1e-14);
    }

    #[test]
    fn single_precision_rule_is_consistent() {
        let rule = panel_rule(0.0f32, 1.0, 2, 8);
        let value = integrate(&rule, |x: f32| x * x);
        assert!((value - 1.0 / 3.0).abs() < 1e-6);
    }
}
