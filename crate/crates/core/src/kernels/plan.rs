//! Parameter planning for the Gaussian-smoothing argument: given `(ℓ, θ, ξ)`
//! find the largest `δ` meeting both smallness constraints.

use serde::Serialize;

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, Serialize)]
pub struct QtPlan<T> {
    pub ell: u64,
    pub theta: T,
    pub xi: T,
    pub delta: T,
    /// `δ^{1/3}`.
    pub eta: T,
    /// `1/(2ℓ) - δ`.
    pub varpi: T,
    /// `ϖ/(2+η)`.
    pub kappa: T,
    /// `δ <= (κ(2θ-θ²) - ξ)/3`.
    pub linear_ok: bool,
    /// `δ <= κ³/(65(1+8κ)³)`.
    pub cubic_ok: bool,
    /// Exponent `a` in the ideal census lower bound `M ≫ q^a`:
    /// `κ(1 + (2-η)²/4) - δ`.
    pub census_exponent: T,
}

impl<T: Real> QtPlan<T> {
    /// `y = κ ln q`.
    pub fn y(&self, q: T) -> T {
        self.kappa * q.ln()
    }
}

/// Derived quantities and constraint slacks at a given `δ`.
fn evaluate<T: Real>(ell: u64, theta: T, xi: T, delta: T) -> (T, T, T, T, T) {
    let one = T::one();
    let two = T::lit(2.0);
    let eta = delta.cbrt();
    let varpi = one / (two * T::from_u64_lossy(ell)) - delta;
    let kappa = varpi / (two + eta);
    let linear = (kappa * (two * theta - theta * theta) - xi) / T::lit(3.0);
    let d = one + T::lit(8.0) * kappa;
    let cubic = kappa * kappa * kappa / (T::lit(65.0) * d * d * d);
    (eta, varpi, kappa, linear, cubic)
}

fn plan_at<T: Real>(ell: u64, theta: T, xi: T, delta: T) -> QtPlan<T> {
    let (eta, varpi, kappa, linear, cubic) = evaluate(ell, theta, xi, delta);
    let two = T::lit(2.0);
    QtPlan {
        ell,
        theta,
        xi,
        delta,
        eta,
        varpi,
        kappa,
        linear_ok: delta <= linear,
        cubic_ok: delta <= cubic,
        census_exponent: kappa * (T::one() + (two - eta) * (two - eta) / T::lit(4.0)) - delta,
    }
}

/// Largest `δ ∈ (0, 1/(2ℓ))` with `δ <= (κ(2θ-θ²) - ξ)/3` and
/// `δ <= κ³/(65(1+8κ)³)`, where `η = δ^{1/3}`, `ϖ = 1/(2ℓ) - δ`,
/// `κ = ϖ/(2+η)`. Both right-hand sides decrease in `δ`, so the feasible set
/// is an interval and bisection finds its end.
pub fn qt_plan<T: Real>(ell: u64, theta: T, xi: T) -> Result<QtPlan<T>> {
    if ell < 3 || !is_prime(ell) {
        return Err(Error::InvalidParameter(format!("ℓ must be a prime ≥ 3, got {ell}")));
    }
    let half = T::lit(0.5);
    if !(theta > T::zero() && theta < half) || !(xi > T::zero()) {
        return Err(Error::InvalidParameter(format!("need 0 < θ < 1/2 and ξ > 0, got θ = {theta}, ξ = {xi}")));
    }
    let limit = (T::lit(2.0) * theta - theta * theta) / (T::lit(4.0) * T::from_u64_lossy(ell));
    if xi >= limit {
        return Err(Error::Infeasible(format!("ξ = {xi} is not below (2θ-θ²)/(4ℓ) = {limit}")));
    }
    let feasible = |d: T| {
        let (_, _, _, linear, cubic) = evaluate(ell, theta, xi, d);
        d <= linear && d <= cubic
    };
    let mut lo = T::zero();
    let mut hi = T::one() / (T::lit(2.0) * T::from_u64_lossy(ell));
    for _ in 0..200 {
        let mid = (lo + hi) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if !(lo > T::zero()) {
        return Err(Error::Infeasible("no positive δ satisfies both constraints".into()));
    }
    Ok(plan_at(ell, theta, xi, lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infeasible_xi() {
        assert!(matches!(qt_plan(3, 0.4f64, 0.06), Err(Error::Infeasible(_))));
    }

    #[test]
    fn feasible_plan_resubstitutes() {
        let p = qt_plan(3, 0.4f64, 0.01).unwrap();
        assert!(p.linear_ok && p.cubic_ok);
        let (eta, varpi, kappa, linear, cubic) = evaluate(3, 0.4, 0.01, p.delta);
        assert_eq!((eta, varpi, kappa), (p.eta, p.varpi, p.kappa));
        assert!(p.delta <= linear && p.delta <= cubic);
        assert!(p.xi < (2.0 * p.theta - p.theta * p.theta) / 12.0);
        // Maximal: a slightly larger δ breaks one of the constraints.
        let bumped = p.delta * (1.0 + 1e-9);
        let (_, _, _, linear, cubic) = evaluate(3, 0.4, 0.01, bumped);
        assert!(bumped > linear || bumped > cubic);
    }

    #[test]
    fn small_xi_makes_cubic_constraint_bind() {
        let p = qt_plan(3, 0.4f64, 1e-9).unwrap();
        let (_, _, _, linear, cubic) = evaluate(3, 0.4, 1e-9, p.delta);
        assert!(cubic < linear);
        assert!((p.delta - cubic).abs() < 1e-12 * cubic);
    }

    #[test]
    fn rejects_bad_ell() {
        assert!(qt_plan(2, 0.4f64, 0.01).is_err());
        assert!(qt_plan(9, 0.4f64, 0.01).is_err());
    }
}
