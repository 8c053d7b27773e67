//! Mainardi-Wright probability density ξ_α on (0, ∞).

use super::gamma::gamma;
use crate::error::{domain, Result};
use crate::quadrature::tanh_sinh;
use crate::scalar::Real;

/// ξ_α(τ) = (1/α) τ^{-1-1/α} w̄_α(τ^{-1/α}), where w̄_α is the one-sided stable density.
///
/// For τ ≤ 1 the power series Σ (-τ)^{n-1} Γ(nα) sin(nπα) / (π (n-1)!) is summed
/// directly. Larger τ would lose every digit to cancellation, so the
/// positive Zolotarev integral of the stable law is used there instead.
pub fn wright_density<T: Real>(alpha: T, tau: T) -> Result<T> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(domain(format!("Wright density order alpha={alpha} outside (0, 1)")));
    }
    if !(tau > T::zero()) || tau.is_nan() {
        return Err(domain(format!("Wright density needs tau > 0, got {tau}")));
    }
    if tau.is_infinite() {
        return Ok(T::zero());
    }
    if tau <= T::one() {
        Ok(series(alpha, tau))
    } else {
        Ok(zolotarev(alpha, tau))
    }
}

fn series<T: Real>(alpha: T, tau: T) -> T {
    let pi = T::PI();
    let mut sum = T::zero();
    // (-τ)^{n-1}/(n-1)! carried as a running product
    let mut factor = T::one();
    for n in 1..400usize {
        let na = alpha * T::of(n);
        let size = factor * gamma(na);
        sum = sum + size * (pi * na).sin();
        if n > 4 && size.abs() < T::epsilon() * T::lit(1e-2) * sum.abs() {
            break;
        }
        factor = factor * (-tau) / T::of(n);
    }
    (sum / pi).max(T::zero())
}

fn zolotarev<T: Real>(alpha: T, tau: T) -> T {
    let one = T::one();
    let beta = one - alpha;
    let q = one / beta;
    let x = tau.powf(q);
    // A(φ) is increasing with A(0) = (1-α) α^{α/(1-α)}
    let a0 = beta * alpha.powf(alpha * q);
    let underflow = -T::min_positive_value().ln();
    if x * a0 > underflow {
        return T::zero();
    }
    let pi = T::PI();
    let shape = |phi: T| -> T {
        if phi <= T::zero() {
            return a0;
        }
        let s = phi.sin();
        let sa = (alpha * phi).sin();
        (sa / s).powf(q) * (beta * phi).sin() / sa
    };
    let tol = (T::epsilon() * T::lit(64.0)).max(T::lit(1e-14));
    let integral = tanh_sinh(T::zero(), pi, tol, 9, |phi, _, db| {
        if db <= T::zero() {
            return T::zero();
        }
        let a = shape(phi);
        let e = x * a;
        if e > underflow {
            T::zero()
        } else {
            a * (-e).exp()
        }
    });
    tau.powf(alpha * q) / (beta * pi) * integral
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_order_closed_form() {
        let closed = |t: f64| (-t * t / 4.0).exp() / std::f64::consts::PI.sqrt();
        for &t in &[0.05, 0.5, 1.0, 1.5, 3.0, 7.0] {
            let v = wright_density(0.5f64, t).unwrap();
            assert!((v - closed(t)).abs() < 1e-13, "τ={t}: {v} vs {}", closed(t));
        }
    }

    #[test]
    fn branches_meet_at_unit_tau() {
        for &alpha in &[0.3f64, 0.6, 0.75, 0.9] {
            let a = series(alpha, 1.0);
            let b = zolotarev(alpha, 1.0);
            assert!((a - b).abs() < 1e-12, "α={alpha}: {a} vs {b}");
        }
    }

    #[test]
    fn tail_vanishes() {
        assert_eq!(wright_density(0.75f64, 1e4).unwrap(), 0.0);
        assert!(wright_density(0.75f64, 0.0).is_err());
        assert!(wright_density(1.0f64, 0.5).is_err());
    }
}
