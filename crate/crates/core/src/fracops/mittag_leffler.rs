//! Two-parameter Mittag-Leffler function on the real line.
//!
//! Power series for `z >= -1`. For more negative arguments the series loses
//! too many digits to cancellation. There the optimally truncated asymptotic
//! expansion `-Σ z^{-k}/Γ(β-αk)` is used when its smallest term is below
//! roundoff, and otherwise the exact real-line integral representation (valid
//! for `0 < α < 1`, `β < 1 + α`), with the recurrence
//! `E_{α,β}(z) = (E_{α,β-α}(z) - 1/Γ(β-α)) / z` reducing larger `β` into that
//! range.

use super::gamma::rgamma;
use crate::error::{domain, Result};
use crate::quadrature::{exp_sinh, tanh_sinh};
use crate::scalar::Real;

const SERIES_LEFT: f64 = -1.0;
const MAX_TERMS: usize = 4000;

/// E_α(z) = Σ z^k / Γ(αk + 1).
pub fn ml_one<T: Real>(alpha: T, z: T) -> Result<T> {
    ml_two(alpha, T::one(), z)
}

/// E_{α,β}(z) = Σ z^k / Γ(αk + β).
pub fn ml_two<T: Real>(alpha: T, beta: T, z: T) -> Result<T> {
    if !(alpha > T::zero() && alpha <= T::one()) {
        return Err(domain(format!("Mittag-Leffler order alpha={alpha} outside (0, 1]")));
    }
    if !(beta > T::zero()) || !beta.is_finite() {
        return Err(domain(format!("Mittag-Leffler parameter beta={beta} must be positive")));
    }
    if !z.is_finite() {
        return Err(domain("Mittag-Leffler argument must be finite"));
    }
    Ok(eval(alpha, beta, z))
}

fn eval<T: Real>(alpha: T, beta: T, z: T) -> T {
    if z == T::zero() {
        return rgamma(beta);
    }
    if alpha == T::one() {
        return exp_family(beta, z);
    }
    if z >= T::lit(SERIES_LEFT) {
        return series(alpha, beta, z);
    }
    if let Some(v) = asymptotic(alpha, beta, z) {
        return v;
    }
    if beta >= T::one() + alpha {
        let lower = beta - alpha;
        return (eval(alpha, lower, z) - rgamma(lower)) / z;
    }
    integral(alpha, beta, z)
}

fn series<T: Real>(alpha: T, beta: T, z: T) -> T {
    let eps = T::epsilon();
    let mut sum = T::zero();
    let mut zk = T::one();
    for k in 0..MAX_TERMS {
        let term = zk * rgamma(alpha * T::of(k) + beta);
        sum = sum + term;
        // stop once terms are negligible and past the peak of |z|^k/Γ(αk+β)
        if k > 2 && term.abs() <= eps * T::lit(0.25) * sum.abs().max(T::min_positive_value()) {
            let next = T::of(k + 1) * alpha;
            if next.powf(alpha) > z.abs() || term == T::zero() {
                break;
            }
        }
        zk = zk * z;
        if !zk.is_finite() {
            break;
        }
    }
    sum
}

/// `-Σ_{k≥1} z^{-k}/Γ(β-αk)` summed up to its smallest term, if that term is negligible.
fn asymptotic<T: Real>(alpha: T, beta: T, z: T) -> Option<T> {
    let target = T::epsilon() * T::lit(0.1);
    let inv = T::one() / z;
    let mut sum = T::zero();
    let mut zk = T::one();
    let mut last = T::infinity();
    let mut small = 0;
    for k in 1..200usize {
        zk = zk * inv;
        let arg = beta - alpha * T::of(k);
        let term = zk * rgamma(arg);
        sum = sum - term;
        // 1/Γ nearly vanishes close to its zeros; such terms say nothing about convergence
        let near_pole = arg <= T::zero() && (arg - arg.round()).abs() < T::lit(1e-3);
        if near_pole {
            continue;
        }
        let size = term.abs();
        if size > last {
            return None;
        }
        last = size;
        small = if size <= target * sum.abs() { small + 1 } else { 0 };
        if small >= 2 {
            return Some(sum);
        }
    }
    None
}

/// α = 1: E_{1,1} = exp and integer β by recurrence; other β by series.
fn exp_family<T: Real>(beta: T, z: T) -> T {
    if beta == beta.floor() && beta <= T::lit(64.0) {
        let mut value = z.exp();
        let mut b = T::one();
        while b < beta {
            value = (value - rgamma(b)) / z;
            b = b + T::one();
        }
        return value;
    }
    series(T::one(), beta, z)
}

/// Real-line integral representation for `z < 0`, `0 < α < 1`, `0 < β < 1 + α`.
fn integral<T: Real>(alpha: T, beta: T, z: T) -> T {
    let pi = T::PI();
    let inv_alpha = T::one() / alpha;
    let s1 = (pi * (T::one() - beta)).sin();
    let s2 = (pi * (T::one() - beta + alpha)).sin();
    let cos_ap = (pi * alpha).cos();
    let scale = T::one() / pi;
    // with r = ρ^α the weight exp(-r^(1/α)) becomes exp(-ρ)
    let kernel = |rho: T| -> T {
        if rho <= T::zero() {
            return T::zero();
        }
        let ln_rho = rho.ln();
        let r = (alpha * ln_rho).exp();
        let num = r * s1 - z * s2;
        let den = r * r - T::two() * r * z * cos_ap + z * z;
        scale * ((alpha - beta) * ln_rho - rho).exp() * num / den
    };
    // the denominator is smallest at r* = |z||cos απ|; split there
    let r_star = (z.abs() * cos_ap.abs()).max(T::lit(1e-3));
    let rho_star = r_star.powf(inv_alpha);
    let tol = T::epsilon() * T::lit(16.0);
    let levels = 9;
    let mut total = T::zero();
    let cut = T::one().min(rho_star);
    total = total + tanh_sinh(T::zero(), cut, tol, levels, |rho, _, _| kernel(rho));
    if rho_star > cut {
        total = total + tanh_sinh(cut, rho_star, tol, levels, |rho, _, _| kernel(rho));
    }
    // beyond ρ ≈ 745 the weight exp(-ρ) underflows in f64
    if rho_star < T::lit(745.0) {
        total = total + exp_sinh(rho_star, tol, levels, |rho, _| kernel(rho));
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracops::gamma::gamma;

    #[test]
    fn trivial_identities() {
        assert_eq!(ml_one(0.75f64, 0.0).unwrap(), 1.0);
        assert!((ml_one(1.0f64, 1.0).unwrap() - std::f64::consts::E).abs() < 1e-15);
        assert!((ml_two(0.75f64, 0.75, 0.0).unwrap() - 1.0 / gamma(0.75)).abs() < 1e-15);
        assert!((ml_two(1.0f64, 1.0, -2.0).unwrap() - (-2.0f64).exp()).abs() < 1e-16);
        // E_{1,2}(z) = (e^z - 1)/z
        let z = -7.5f64;
        assert!((ml_two(1.0, 2.0, z).unwrap() - (z.exp() - 1.0) / z).abs() < 1e-15);
    }

    #[test]
    fn half_order_matches_erfc_form() {
        // E_{1/2}(-x) = exp(x²) erfc(x); at x = 1 this is 0.4275835761558070
        let v = ml_one(0.5f64, -1.0).unwrap();
        assert!((v - 0.427_583_576_155_807).abs() < 1e-14, "{v}");
        // x = 5: exp(25) erfc(5) = 0.1107046377339686
        let v = ml_one(0.5f64, -5.0).unwrap();
        assert!((v - 0.110_704_637_733_968_6).abs() < 1e-12, "{v}");
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ml_one(0.0f64, 1.0).is_err());
        assert!(ml_one(1.2f64, 1.0).is_err());
        assert!(ml_two(0.5f64, -1.0, 1.0).is_err());
        assert!(ml_two(0.5f64, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn branches_agree_at_switch_point() {
        for &alpha in &[0.55f64, 0.75, 0.95] {
            for &beta in &[alpha, 1.0] {
                let z = SERIES_LEFT;
                let a = series(alpha, beta, z);
                let b = integral(alpha, beta, z);
                assert!(asymptotic(alpha, beta, z).is_none());
                assert!((a - b).abs() < 1e-11 * a.abs().max(1e-3), "α={alpha} β={beta}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn asymptotic_branch_agrees_with_integral() {
        for &alpha in &[0.55f64, 0.75, 0.999] {
            for &beta in &[alpha, 1.0, 1.3] {
                let mut z = -5.0;
                while z > -400.0 {
                    if let Some(a) = asymptotic(alpha, beta, z) {
                        let b = integral(alpha, beta, z);
                        assert!((a - b).abs() <= 1e-11 * b.abs() + 1e-17, "α={alpha} β={beta} z={z}: {a} vs {b}");
                    }
                    z *= 1.07;
                }
            }
        }
    }

    #[test]
    fn single_precision_instantiation() {
        let v = ml_one(0.75f32, -10.0).unwrap();
        let w = ml_one(0.75f64, -10.0).unwrap();
        assert!(((v as f64) - w).abs() < 1e-5 * w.abs());
    }
}
