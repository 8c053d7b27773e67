//! Gamma function via the Lanczos approximation (g = 7, n = 9).

use crate::scalar::Real;

const G: f64 = 7.0;
const COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum<T: Real>(x: T) -> T {
    // x is the shifted argument (z - 1)
    let mut acc = T::lit(COEF[0]);
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (x + T::of(i));
    }
    acc
}

/// Γ(x) for real `x`, using reflection below 1/2.
pub fn gamma<T: Real>(x: T) -> T {
    if x < T::half() {
        if x == x.floor() {
            return T::nan();
        }
        let pi = T::PI();
        return pi / ((pi * x).sin() * gamma(T::one() - x));
    }
    if x > T::lit(171.7) {
        return T::infinity();
    }
    if x == x.floor() && x <= T::lit(30.0) {
        let mut f = T::one();
        let mut k = T::two();
        while k < x {
            f = f * k;
            k = k + T::one();
        }
        return f;
    }
    let z = x - T::one();
    let t = z + T::lit(G) + T::half();
    let sqrt_2pi = (T::two() * T::PI()).sqrt();
    // split the power to avoid overflow near the top of the range
    let p = t.powf((z + T::half()) * T::half());
    sqrt_2pi * p * (p * (-t).exp()) * lanczos_sum(z)
}

/// ln |Γ(x)|.
pub fn ln_gamma<T: Real>(x: T) -> T {
    if x < T::half() {
        let pi = T::PI();
        return (pi / (pi * x).sin().abs()).ln() - ln_gamma(T::one() - x);
    }
    let z = x - T::one();
    let t = z + T::lit(G) + T::half();
    T::half() * (T::two() * T::PI()).ln() + (z + T::half()) * t.ln() - t + lanczos_sum(z).ln()
}

/// 1/Γ(x), which is entire; returns zero at the poles of Γ.
pub fn rgamma<T: Real>(x: T) -> T {
    if x <= T::zero() && x == x.floor() {
        return T::zero();
    }
    if x > T::lit(150.0) {
        return (-ln_gamma(x)).exp();
    }
    T::one() / gamma(x)
}
