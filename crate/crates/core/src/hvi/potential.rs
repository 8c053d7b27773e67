//! Locally Lipschitz potentials `F(t, θ, r)` with interval Clarke subdifferentials.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Interval<T> {
    pub fn new(lo: T, hi: T) -> Self {
        debug_assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn point(v: T) -> Self {
        Self { lo: v, hi: v }
    }

    /// Convex hull of two values.
    pub fn hull(a: T, b: T) -> Self {
        Self { lo: a.min(b), hi: a.max(b) }
    }

    pub fn contains(&self, v: T) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Support function `max(lo v, hi v)`.
    pub fn support(&self, v: T) -> T {
        (self.lo * v).max(self.hi * v)
    }

    /// Element of least magnitude.
    pub fn minimal_norm(&self) -> T {
        T::zero().max(self.lo).min(self.hi)
    }

    pub fn midpoint(&self) -> T {
        T::half() * (self.lo + self.hi)
    }

    /// `max(|lo|, |hi|)`.
    pub fn magnitude(&self) -> T {
        self.lo.abs().max(self.hi.abs())
    }
}

/// Piecewise-linear potential in `r`, linearly extended beyond its knots.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated<T> {
    knots: Vec<T>,
    values: Vec<T>,
    slopes: Vec<T>,
    eta: T,
}

impl<T: Real> Tabulated<T> {
    /// Knots must increase strictly; every slope must respect the declared bound `eta`.
    pub fn new(knots: Vec<T>, values: Vec<T>, eta: T) -> Result<Self> {
        if knots.len() < 2 || knots.len() != values.len() {
            return Err(Error::Potential(format!(
                "need at least two knots with one value each, got {} knots and {} values",
                knots.len(),
                values.len()
            )));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Potential("knots must increase strictly".into()));
        }
        if !(eta >= T::zero()) || !eta.is_finite() {
            return Err(Error::Potential(format!("bound eta={eta} must be finite and non-negative")));
        }
        let slopes: Vec<T> = knots
            .windows(2)
            .zip(values.windows(2))
            .map(|(k, v)| (v[1] - v[0]) / (k[1] - k[0]))
            .collect();
        if let Some((i, s)) = slopes.iter().enumerate().find(|(_, s)| s.abs() > eta) {
            return Err(Error::Potential(format!(
                "slope {s} on [{}, {}] exceeds the declared bound {eta}",
                knots[i],
                knots[i + 1]
            )));
        }
        Ok(Self { knots, values, slopes, eta })
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Index of the linear piece containing `r`; the end pieces extend outward.
    fn piece(&self, r: T) -> usize {
        let i = self.knots.partition_point(|&k| k <= r);
        i.saturating_sub(1).min(self.slopes.len() - 1)
    }

    fn evaluate(&self, r: T) -> T {
        let i = self.piece(r);
        self.values[i] + self.slopes[i] * (r - self.knots[i])
    }

    fn subdifferential(&self, r: T) -> Interval<T> {
        let last = self.knots.len() - 1;
        match self.knots.iter().position(|&k| k == r) {
            Some(i) if i > 0 && i < last => Interval::hull(self.slopes[i - 1], self.slopes[i]),
            _ => Interval::point(self.slopes[self.piece(r)]),
        }
    }
}

/// Potential library.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential<T> {
    /// `F ≡ 0`.
    Zero,
    /// `F = c|r|`.
    Abs { c: T },
    /// `F = c min(|r|, 1)`. Not Clarke regular at `|r| = 1`.
    SaturatingAbs { c: T },
    Tabulated(Tabulated<T>),
}

impl<T: Real> Potential<T> {
    pub fn abs(c: T) -> Result<Self> {
        check_weight(c)?;
        Ok(Self::Abs { c })
    }

    pub fn saturating_abs(c: T) -> Result<Self> {
        check_weight(c)?;
        Ok(Self::SaturatingAbs { c })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Zero => "zero",
            Self::Abs { .. } => "abs",
            Self::SaturatingAbs { .. } => "saturating_abs",
            Self::Tabulated(_) => "tabulated",
        }
    }

    pub fn evaluate(&self, _t: T, _theta: T, r: T) -> T {
        match self {
            Self::Zero => T::zero(),
            Self::Abs { c } => *c * r.abs(),
            Self::SaturatingAbs { c } => *c * r.abs().min(T::one()),
            Self::Tabulated(tab) => tab.evaluate(r),
        }
    }

    /// Clarke subdifferential `∂F(t, θ, ·)` at `r`.
    pub fn subdifferential(&self, _t: T, _theta: T, r: T) -> Interval<T> {
        match self {
            Self::Zero => Interval::point(T::zero()),
            Self::Abs { c } => sign_interval(*c, r),
            Self::SaturatingAbs { c } => {
                let a = r.abs();
                if a < T::one() {
                    sign_interval(*c, r)
                } else if a == T::one() {
                    Interval::hull(T::zero(), *c * r.signum())
                } else {
                    Interval::point(T::zero())
                }
            }
            Self::Tabulated(tab) => tab.subdifferential(r),
        }
    }

    /// Pointwise bound `η(t) ≥ |∂F(t, θ, r)|`.
    pub fn bound(&self, _t: T) -> T {
        match self {
            Self::Zero => T::zero(),
            Self::Abs { c } | Self::SaturatingAbs { c } => *c,
            Self::Tabulated(tab) => tab.eta,
        }
    }
}

fn check_weight<T: Real>(c: T) -> Result<()> {
    if !(c >= T::zero()) || !c.is_finite() {
        return Err(Error::Potential(format!("weight c={c} must be finite and non-negative")));
    }
    Ok(())
}

fn sign_interval<T: Real>(c: T, r: T) -> Interval<T> {
    if r > T::zero() {
        Interval::point(c)
    } else if r < T::zero() {
        Interval::point(-c)
    } else {
        Interval::new(-c, c)
    }
}

/// Clarke generalised directional derivative `F⁰(t, θ, r; v)`, the support
/// function of `∂F(t, θ, r)` in direction `v`.
pub fn clarke_directional<T: Real>(pot: &Potential<T>, t: T, theta: T, r: T, v: T) -> T {
    pot.subdifferential(t, theta, r).support(v)
}

/// Rule for picking one element of `∂F` at each sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionStrategy {
    /// Element of least magnitude.
    MinimalNorm,
    Midpoint,
    /// Zero when admissible, otherwise the midpoint.
    SignZero,
    /// The previous value when admissible, otherwise the midpoint.
    #[default]
    Sticky,
}

impl SelectionStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            Self::MinimalNorm => "minimal_norm",
            Self::Midpoint => "midpoint",
            Self::SignZero => "sign_zero",
            Self::Sticky => "sticky",
        }
    }

    pub fn select<T: Real>(&self, interval: Interval<T>, previous: Option<T>) -> T {
        match self {
            Self::MinimalNorm => interval.minimal_norm(),
            Self::Midpoint => interval.midpoint(),
            Self::SignZero => {
                if interval.contains(T::zero()) {
                    T::zero()
                } else {
                    interval.midpoint()
                }
            }
            Self::Sticky => match previous {
                Some(v) if interval.contains(v) => v,
                _ => interval.midpoint(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abs_subdifferential() {
        let f = Potential::abs(1.0f64).unwrap();
        assert_eq!(clarke_directional(&f, 0.0, 0.0, 0.0, 1.0), 1.0);
        assert_eq!(clarke_directional(&f, 0.0, 0.0, 0.0, -1.0), 1.0);
        assert_eq!(clarke_directional(&f, 0.0, 0.0, 2.0, -0.3), -0.3);
    }

    #[test]
    fn saturating_kinks() {
        let f = Potential::saturating_abs(0.5f64).unwrap();
        assert_eq!(f.subdifferential(0.0, 0.0, 1.0), Interval::new(0.0, 0.5));
        assert_eq!(f.subdifferential(0.0, 0.0, -1.0), Interval::new(-0.5, 0.0));
        assert_eq!(f.subdifferential(0.0, 0.0, 3.0), Interval::point(0.0));
        assert_eq!(f.evaluate(0.0, 0.0, -4.0), 0.5);
    }

    #[test]
    fn tabulated_audit() {
        assert!(Tabulated::new(vec![0.0, 1.0], vec![0.0, 2.0], 1.0).is_err());
        assert!(Tabulated::new(vec![0.0, 0.0], vec![0.0, 0.0], 1.0).is_err());
        let t = Tabulated::new(vec![-1.0, 0.0, 2.0], vec![1.0, 0.0, 1.0], 1.0).unwrap();
        let f = Potential::Tabulated(t);
        assert_eq!(f.subdifferential(0.0, 0.0, 0.0), Interval::new(-1.0, 0.5));
        assert_eq!(f.evaluate(0.0, 0.0, 4.0), 2.0);
        assert_eq!(f.evaluate(0.0, 0.0, -3.0), 3.0);
        // end knots are not kinks
        assert_eq!(f.subdifferential(0.0, 0.0, 2.0), Interval::point(0.5));
    }

    #[test]
    fn strategies_stay_inside() {
        let i = Interval::new(-1.0f64, 3.0);
        for s in [SelectionStrategy::MinimalNorm, SelectionStrategy::Midpoint, SelectionStrategy::SignZero] {
            assert!(i.contains(s.select(i, None)));
        }
        assert_eq!(SelectionStrategy::Sticky.select(i, Some(2.5)), 2.5);
        assert_eq!(SelectionStrategy::Sticky.select(i, Some(4.0)), 1.0);
        assert_eq!(SelectionStrategy::SignZero.select(Interval::new(1.0, 3.0), None), 2.0);
    }
}
