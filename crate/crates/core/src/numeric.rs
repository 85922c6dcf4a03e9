//! Small numerical helpers shared across modules: double-double arithmetic
//! for compensated accumulation, and least-squares slopes.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Unevaluated sum `hi + lo` carrying roughly 106 bits of significand.
///
/// Used as the accumulator for prefix sums and probability masses, where the
/// running total is many orders of magnitude larger than the quantity of
/// interest (e.g. the q-Stirling defect).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact sum of two doubles.
    pub fn sum(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        Dd { hi, lo }
    }

    /// Exact product of two doubles.
    pub fn product(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let r = self - Dd::product(q1, b);
        let q2 = r.hi / b;
        let r = r - Dd::product(q2, b);
        let q3 = r.hi / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add_f64(q3)
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;

    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add_f64(q3)
    }
}

impl std::iter::Sum<f64> for Dd {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Dd {
        iter.fold(Dd::ZERO, Dd::add_f64)
    }
}

/// Compensated sum of a slice, rounded once at the end.
pub fn compensated_sum(values: &[f64]) -> f64 {
    values.iter().copied().sum::<Dd>().to_f64()
}

/// Natural log of `Σ exp(v)`, returning `-inf` when every entry is `-inf`.
pub fn log_sum_exp(log_values: &[f64]) -> f64 {
    let max = log_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: Dd = log_values.iter().map(|&v| (v - max).exp()).sum();
    max + s.to_f64().ln()
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_recovers_lost_low_bits() {
        let big = 1.0e16;
        let acc = Dd::new(big).add_f64(1.0).add_f64(1.0).add_f64(-big);
        assert_eq!(acc.to_f64(), 2.0);
    }

    #[test]
    fn dd_division_is_accurate() {
        let third = Dd::new(1.0).div_f64(3.0);
        let back = third.mul_f64(3.0) - Dd::new(1.0);
        assert!(back.to_f64().abs() < 1e-30);
        let third2 = Dd::new(1.0) / Dd::new(3.0);
        assert!((third2 - third).to_f64().abs() < 1e-31);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let v: Vec<f64> = std::iter::once(1.0)
            .chain(std::iter::repeat_n(1e-16, 10_000))
            .collect();
        assert!((compensated_sum(&v) - (1.0 + 1e-12)).abs() < 1e-24);
    }

    #[test]
    fn log_sum_exp_handles_extremes() {
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY; 3]), f64::NEG_INFINITY);
        let v = log_sum_exp(&[-2000.0, -2000.0]);
        assert!((v - (-2000.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn slope_of_exact_power_law() {
        let xs: Vec<f64> = [1e3f64, 1e4, 1e5].iter().map(|n| n.ln()).collect();
        let ys: Vec<f64> = [1e3f64, 1e4, 1e5].iter().map(|n| -0.75 * n.ln()).collect();
        assert!((ols_slope(&xs, &ys) + 0.75).abs() < 1e-12);
    }
}
