//! q-factorials, the q-Stirling formula, q-binomial and q-multinomial
//! coefficients in q-log form, and Tsallis entropy.
//!
//! In the q-log representation the q-factorial is an ordinary sum,
//! `ln_q n!_q = Σ_{k=1}^n ln_q k`, so a prefix-sum table gives every
//! coefficient needed to build a distribution of size `n` in `O(n)`.
//!
//! Prefix sums are kept in double-double form. At `n = 10^6` and `q = 1.5`
//! the sum is about `2·10^6` while the refined Stirling defect is below
//! `10^{-10}`; a plain `f64` total cannot resolve it.

use serde::{Deserialize, Serialize};

use crate::divergence::ProbVector;
use crate::error::{Error, Result};
use crate::numeric::Dd;
use crate::qalgebra::{pow, DeformationParameter, DEFAULT_CLASSICAL_EPS};

/// Prefix sums `Σ_{k=1}^n ln_q k` for `n = 0..=max_n`. Immutable once built.
#[derive(Debug, Clone)]
pub struct QFactorialTable {
    param: DeformationParameter,
    prefix: Vec<Dd>,
}

/// `ln_q k` as a double-double, exact up to the rounding of `k^{1-q}`.
fn q_ln_term(param: DeformationParameter, k: f64) -> Dd {
    if param.is_classical() {
        Dd::new(k.ln())
    } else {
        let e = param.one_minus_q();
        Dd::sum(pow(k, e), -1.0).div_f64(e)
    }
}

impl QFactorialTable {
    pub fn new(param: DeformationParameter, max_n: usize) -> Self {
        let mut prefix = Vec::with_capacity(max_n + 1);
        let mut acc = Dd::ZERO;
        prefix.push(acc);
        for k in 1..=max_n {
            acc = acc + q_ln_term(param, k as f64);
            prefix.push(acc);
        }
        Self { param, prefix }
    }

    pub fn param(&self) -> DeformationParameter {
        self.param
    }

    pub fn max_n(&self) -> usize {
        self.prefix.len() - 1
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.max_n() {
            return Err(Error::Range {
                index: n,
                max: self.max_n(),
            });
        }
        Ok(())
    }

    /// `ln_q n!_q`, the q-log of `1 ⊗_q 2 ⊗_q ⋯ ⊗_q n`.
    pub fn q_ln_factorial(&self, n: usize) -> Result<f64> {
        self.q_ln_factorial_dd(n).map(Dd::to_f64)
    }

    /// `ln_q n!_q` with the compensation term kept.
    pub fn q_ln_factorial_dd(&self, n: usize) -> Result<Dd> {
        self.check(n)?;
        Ok(self.prefix[n])
    }

    pub(crate) fn binomial_dd(&self, n: usize, k: usize) -> Result<Dd> {
        self.check(n)?;
        if k > n {
            return Err(Error::Range { index: k, max: n });
        }
        Ok(self.prefix[n] - self.prefix[k] - self.prefix[n - k])
    }
}

/// Estimated additive constant `c_q` of the refined q-Stirling formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StirlingConstant {
    pub param: DeformationParameter,
    pub c_q: f64,
    /// Smallest size used in the estimate (the table reaches `2 · estimation_n`).
    pub estimation_n: usize,
    /// Spread of the raw defect between `estimation_n` and `2 · estimation_n`;
    /// of order `estimation_n^{-q}`.
    pub residual_bound: f64,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            reason: "Stirling forms need n >= 1".into(),
        });
    }
    Ok(())
}

/// `(n/(2-q) + 1/2) ln_q n - n/(2-q)`: the refined form without `c_q`.
fn refined_core_dd(param: DeformationParameter, n: usize) -> Dd {
    let nf = n as f64;
    let (ln_n, inv_two_minus_q) = if param.is_classical() {
        (Dd::new(nf.ln()), Dd::new(1.0))
    } else {
        let e = param.one_minus_q();
        (
            Dd::sum(pow(nf, e), -1.0).div_f64(e),
            Dd::new(1.0) / Dd::sum(1.0, e),
        )
    };
    let na = inv_two_minus_q.mul_f64(nf);
    na.add_f64(0.5) * ln_n - na
}

/// Leading-order q-Stirling form `(n/(2-q)) ln_q n - n/(2-q)`.
pub fn stirling_leading(param: DeformationParameter, n: usize) -> Result<f64> {
    check_n(n)?;
    let nf = n as f64;
    let a = nf / param.two_minus_q();
    Ok(a * crate::qalgebra::q_ln_unchecked(param, nf) - a)
}

/// Refined q-Stirling form `(n/(2-q) + 1/2) ln_q n - n/(2-q) + c_q`.
pub fn stirling_refined(param: DeformationParameter, n: usize, c: &StirlingConstant) -> Result<f64> {
    check_n(n)?;
    check_same(param, c.param)?;
    Ok(refined_core_dd(param, n).add_f64(c.c_q).to_f64())
}

fn check_same(a: DeformationParameter, b: DeformationParameter) -> Result<()> {
    if a.q() != b.q() {
        return Err(Error::Constraint(format!(
            "Stirling constant was estimated for q = {}, not q = {}",
            b.q(),
            a.q()
        )));
    }
    Ok(())
}

/// `ln_q n!_q - [(n/(2-q) + 1/2) ln_q n - n/(2-q)]`, which tends to `c_q`.
pub fn stirling_defect(table: &QFactorialTable, n: usize) -> Result<f64> {
    check_n(n)?;
    let exact = table.q_ln_factorial_dd(n)?;
    Ok((exact - refined_core_dd(table.param(), n)).to_f64())
}

/// `ln_q n!_q - refined(n)`, evaluated without forming either large value in `f64`.
pub fn stirling_residual(table: &QFactorialTable, n: usize, c: &StirlingConstant) -> Result<f64> {
    check_same(table.param(), c.param)?;
    Ok(stirling_defect(table, n)? - c.c_q)
}

/// Estimate `c_q` from the defect at `n_ref` and `2 n_ref`.
///
/// The defect approaches `c_q` as `A n^{-q}`; eliminating that term between
/// the two sizes (one Richardson step with ratio `2^q`) leaves an error of
/// order `n_ref^{-q-2}`.
pub fn estimate_c_q(table: &QFactorialTable, n_ref: usize) -> Result<StirlingConstant> {
    if n_ref < 1000 {
        return Err(Error::InvalidParameter {
            name: "n_ref",
            value: n_ref as f64,
            reason: "must be at least 1000".into(),
        });
    }
    let far = 2 * n_ref;
    if far > table.max_n() {
        return Err(Error::Range {
            index: far,
            max: table.max_n(),
        });
    }
    let d_near = stirling_defect(table, n_ref)?;
    let d_far = stirling_defect(table, far)?;
    let ratio = 2f64.powf(table.param().q());
    Ok(StirlingConstant {
        param: table.param(),
        c_q: (ratio * d_far - d_near) / (ratio - 1.0),
        estimation_n: n_ref,
        residual_bound: (d_near - d_far).abs(),
    })
}

/// q-log of the q-binomial coefficient, `ln_q n!_q - ln_q k!_q - ln_q (n-k)!_q`.
pub fn q_ln_binomial_coeff(table: &QFactorialTable, n: usize, k: usize) -> Result<f64> {
    table.binomial_dd(n, k).map(Dd::to_f64)
}

/// q-log of the q-multinomial coefficient, `ln_q n!_q - Σ ln_q n_i!_q`.
pub fn q_ln_multinomial_coeff(table: &QFactorialTable, n: usize, parts: &[usize]) -> Result<f64> {
    let total: usize = parts.iter().sum();
    if total != n {
        return Err(Error::Constraint(format!(
            "parts sum to {total}, expected n = {n}"
        )));
    }
    let mut acc = table.q_ln_factorial_dd(n)?;
    for &m in parts {
        acc = acc - table.q_ln_factorial_dd(m)?;
    }
    Ok(acc.to_f64())
}

/// Tsallis entropy `S_q(p) = (1 - Σ p_i^q) / (q - 1)`; Shannon entropy (nats)
/// within the classical band around `q = 1`.
///
/// Any `q > 0` is accepted: the entropy index is not restricted to the
/// deformation range.
pub fn tsallis_entropy(q: f64, p: &ProbVector) -> f64 {
    let e = q - 1.0;
    let classical = e.abs() < DEFAULT_CLASSICAL_EPS;
    // Σ p_i ln_q(1/p_i), termwise; zero components contribute nothing
    let acc: Dd = p
        .components()
        .iter()
        .filter(|&&pi| pi > 0.0)
        .map(|&pi| {
            if classical {
                -pi * pi.ln()
            } else {
                -pi * (e * pi.ln()).exp_m1() / e
            }
        })
        .sum();
    acc.to_f64()
}

/// Remainder of the asymptotic q-binomial/Tsallis relation:
///
/// `ln_q C(n,k)_q - [-c_q + ½(ln_q n - ln_q k - ln_q(n-k)) + n^{2-q}/(2-q) · S_{2-q}(k/n, 1-k/n)]`,
/// which is `O(n^{-q})`.
pub fn binomial_entropy_residual(
    table: &QFactorialTable,
    c: &StirlingConstant,
    n: usize,
    k: usize,
) -> Result<f64> {
    let param = table.param();
    check_same(param, c.param)?;
    if k == 0 || k >= n {
        return Err(Error::Range {
            index: k,
            max: n.saturating_sub(1),
        });
    }
    let coeff = table.binomial_dd(n, k)?;
    let (nf, kf) = (n as f64, k as f64);
    let lnq = |x: f64| crate::qalgebra::q_ln_unchecked(param, x);
    let half_logs = 0.5 * (lnq(nf) - lnq(kf) - lnq(nf - kf));
    let dual = param.two_minus_q();
    let frac = kf / nf;
    let entropy = tsallis_entropy(dual, &ProbVector::new(vec![frac, 1.0 - frac])?);
    let approx = -c.c_q + half_logs + pow(nf, dual) / dual * entropy;
    Ok(coeff.add_f64(-approx).to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ols_slope;
    use crate::qalgebra::{q_exp, q_product};
    use approx::assert_relative_eq;

    fn par(q: f64) -> DeformationParameter {
        DeformationParameter::new(q).unwrap()
    }

    fn ln_factorial(n: usize) -> f64 {
        (1..=n).map(|k| (k as f64).ln()).sum()
    }

    #[test]
    fn factorial_examples() {
        for q in [0.3, 1.0, 1.7] {
            let t = QFactorialTable::new(par(q), 10);
            assert_eq!(t.q_ln_factorial(0).unwrap(), 0.0);
        }
        let t = QFactorialTable::new(par(0.5), 10);
        let expected = 2.0 * (2f64.sqrt() - 1.0) + 2.0 * (3f64.sqrt() - 1.0);
        assert_relative_eq!(t.q_ln_factorial(3).unwrap(), expected, max_relative = 1e-15);
        assert_relative_eq!(expected, 2.292529, epsilon = 1e-6);
        let t = QFactorialTable::new(par(1.0), 10);
        assert_relative_eq!(t.q_ln_factorial(5).unwrap(), 120f64.ln(), max_relative = 1e-15);
        assert!(matches!(t.q_ln_factorial(11), Err(Error::Range { index: 11, max: 10 })));
    }

    #[test]
    fn prefix_increments_are_q_logs() {
        for q in [0.05, 0.5, 1.0, 1.5, 1.95] {
            let p = par(q);
            let t = QFactorialTable::new(p, 5000);
            for n in [1usize, 2, 17, 999, 5000] {
                let inc = (t.q_ln_factorial_dd(n).unwrap() - t.q_ln_factorial_dd(n - 1).unwrap()).to_f64();
                assert_relative_eq!(inc, p.ln(n as f64).unwrap(), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn exponentiated_factorial_matches_iterated_product() {
        for q in [0.2, 0.5, 0.9, 1.0, 1.2, 1.5] {
            let p = par(q);
            let t = QFactorialTable::new(p, 50);
            let mut prod = Ok(1.0);
            for n in 1..=50usize {
                prod = prod.and_then(|acc| q_product(p, acc, n as f64));
                let via_table = q_exp(p, t.q_ln_factorial(n).unwrap());
                match (&prod, via_table) {
                    (Ok(a), Ok(b)) => assert_relative_eq!(*a, b, max_relative = 1e-9),
                    // q > 1: the q-factorial leaves the domain of ⊗_q at the same n
                    (Err(_), Err(_)) => break,
                    (a, b) => panic!("q = {q}, n = {n}: {a:?} vs {b:?}"),
                }
            }
        }
    }

    #[test]
    fn leading_form_at_one() {
        for q in [0.3, 1.0, 1.6] {
            assert_relative_eq!(
                stirling_leading(par(q), 1).unwrap(),
                -1.0 / (2.0 - q),
                max_relative = 1e-15
            );
        }
        assert!(stirling_leading(par(0.5), 0).is_err());
    }

    #[test]
    fn classical_stirling_constant_is_ln_sqrt_two_pi() {
        let t = QFactorialTable::new(par(1.0), 200_000);
        let c = estimate_c_q(&t, 100_000).unwrap();
        let anchor = (2.0 * std::f64::consts::PI).sqrt().ln();
        assert!((c.c_q - anchor).abs() < 1e-4);
        assert!((c.c_q - 0.9189385).abs() < 1e-4);
        let refined = stirling_refined(par(1.0), 100, &c).unwrap();
        assert!((refined - ln_factorial(100)).abs() <= 1e-3);
        assert_relative_eq!(ln_factorial(100), 363.739376, epsilon = 1e-5);
    }

    #[test]
    fn estimate_c_q_validates_inputs() {
        let t = QFactorialTable::new(par(0.5), 3000);
        assert!(matches!(estimate_c_q(&t, 999), Err(Error::InvalidParameter { .. })));
        assert!(matches!(estimate_c_q(&t, 2000), Err(Error::Range { .. })));
        assert!(estimate_c_q(&t, 1500).is_ok());
    }

    #[test]
    fn c_q_estimate_is_self_consistent() {
        for q in [0.5, 1.5] {
            let t = QFactorialTable::new(par(q), 400_000);
            let a = estimate_c_q(&t, 100_000).unwrap();
            let b = estimate_c_q(&t, 200_000).unwrap();
            assert!((a.c_q - b.c_q).abs() < 4.0 * a.residual_bound);
            // the raw defect spread itself shrinks as n_ref^{-q}
            let scale = (100_000f64).powf(-q);
            assert!(a.residual_bound < scale && a.residual_bound > 0.01 * scale);
        }
    }

    #[test]
    fn c_q_plateaus_at_heavy_tail() {
        let t = QFactorialTable::new(par(1.5), 2_000_000);
        let a = estimate_c_q(&t, 500_000).unwrap();
        let b = estimate_c_q(&t, 1_000_000).unwrap();
        assert!(((a.c_q - b.c_q) / b.c_q).abs() < 1e-6);
    }

    #[test]
    fn refined_residual_decays_as_n_to_minus_q() {
        let q = 0.5;
        let t = QFactorialTable::new(par(q), 400_000);
        let c = estimate_c_q(&t, 100_000).unwrap();
        for n in [1000usize, 10_000] {
            let r1 = stirling_residual(&t, n, &c).unwrap().abs();
            let r4 = stirling_residual(&t, 4 * n, &c).unwrap().abs();
            let ratio = r4 / r1;
            assert!((ratio - 0.5).abs() < 0.3 * 0.5, "ratio {ratio}");
        }
    }

    #[test]
    fn refined_beats_leading() {
        for q in [0.3, 0.5, 1.0, 1.5, 1.8] {
            let p = par(q);
            let t = QFactorialTable::new(p, 200_000);
            let c = estimate_c_q(&t, 100_000).unwrap();
            for n in [100usize, 317, 1000, 31_623, 100_000] {
                let exact = t.q_ln_factorial(n).unwrap();
                let lead = (exact - stirling_leading(p, n).unwrap()).abs();
                let refined = stirling_residual(&t, n, &c).unwrap().abs();
                assert!(refined < lead, "q = {q}, n = {n}");
            }
        }
    }

    #[test]
    fn binomial_coefficient_examples() {
        let t = QFactorialTable::new(par(1.0), 100);
        assert_relative_eq!(q_ln_binomial_coeff(&t, 10, 3).unwrap(), 120f64.ln(), max_relative = 1e-14);
        for q in [0.4, 1.0, 1.6] {
            let t = QFactorialTable::new(par(q), 100);
            assert_eq!(q_ln_binomial_coeff(&t, 40, 0).unwrap(), 0.0);
            assert_eq!(q_ln_binomial_coeff(&t, 40, 40).unwrap(), 0.0);
            for k in 0..=40 {
                assert_eq!(
                    q_ln_binomial_coeff(&t, 40, k).unwrap(),
                    q_ln_binomial_coeff(&t, 40, 40 - k).unwrap()
                );
            }
        }
        assert!(q_ln_binomial_coeff(&t, 10, 11).is_err());
        assert!(q_ln_binomial_coeff(&t, 101, 1).is_err());
    }

    #[test]
    fn multinomial_examples() {
        let t = QFactorialTable::new(par(1.0), 20);
        assert_relative_eq!(q_ln_multinomial_coeff(&t, 6, &[2, 2, 2]).unwrap(), 90f64.ln(), max_relative = 1e-14);
        assert_eq!(q_ln_multinomial_coeff(&t, 7, &[7]).unwrap(), 0.0);
        assert!(matches!(q_ln_multinomial_coeff(&t, 6, &[2, 2]), Err(Error::Constraint(_))));
        let t = QFactorialTable::new(par(0.7), 20);
        assert_eq!(
            q_ln_multinomial_coeff(&t, 20, &[6, 14]).unwrap(),
            q_ln_binomial_coeff(&t, 20, 6).unwrap()
        );
    }

    #[test]
    fn tsallis_examples() {
        let degenerate = ProbVector::new(vec![1.0, 0.0]).unwrap();
        let fair = ProbVector::binary(0.5).unwrap();
        for q in [0.5, 1.0, 2.0] {
            assert_eq!(tsallis_entropy(q, &degenerate), 0.0);
        }
        assert_relative_eq!(tsallis_entropy(2.0, &fair), 0.5, max_relative = 1e-15);
        assert_relative_eq!(tsallis_entropy(1.0, &fair), 2f64.ln(), max_relative = 1e-15);
        // direct definition away from q = 1
        let p = ProbVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        for q in [0.3, 1.4, 3.0] {
            let direct = (1.0 - p.components().iter().map(|x| x.powf(q)).sum::<f64>()) / (q - 1.0);
            assert_relative_eq!(tsallis_entropy(q, &p), direct, max_relative = 1e-13);
        }
    }

    #[test]
    fn binomial_entropy_residual_examples() {
        let t = QFactorialTable::new(par(1.0), 200_000);
        let c = estimate_c_q(&t, 100_000).unwrap();
        assert!(binomial_entropy_residual(&t, &c, 1000, 500).unwrap().abs() < 1e-3);
        assert!(binomial_entropy_residual(&t, &c, 1000, 0).is_err());
        assert!(binomial_entropy_residual(&t, &c, 1000, 1000).is_err());

        let t = QFactorialTable::new(par(0.5), 400_000);
        let c = estimate_c_q(&t, 100_000).unwrap();
        for n in [1000usize, 10_000] {
            let r1 = binomial_entropy_residual(&t, &c, n, n / 2).unwrap().abs();
            let r4 = binomial_entropy_residual(&t, &c, 4 * n, 2 * n).unwrap().abs();
            assert!((r4 / r1 - 0.5).abs() < 0.15, "ratio {}", r4 / r1);
        }

        let t = QFactorialTable::new(par(1.5), 200_000);
        let c = estimate_c_q(&t, 100_000).unwrap();
        let n = 100_000usize;
        let r = binomial_entropy_residual(&t, &c, n, n / 2).unwrap();
        assert!(r.abs() < 10.0 * (n as f64).powf(-1.5));
        let ns = [1000usize, 10_000, 100_000];
        let ys: Vec<f64> = ns
            .iter()
            .map(|&n| binomial_entropy_residual(&t, &c, n, n / 2).unwrap().abs().ln())
            .collect();
        let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
        assert!((ols_slope(&xs, &ys) + 1.5).abs() < 0.3);
    }

    // (2-q)/n^{2-q} · ln_q multinomial → S_{2-q}(parts/n); the gap shrinks like ln_q(n)/n^{2-q}.
    #[test]
    fn multinomial_tracks_tsallis_entropy() {
        for q in [0.5, 1.0, 1.5] {
            let p = par(q);
            let t = QFactorialTable::new(p, 100_000);
            let dual = 2.0 - q;
            let ns = [1000usize, 10_000, 100_000];
            let mut gaps = Vec::new();
            let mut refs = Vec::new();
            for &n in &ns {
                let parts = [n / 5, 3 * n / 10, n / 2];
                let lm = q_ln_multinomial_coeff(&t, n, &parts).unwrap();
                let nf = n as f64;
                let freq = ProbVector::new(parts.iter().map(|&m| m as f64 / nf).collect()).unwrap();
                let s = tsallis_entropy(dual, &freq);
                let scaled = dual / pow(nf, dual) * lm;
                assert!(scaled < s, "approaches from below");
                gaps.push((s - scaled).ln());
                refs.push((p.ln(nf).unwrap() / pow(nf, dual)).ln());
            }
            let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
            let slope = ols_slope(&xs, &gaps);
            let expected = ols_slope(&xs, &refs);
            assert!((slope - expected).abs() < 0.3, "q = {q}: {slope} vs {expected}");
        }
    }
}
