//! The generalized (q-deformed) binomial distribution, built in the q-log
//! domain and normalized either by solving for `ln_q C_q` or by shifting to the
//! largest weight and dividing by the total.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{log_sum_exp, Dd};
use crate::qalgebra::{ln_q_exp, pow, q_ln_unchecked, DeformationParameter, Regime};
use crate::qcombinatorics::QFactorialTable;

const MAX_BRACKET_EXPANSIONS: usize = 200;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormalizationMode {
    /// `b_k = exp_q(S_k + t)` with `t = ln_q C_q` chosen so that `Σ b_k = 1`.
    ExactCq,
    /// `b_k = exp_q(S_k - S_max) / Σ_j exp_q(S_j - S_max)`.
    #[default]
    MaxShift,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QBinomialSpec {
    pub param: DeformationParameter,
    pub n: usize,
    pub r: f64,
    pub mode: NormalizationMode,
}

impl QBinomialSpec {
    pub fn new(param: DeformationParameter, n: usize, r: f64, mode: NormalizationMode) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter {
                name: "n",
                value: n as f64,
                reason: "must be at least 2".into(),
            });
        }
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidParameter {
                name: "r",
                value: r,
                reason: "must lie strictly inside (0, 1)".into(),
            });
        }
        Ok(Self { param, n, r, mode })
    }

    /// `n^{q/2} √(r(1-r))`.
    pub fn sigma_q(&self) -> f64 {
        pow(self.n as f64, self.param.q() / 2.0) * (self.r * (1.0 - self.r)).sqrt()
    }

    /// `⌊n r⌋`.
    pub fn floor_mean(&self) -> usize {
        (self.n as f64 * self.r).floor() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NormMeta {
    /// Root `t = ln_q C_q` of the normalization equation.
    Exact { t: f64 },
    /// The largest q-log weight, subtracted before exponentiating.
    Shift { shift: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QBinomialPmf {
    pub spec: QBinomialSpec,
    /// Unnormalized q-log weights `S_k`, `k = 0..=n`.
    pub qlog_weights: Vec<f64>,
    pub probs: Vec<f64>,
    /// Natural logs of `probs`, finite where `probs` underflows to 0 but the
    /// q-exponential has not reached its cutoff.
    pub ln_probs: Vec<f64>,
    pub norm_meta: NormMeta,
    pub peak_index: usize,
    pub sigma_q: f64,
    /// Standardized grid `x_k = (k - n r) / sigma_q`.
    pub grid: Vec<f64>,
}

/// Unnormalized q-log weight
/// `S_k = ln_q C(n,k)_q + [k^{2-q} ln_{2-q} r + (n-k)^{2-q} ln_{2-q}(1-r)] / (2-q)`.
pub fn qlog_weight(spec: &QBinomialSpec, table: &QFactorialTable, k: usize) -> Result<f64> {
    let coeff = table.binomial_dd(spec.n, k)?;
    Ok(coeff.add_f64(bernoulli_part(spec, k)).to_f64())
}

fn bernoulli_part(spec: &QBinomialSpec, k: usize) -> f64 {
    let dual = spec.param.dual();
    let a = dual.q();
    let term = |m: usize, p: f64| {
        if m == 0 {
            0.0
        } else {
            pow(m as f64, a) * q_ln_unchecked(dual, p)
        }
    };
    (term(k, spec.r) + term(spec.n - k, 1.0 - spec.r)) / a
}

fn check_table(spec: &QBinomialSpec, table: &QFactorialTable) -> Result<()> {
    if table.param().q() != spec.param.q() {
        return Err(Error::Constraint(format!(
            "factorial table was built for q = {}, distribution has q = {}",
            table.param().q(),
            spec.param.q()
        )));
    }
    if table.max_n() < spec.n {
        return Err(Error::Range {
            index: spec.n,
            max: table.max_n(),
        });
    }
    Ok(())
}

/// Natural log of `exp_q(x)` with `+inf` past the upper cutoff for `q > 1`.
fn ln_q_exp_or_inf(param: DeformationParameter, x: f64) -> f64 {
    ln_q_exp(param, x).unwrap_or(f64::INFINITY)
}

fn mass_at(param: DeformationParameter, weights: &[f64], t: f64) -> f64 {
    let mut acc = Dd::ZERO;
    for &s in weights {
        let l = ln_q_exp_or_inf(param, s + t);
        if l == f64::INFINITY {
            return f64::INFINITY;
        }
        acc = acc.add_f64(l.exp());
    }
    acc.to_f64()
}

/// Solve `Σ exp_q(S_k + t) = 1` for `t`.
fn solve_normalization(param: DeformationParameter, weights: &[f64], s_max: f64) -> Result<f64> {
    let mut hi = -s_max + 1.0;
    let mut lo = -s_max.abs() - 1.0;
    // exp_q(1) > 1, so the peak term alone exceeds 1 at `hi`
    debug_assert!(mass_at(param, weights, hi) > 1.0);
    let mut width = hi - lo;
    let mut expansions = 0;
    while mass_at(param, weights, lo) >= 1.0 {
        if expansions == MAX_BRACKET_EXPANSIONS {
            return Err(Error::Bracket { expansions, lo, hi });
        }
        hi = lo;
        width *= 2.0;
        lo -= width;
        expansions += 1;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mass_at(param, weights, mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let err_lo = (mass_at(param, weights, lo) - 1.0).abs();
    let err_hi = (mass_at(param, weights, hi) - 1.0).abs();
    Ok(if err_lo <= err_hi { lo } else { hi })
}

/// Build the distribution for `k = 0..=n`.
pub fn build_pmf(spec: &QBinomialSpec, table: &QFactorialTable) -> Result<QBinomialPmf> {
    check_table(spec, table)?;
    let n = spec.n;
    let param = spec.param;
    let qlog_weights: Vec<f64> = (0..=n)
        .into_par_iter()
        .map(|k| table.binomial_dd(n, k).map(|c| c.add_f64(bernoulli_part(spec, k)).to_f64()))
        .collect::<Result<_>>()?;
    let s_max = qlog_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let (ln_probs, norm_meta) = match spec.mode {
        NormalizationMode::ExactCq => {
            let t = solve_normalization(param, &qlog_weights, s_max)?;
            let ln_probs = qlog_weights
                .iter()
                .map(|&s| ln_q_exp(param, s + t))
                .collect::<Result<Vec<f64>>>()?;
            (ln_probs, NormMeta::Exact { t })
        }
        NormalizationMode::MaxShift => {
            let ln_w = qlog_weights
                .iter()
                .map(|&s| ln_q_exp(param, s - s_max))
                .collect::<Result<Vec<f64>>>()?;
            let ln_total = log_sum_exp(&ln_w);
            let ln_probs = ln_w.iter().map(|&l| l - ln_total).collect();
            (ln_probs, NormMeta::Shift { shift: s_max })
        }
    };
    let probs: Vec<f64> = ln_probs.iter().map(|&l| l.exp()).collect();

    let mut peak_index = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p > probs[peak_index] {
            peak_index = k;
        }
    }
    let sigma_q = spec.sigma_q();
    let mean = n as f64 * spec.r;
    let grid = (0..=n).map(|k| (k as f64 - mean) / sigma_q).collect();
    Ok(QBinomialPmf {
        spec: *spec,
        qlog_weights,
        probs,
        ln_probs,
        norm_meta,
        peak_index,
        sigma_q,
        grid,
    })
}

impl QBinomialPmf {
    pub fn n(&self) -> usize {
        self.spec.n
    }

    /// Probability at the floor of the mean, `b(⌊n r⌋)`.
    pub fn peak_probability(&self) -> f64 {
        self.probs[self.spec.floor_mean()]
    }

    /// Second central difference of the q-log pmf at `k = ⌊n r⌋`.
    ///
    /// Taken on the weights `S_k`: they differ from `ln_q b_k` by the constant
    /// `ln_q C_q`, which drops out of the difference, and unlike the q-log of
    /// the stored probabilities they stay finite past a compact-support cutoff.
    pub fn qlog_curvature(&self) -> Result<f64> {
        let k = self.spec.floor_mean();
        if k == 0 || k >= self.n() {
            return Err(Error::Range {
                index: k,
                max: self.n() - 1,
            });
        }
        let s = &self.qlog_weights;
        Ok((s[k + 1] - s[k]) - (s[k] - s[k - 1]))
    }

    fn last_index_below(&self, x: f64) -> usize {
        ((self.n() as f64 * x).floor() as usize).min(self.n())
    }

    /// `P(mean < x) = Σ_{k ≤ ⌊n x⌋} b_k`.
    pub fn cumulative_below(&self, x: f64) -> f64 {
        let m = self.last_index_below(x);
        self.probs[..=m].iter().copied().sum::<Dd>().to_f64()
    }

    /// Natural log of `cumulative_below(x)`, accurate where the sum itself
    /// underflows; `-inf` only if every term lies past the support cutoff.
    pub fn ln_cumulative_below(&self, x: f64) -> f64 {
        let m = self.last_index_below(x);
        log_sum_exp(&self.ln_probs[..=m])
    }

    /// First `k ≤ ⌊n r⌋` with `b_k < b_{k-1}`, if any.
    pub fn monotonicity_violation(&self) -> Option<usize> {
        let m = self.spec.floor_mean();
        (1..=m).find(|&k| self.ln_probs[k] < self.ln_probs[k - 1])
    }

    /// True when `b_k = 0` can occur, i.e. the q-exponential has a cutoff.
    pub fn has_compact_support(&self) -> bool {
        self.spec.param.regime() == Regime::CompactSupport
    }
}
