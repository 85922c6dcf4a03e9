//! Convergence experiments for the generalized binomial law: the
//! large-deviation statistic, q-log residuals around the Gaussian-type peak,
//! scaled densities and their q-Gaussian fits.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergence::rate_function;
use crate::error::{Error, Result};
use crate::numeric::ols_slope;
use crate::qalgebra::{pow, q_exp, q_ln, DeformationParameter};
use crate::qbinomial::{build_pmf, NormMeta, NormalizationMode, QBinomialPmf, QBinomialSpec};
use crate::qcombinatorics::QFactorialTable;

const MIN_CLT_POINTS: usize = 5;
const MIN_FIT_POINTS: usize = 10;

/// Which large-deviation statistic a series records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LdpStatistic {
    /// `n^{q-2} ln_q P(mean < x)`.
    Cumulative,
    /// `n^{q-2} ln_q b(⌊n x⌋)` with the exact `C_q` normalization.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdpEntry {
    pub n: usize,
    pub scaled_stat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdpSeries {
    pub param: DeformationParameter,
    pub r: f64,
    pub x: f64,
    pub statistic: LdpStatistic,
    pub entries: Vec<LdpEntry>,
    /// Minus the rate function at `x`.
    pub target: f64,
}

impl LdpSeries {
    pub fn abs_errors(&self) -> Vec<f64> {
        self.entries.iter().map(|e| (e.scaled_stat - self.target).abs()).collect()
    }
}

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::InvalidParameter {
            name: "x",
            value: x,
            reason: "must lie in (0, 1)".into(),
        });
    }
    Ok(())
}

/// `ln_q` of a probability given its natural log.
fn q_ln_from_ln(param: DeformationParameter, ln_p: f64) -> f64 {
    if param.is_classical() {
        ln_p
    } else {
        let e = param.one_minus_q();
        (e * ln_p).exp_m1() / e
    }
}

/// `n^{q-2} ln_q P(mean < x)` for the distribution described by `spec`.
///
/// The cumulative mass is accumulated in the natural-log domain, so only a
/// mass that is exactly zero (every contributing term beyond the
/// compact-support cutoff) is reported as a failure.
pub fn ldp_scaled_statistic(spec: &QBinomialSpec, table: &QFactorialTable, x: f64) -> Result<f64> {
    check_x(x)?;
    let pmf = build_pmf(spec, table)?;
    let ln_p = pmf.ln_cumulative_below(x);
    if ln_p == f64::NEG_INFINITY {
        let k = ((spec.n as f64 * x).floor() as usize).min(spec.n);
        return Err(Error::ZeroMass {
            n: spec.n,
            x,
            largest_k: k,
            qlog_weight: pmf.qlog_weights[k],
        });
    }
    let scale = pow(spec.n as f64, spec.param.two_minus_q());
    Ok(q_ln_from_ln(spec.param, ln_p) / scale)
}

/// `n^{q-2} (S_m + ln_q C_q)` at `m = ⌊n x⌋`: the q-log of the boundary term
/// of the cumulative sum, with the exact normalization whatever `spec.mode` is.
///
/// Unlike the cumulative statistic it stays defined past the support cutoff.
pub fn ldp_boundary_statistic(spec: &QBinomialSpec, table: &QFactorialTable, x: f64) -> Result<f64> {
    check_x(x)?;
    let exact = QBinomialSpec {
        mode: NormalizationMode::ExactCq,
        ..*spec
    };
    let pmf = build_pmf(&exact, table)?;
    let NormMeta::Exact { t } = pmf.norm_meta else {
        unreachable!("exact mode stores its root")
    };
    let k = ((spec.n as f64 * x).floor() as usize).min(spec.n);
    let scale = pow(spec.n as f64, spec.param.two_minus_q());
    Ok((pmf.qlog_weights[k] + t) / scale)
}

/// Evaluate one statistic over increasing sizes. Sizes run in parallel and
/// share a single factorial table; failures carry the offending `n`.
pub fn ldp_convergence_series(
    param: DeformationParameter,
    r: f64,
    x: f64,
    n_list: &[usize],
    mode: NormalizationMode,
    statistic: LdpStatistic,
) -> Result<LdpSeries> {
    check_x(x)?;
    check_sizes(n_list)?;
    let target = -rate_function(param, x, r)?;
    let table = QFactorialTable::new(param, *n_list.last().unwrap());
    let entries = n_list
        .par_iter()
        .map(|&n| {
            let spec = QBinomialSpec::new(param, n, r, mode)?;
            let stat = match statistic {
                LdpStatistic::Cumulative => ldp_scaled_statistic(&spec, &table, x),
                LdpStatistic::Boundary => ldp_boundary_statistic(&spec, &table, x),
            };
            stat.map(|scaled_stat| LdpEntry { n, scaled_stat }).map_err(|e| e.at_size(n))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LdpSeries {
        param,
        r,
        x,
        statistic,
        entries,
        target,
    })
}

fn check_sizes(n_list: &[usize]) -> Result<()> {
    if n_list.is_empty() {
        return Err(Error::Constraint("size list is empty".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Constraint("sizes must be strictly increasing".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CltResidual {
    pub k: usize,
    pub x_k: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltResidualReport {
    pub param: DeformationParameter,
    pub r: f64,
    pub n: usize,
    pub window: f64,
    pub residuals: Vec<CltResidual>,
    pub max_abs_residual: f64,
}

/// `ln_q b_k - ln_q b_{⌊nr⌋} + x_k²/2` for every `|x_k| ≤ window`.
///
/// The q-log values are the weights `S_k` of the exact normalization; their
/// differences do not depend on `C_q`.
pub fn clt_residuals(pmf: &QBinomialPmf, window: f64) -> Result<CltResidualReport> {
    if !(window > 0.0) {
        return Err(Error::InvalidParameter {
            name: "window",
            value: window,
            reason: "must be positive".into(),
        });
    }
    let center = pmf.qlog_weights[pmf.spec.floor_mean()];
    let residuals: Vec<CltResidual> = pmf
        .grid
        .iter()
        .enumerate()
        .filter(|(_, x)| x.abs() <= window)
        .map(|(k, &x_k)| CltResidual {
            k,
            x_k,
            residual: pmf.qlog_weights[k] - center + 0.5 * x_k * x_k,
        })
        .collect();
    if residuals.len() < MIN_CLT_POINTS {
        return Err(Error::Window {
            window,
            found: residuals.len(),
            needed: MIN_CLT_POINTS,
        });
    }
    let max_abs_residual = residuals.iter().map(|c| c.residual.abs()).fold(0.0, f64::max);
    Ok(CltResidualReport {
        param: pmf.spec.param,
        r: pmf.spec.r,
        n: pmf.n(),
        window,
        residuals,
        max_abs_residual,
    })
}

/// Least-squares slope of `ln(residual)` against `ln(n)`.
pub fn residual_decay_slope(points: &[(usize, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::Degenerate(format!("need at least 3 points, got {}", points.len())));
    }
    if let Some(&(n, v)) = points.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::Degenerate(format!("residual {v} at n = {n} is not positive")));
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, v)| v.ln()).collect();
    Ok(ols_slope(&xs, &ys))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityPoint {
    pub x: f64,
    pub g: f64,
}

/// `(x_k, sigma_q · b_k)` for every `k`.
pub fn scaled_density(pmf: &QBinomialPmf) -> Vec<DensityPoint> {
    pmf.grid
        .iter()
        .zip(&pmf.probs)
        .map(|(&x, &p)| DensityPoint { x, g: pmf.sigma_q * p })
        .collect()
}

/// Linear interpolation of a density sorted by `x`; `None` outside its range.
pub fn density_at(density: &[DensityPoint], x: f64) -> Option<f64> {
    let first = density.first()?;
    let last = density.last()?;
    if x < first.x || x > last.x {
        return None;
    }
    let i = density.partition_point(|p| p.x <= x);
    if i == 0 {
        return Some(first.g);
    }
    if i == density.len() {
        return Some(last.g);
    }
    let (a, b) = (density[i - 1], density[i]);
    let w = (x - a.x) / (b.x - a.x);
    Some(a.g + w * (b.g - a.g))
}

/// Largest gap between two densities over `|x| ≤ window`, each sampled at its
/// own grid points and compared against the other's interpolant.
pub fn density_sup_distance(a: &[DensityPoint], b: &[DensityPoint], window: f64) -> f64 {
    let one_way = |from: &[DensityPoint], to: &[DensityPoint]| {
        from.iter()
            .filter(|p| p.x.abs() <= window)
            .filter_map(|p| density_at(to, p.x).map(|g| (g - p.g).abs()))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Fitted kernel `amplitude · exp_q(-beta x²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QGaussianFit {
    pub param: DeformationParameter,
    pub beta: f64,
    pub amplitude: f64,
    pub sup_error: f64,
    pub window: f64,
}

impl QGaussianFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.amplitude * q_exp(self.param, -self.beta * x * x).unwrap_or(0.0)
    }

    /// Edge of the fitted kernel's support, finite only for `q < 1`.
    pub fn cutoff(&self) -> f64 {
        if self.param.q() < 1.0 && !self.param.is_classical() {
            (1.0 / (self.param.one_minus_q() * self.beta)).sqrt()
        } else {
            f64::INFINITY
        }
    }
}

/// Fit `A exp_q(-beta x²)` to a density over `|x| ≤ window`.
///
/// `A` is the density value closest to `x = 0`; `beta` is the regression
/// through the origin of `ln_q(g / A)` on `-x²`, using points with `g > 0`.
pub fn fit_q_gaussian(density: &[DensityPoint], param: DeformationParameter, window: f64) -> Result<QGaussianFit> {
    let inside: Vec<DensityPoint> = density.iter().copied().filter(|p| p.x.abs() <= window).collect();
    let positive = inside.iter().filter(|p| p.g > 0.0).count();
    if positive < MIN_FIT_POINTS {
        return Err(Error::Window {
            window,
            found: positive,
            needed: MIN_FIT_POINTS,
        });
    }
    let center = inside
        .iter()
        .copied()
        .min_by(|a, b| a.x.abs().total_cmp(&b.x.abs()))
        .expect("window is non-empty");
    let amplitude = center.g;
    if !(amplitude > 0.0) {
        return Err(Error::Degenerate("density vanishes at the centre".into()));
    }
    let (mut szz, mut syz) = (0.0, 0.0);
    for p in inside.iter().filter(|p| p.g > 0.0) {
        let z = -p.x * p.x;
        let y = q_ln(param, p.g / amplitude)?;
        szz += z * z;
        syz += y * z;
    }
    let beta = syz / szz;
    if !(szz > 0.0) || !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Degenerate(format!("regression gives beta = {beta}")));
    }
    let mut fit = QGaussianFit {
        param,
        beta,
        amplitude,
        sup_error: 0.0,
        window,
    };
    fit.sup_error = inside.iter().map(|p| (p.g - fit.eval(p.x)).abs()).fold(0.0, f64::max);
    Ok(fit)
}
