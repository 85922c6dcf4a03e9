//! Numerics for q-deformed (Tsallis) statistics: the q-logarithm and
//! q-exponential, q-factorials with their Stirling asymptotics, the
//! generalized binomial distribution built in the q-log domain, Tsallis and
//! α-divergences, and the large-deviation and central-limit experiments that
//! connect them.
//!
//! ```
//! use qdeform_core::{build_pmf, DeformationParameter, NormalizationMode, QBinomialSpec, QFactorialTable};
//!
//! let param = DeformationParameter::new(1.5)?;
//! let table = QFactorialTable::new(param, 1000);
//! let spec = QBinomialSpec::new(param, 1000, 0.5, NormalizationMode::MaxShift)?;
//! let pmf = build_pmf(&spec, &table)?;
//! assert!((pmf.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
//! # Ok::<(), qdeform_core::Error>(())
//! ```

// `!(x > 0.0)` is the NaN-rejecting guard used throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod divergence;
pub mod error;
pub mod limits;
pub mod numeric;
pub mod qalgebra;
pub mod qbinomial;
pub mod qcombinatorics;

pub use divergence::{
    alpha_divergence, alpha_from_q, corollary_index_map, kl_divergence, q_divergence, q_from_alpha,
    q_from_alpha_checked, rate_function, CorollaryIndex, ProbVector,
};
pub use error::{Error, Result};
pub use limits::{
    clt_residuals, density_at, density_sup_distance, fit_q_gaussian, ldp_boundary_statistic,
    ldp_convergence_series, ldp_scaled_statistic, residual_decay_slope, scaled_density, CltResidual,
    CltResidualReport, DensityPoint, LdpEntry, LdpSeries, LdpStatistic, QGaussianFit,
};
pub use qalgebra::{ln_q_exp, q_exp, q_ln, q_product, DeformationParameter, Regime};
pub use qbinomial::{build_pmf, qlog_weight, NormMeta, NormalizationMode, QBinomialPmf, QBinomialSpec};
pub use qcombinatorics::{
    binomial_entropy_residual, estimate_c_q, q_ln_binomial_coeff, q_ln_multinomial_coeff,
    stirling_defect, stirling_leading, stirling_refined, stirling_residual, tsallis_entropy,
    QFactorialTable, StirlingConstant,
};
