//! Fixtures shared by the criterion benchmarks.

use qdeform_core::{DeformationParameter, NormalizationMode, QBinomialSpec, QFactorialTable};

/// Deformation indices covering the compact, classical and heavy-tailed regimes.
pub const QS: [f64; 3] = [0.5, 1.0, 1.5];

pub fn param(q: f64) -> DeformationParameter {
    DeformationParameter::new(q).expect("benchmark q lies in (0, 2)")
}

pub fn spec(q: f64, n: usize, mode: NormalizationMode) -> QBinomialSpec {
    QBinomialSpec::new(param(q), n, 0.5, mode).expect("valid benchmark spec")
}

pub fn table(q: f64, max_n: usize) -> QFactorialTable {
    QFactorialTable::new(param(q), max_n)
}
