//! Tsallis q-divergence, α-divergence, the exact α ↔ q correspondence, the
//! large-deviation rate function and the α-geometry index mapping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qalgebra::DeformationParameter;

/// Tolerance on `Σ p_i = 1`.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Half-width of the band around `α = ±1` handled by the KL branches.
pub const ALPHA_BRANCH_EPS: f64 = 1e-8;

/// A finite probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Constraint("probability vector is empty".into()));
        }
        if let Some((i, &v)) = components
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= 0.0 && v.is_finite()))
        {
            return Err(Error::Constraint(format!(
                "component {i} = {v} is not a finite nonnegative number"
            )));
        }
        let total = crate::numeric::compensated_sum(&components);
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::Constraint(format!(
                "components sum to {total}, expected 1"
            )));
        }
        Ok(Self(components))
    }

    /// The two-point vector `(x, 1 - x)`.
    pub fn binary(x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::InvalidParameter {
                name: "x",
                value: x,
                reason: "must lie in [0, 1]".into(),
            });
        }
        Self::new(vec![x, 1.0 - x])
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for ProbVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ProbVector> for Vec<f64> {
    fn from(p: ProbVector) -> Self {
        p.0
    }
}

fn check_lengths(p: &ProbVector, r: &ProbVector) -> Result<()> {
    if p.len() != r.len() {
        return Err(Error::Constraint(format!(
            "length mismatch: {} vs {}",
            p.len(),
            r.len()
        )));
    }
    Ok(())
}

/// Kullback–Leibler divergence `Σ p_i ln(p_i / r_i)` with `0 ln 0 = 0`.
pub fn kl_divergence(p: &ProbVector, r: &ProbVector) -> Result<f64> {
    check_lengths(p, r)?;
    let mut acc = crate::numeric::Dd::ZERO;
    for (i, (&pi, &ri)) in p.components().iter().zip(r.components()).enumerate() {
        if pi == 0.0 {
            continue;
        }
        if ri == 0.0 {
            return Err(Error::Support {
                index: i,
                reason: "p_i > 0 but r_i = 0",
            });
        }
        acc = acc.add_f64(pi * (pi / ri).ln());
    }
    Ok(acc.to_f64())
}

/// Tsallis relative entropy `D_q(p‖r) = (1 - Σ p_i^q r_i^{1-q}) / (1 - q)`.
///
/// Evaluated as `Σ p_i ln_{2-q}(p_i / r_i)`, the same quantity written so
/// that each term is an `expm1` and nothing cancels near `q = 1`.
pub fn q_divergence(param: DeformationParameter, p: &ProbVector, r: &ProbVector) -> Result<f64> {
    if param.is_classical() {
        return kl_divergence(p, r);
    }
    check_lengths(p, r)?;
    let e = param.q() - 1.0;
    let mut acc = crate::numeric::Dd::ZERO;
    for (i, (&pi, &ri)) in p.components().iter().zip(r.components()).enumerate() {
        if pi == 0.0 {
            continue;
        }
        if ri == 0.0 {
            return Err(Error::Support {
                index: i,
                reason: "p_i > 0 but r_i = 0",
            });
        }
        acc = acc.add_f64(pi * (e * (pi / ri).ln()).exp_m1() / e);
    }
    Ok(acc.to_f64())
}

/// α-divergence with its two Kullback–Leibler limit branches:
/// `α = 1` gives `KL(r‖p)` and `α = -1` gives `KL(p‖r)`.
pub fn alpha_divergence(alpha: f64, p: &ProbVector, r: &ProbVector) -> Result<f64> {
    check_lengths(p, r)?;
    if (alpha - 1.0).abs() < ALPHA_BRANCH_EPS {
        return kl_divergence(r, p);
    }
    if (alpha + 1.0).abs() < ALPHA_BRANCH_EPS {
        return kl_divergence(p, r);
    }
    let a = (1.0 - alpha) / 2.0;
    let b = (1.0 + alpha) / 2.0;
    // Σ p_i^a r_i^b - 1 = Σ p_i expm1(-b ln(p_i/r_i)), the same terms as q_divergence at q = a
    let mut acc = crate::numeric::Dd::ZERO;
    for (i, (&pi, &ri)) in p.components().iter().zip(r.components()).enumerate() {
        let term = match (pi == 0.0, ri == 0.0) {
            (true, true) => 0.0,
            (true, false) if a > 0.0 => 0.0,
            (false, true) if b > 0.0 => -pi,
            (true, false) | (false, true) => {
                return Err(Error::Support {
                    index: i,
                    reason: "zero component raised to a negative power",
                })
            }
            (false, false) => pi * (-b * (pi / ri).ln()).exp_m1(),
        };
        acc = acc.add_f64(term);
    }
    Ok(-4.0 / (1.0 - alpha * alpha) * acc.to_f64())
}

/// `q = (1 - α) / 2`.
pub fn q_from_alpha(alpha: f64) -> f64 {
    (1.0 - alpha) / 2.0
}

/// `α = 1 - 2q`.
pub fn alpha_from_q(q: f64) -> f64 {
    1.0 - 2.0 * q
}

/// `q_from_alpha` with the image validated against `(0, 2)`.
pub fn q_from_alpha_checked(alpha: f64) -> Result<DeformationParameter> {
    DeformationParameter::new(q_from_alpha(alpha)).map_err(|_| Error::InvalidParameter {
        name: "alpha",
        value: alpha,
        reason: "maps to q outside (0, 2); alpha must lie in (-3, 1)".into(),
    })
}

/// Rate function `I(x) = D_{2-q}((x, 1-x) ‖ (r, 1-r)) / (2 - q)`.
///
/// The generalized LDP limit of `n^{q-2} ln_q P(mean < x)` is `-I(x)`.
pub fn rate_function(param: DeformationParameter, x: f64, r: f64) -> Result<f64> {
    for (name, v) in [("x", x), ("r", r)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::InvalidParameter {
                name,
                value: v,
                reason: "must lie in (0, 1)".into(),
            });
        }
    }
    let dual = param.dual();
    let d = q_divergence(dual, &ProbVector::binary(x)?, &ProbVector::binary(r)?)?;
    Ok(d / dual.q())
}

/// Exponent and divergence index obtained by substituting `q = (1-α)/2`
/// into the q-divergence expansion of the generalized binomial law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorollaryIndex {
    /// Power of `n` multiplying the divergence, `(3 + α) / 2 = 2 - q`.
    pub scaling_exponent: f64,
    /// α-index of the divergence, `-2 - α`.
    pub divergence_index: f64,
}

pub fn corollary_index_map(alpha: f64) -> Result<CorollaryIndex> {
    q_from_alpha_checked(alpha)?;
    Ok(CorollaryIndex {
        scaling_exponent: (3.0 + alpha) / 2.0,
        divergence_index: -2.0 - alpha,
    })
}
