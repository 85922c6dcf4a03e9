//! Deformed elementary functions: the q-logarithm, the q-exponential and the
//! q-product, together with the validated deformation parameter they share.
//!
//! All three reduce to `ln`, `exp` and ordinary multiplication at `q = 1`.
//! Inside a band of width `classical_eps` around `q = 1` the classical
//! formulas are used directly; outside it the deformed formulas are evaluated
//! through `expm1`/`log1p` so that no branch suffers cancellation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default half-width of the band around `q = 1` treated as classical.
pub const DEFAULT_CLASSICAL_EPS: f64 = 1e-8;

/// Qualitative behaviour of `exp_q` selected by the deformation parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `q < 1`: `exp_q` vanishes past a finite cutoff.
    CompactSupport,
    /// `q` within `classical_eps` of 1: ordinary `ln`/`exp`.
    ClassicalLimit,
    /// `q > 1`: `exp_q` decays as a power law and diverges at its boundary.
    HeavyTail,
}

/// Deformation parameter `q ∈ (0, 2)` with its regime classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformationParameter {
    q: f64,
    regime: Regime,
    classical_eps: f64,
}

impl DeformationParameter {
    pub fn new(q: f64) -> Result<Self> {
        Self::with_classical_eps(q, DEFAULT_CLASSICAL_EPS)
    }

    pub fn with_classical_eps(q: f64, classical_eps: f64) -> Result<Self> {
        if !(q > 0.0 && q < 2.0) {
            return Err(Error::InvalidDeformation(q));
        }
        if !(classical_eps > 0.0 && classical_eps < 0.5) {
            return Err(Error::InvalidParameter {
                name: "classical_eps",
                value: classical_eps,
                reason: "must lie in (0, 0.5)".into(),
            });
        }
        let regime = if q <= 1.0 - classical_eps {
            Regime::CompactSupport
        } else if q >= 1.0 + classical_eps {
            Regime::HeavyTail
        } else {
            Regime::ClassicalLimit
        };
        Ok(Self {
            q,
            regime,
            classical_eps,
        })
    }

    /// The classical parameter `q = 1`.
    pub fn classical() -> Self {
        Self::new(1.0).expect("q = 1 is valid")
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn classical_eps(&self) -> f64 {
        self.classical_eps
    }

    pub fn is_classical(&self) -> bool {
        self.regime == Regime::ClassicalLimit
    }

    /// `1 - q`, the exponent of the deformed power kernel.
    pub fn one_minus_q(&self) -> f64 {
        1.0 - self.q
    }

    /// `2 - q`.
    pub fn two_minus_q(&self) -> f64 {
        2.0 - self.q
    }

    /// The dual parameter `2 - q`, which indexes the entropies and
    /// divergences that appear in the asymptotics.
    pub fn dual(&self) -> Self {
        Self::with_classical_eps(2.0 - self.q, self.classical_eps).expect("2 - q lies in (0, 2)")
    }

    pub fn ln(&self, x: f64) -> Result<f64> {
        q_ln(*self, x)
    }

    pub fn exp(&self, x: f64) -> Result<f64> {
        q_exp(*self, x)
    }

    pub fn product(&self, x: f64, y: f64) -> Result<f64> {
        q_product(*self, x, y)
    }
}

impl std::fmt::Display for DeformationParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.q)
    }
}

/// The power kernel `x^e = exp(e · ln x)`. Every deformed power in the crate
/// is evaluated here.
#[inline]
pub fn pow(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        (e * x.ln()).exp()
    }
}

/// `x^e - 1` without cancellation for `x^e` close to 1.
#[inline]
pub fn pow_m1(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        0.0
    } else {
        (e * x.ln()).exp_m1()
    }
}

/// q-logarithm `ln_q x = (x^{1-q} - 1) / (1 - q)`.
pub fn q_ln(param: DeformationParameter, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            function: "q_ln",
            value: x,
            reason: "x must be positive",
        });
    }
    Ok(q_ln_unchecked(param, x))
}

/// `q_ln` for callers that have already established `x > 0`.
#[inline]
pub(crate) fn q_ln_unchecked(param: DeformationParameter, x: f64) -> f64 {
    if param.is_classical() {
        x.ln()
    } else {
        let e = param.one_minus_q();
        pow_m1(x, e) / e
    }
}

/// q-exponential `exp_q x = [1 + (1 - q) x]^{1/(1-q)}`.
///
/// At or past the boundary `1 + (1 - q) x <= 0` the result is 0 for `q < 1`
/// (compact support) and a domain error for `q > 1`, where the power diverges.
pub fn q_exp(param: DeformationParameter, x: f64) -> Result<f64> {
    ln_q_exp(param, x).map(f64::exp)
}

/// Natural logarithm of `exp_q(x)`; `-inf` past the compact-support cutoff.
///
/// Lets callers work with probabilities far below the `f64` underflow limit.
pub fn ln_q_exp(param: DeformationParameter, x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain {
            function: "q_exp",
            value: x,
            reason: "argument is NaN",
        });
    }
    if param.is_classical() {
        return Ok(x);
    }
    let e = param.one_minus_q();
    let z = e * x;
    if z <= -1.0 {
        return match param.regime() {
            Regime::CompactSupport => Ok(f64::NEG_INFINITY),
            _ => Err(Error::Domain {
                function: "q_exp",
                value: x,
                reason: "1 + (1 - q) x <= 0 with q > 1 (divergent power)",
            }),
        };
    }
    Ok(z.ln_1p() / e)
}

/// q-product `x ⊗_q y = [x^{1-q} + y^{1-q} - 1]^{1/(1-q)}`.
pub fn q_product(param: DeformationParameter, x: f64, y: f64) -> Result<f64> {
    for v in [x, y] {
        if !(v > 0.0) {
            return Err(Error::Domain {
                function: "q_product",
                value: v,
                reason: "operands must be positive",
            });
        }
    }
    if param.is_classical() {
        return Ok(x * y);
    }
    let e = param.one_minus_q();
    let base = pow_m1(x, e) + pow_m1(y, e) + 1.0;
    if !(base > 0.0) {
        return Err(Error::Domain {
            function: "q_product",
            value: base,
            reason: "x^{1-q} + y^{1-q} - 1 must be positive",
        });
    }
    Ok(pow(base, 1.0 / e))
}
