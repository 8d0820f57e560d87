//! A-priori error bounds for the new two-step scheme and the Picard-Mann
//! hybrid under a weak contraction with constant `δ`.
//!
//! ```text
//! ‖x_{n+1} − p‖ ≤ δ^{2(n+1)} ∏_{k=0}^{n} (1 − α_k(1−δ))(1 − β_k(1−δ)) ‖x_0 − p‖
//! ‖u_{n+1} − p‖ ≤ δ^{n+1}    ∏_{k=0}^{n} (1 − α_k(1−δ))               ‖u_0 − p‖
//! ```
//!
//! For a linear map `Tx = δx` both inequalities are equalities.

use crate::error::{Error, Result};
use crate::schedule::Sequence;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundInputs {
    pub delta: f64,
    pub alpha: Sequence,
    pub beta: Sequence,
    pub initial_err: f64,
    pub n: usize,
}

impl BoundInputs {
    pub fn new(delta: f64, alpha: Sequence, beta: Sequence, initial_err: f64, n: usize) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {delta}")));
        }
        if !(initial_err >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "initial error must be non-negative, got {initial_err}"
            )));
        }
        Ok(Self {
            delta,
            alpha,
            beta,
            initial_err,
            n,
        })
    }

    pub fn with_n(&self, n: usize) -> Self {
        Self { n, ..self.clone() }
    }

    fn factor(&self, value: f64) -> f64 {
        1.0 - value * (1.0 - self.delta)
    }
}

/// Bound on `‖x_{n+1} − p‖` for the new two-step scheme.
pub fn new_scheme_bound(inp: &BoundInputs) -> f64 {
    (0..=inp.n).fold(inp.initial_err, |acc, k| {
        acc * inp.delta * inp.delta * inp.factor(inp.alpha.at(k)) * inp.factor(inp.beta.at(k))
    })
}

/// Bound on `‖u_{n+1} − p‖` for the Picard-Mann hybrid.
pub fn picard_mann_bound(inp: &BoundInputs) -> f64 {
    (0..=inp.n).fold(inp.initial_err, |acc, k| acc * inp.delta * inp.factor(inp.alpha.at(k)))
}

/// `δ^{n+1} ∏_{k=0}^{n} (1 − β_k(1−δ))`, the quotient of the two bounds for
/// equal positive starting errors.
pub fn bound_ratio(inp: &BoundInputs) -> f64 {
    (0..=inp.n).fold(1.0, |acc, k| acc * inp.delta * inp.factor(inp.beta.at(k)))
}
