use crate::error::{Error, Result};

/// Numerical thresholds shared by every engine.
///
/// `abs_eps` is an absolute threshold on residual norms; `rank_eps` is a
/// singular-value (or eigenvalue) cutoff relative to the largest one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_eps: f64,
    pub rank_eps: f64,
}

/// Pass/fail threshold for commutator and recovery residuals.
pub const DECISION_EPS: f64 = 1e-8;

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_eps: 1e-10,
            rank_eps: 1e-10,
        }
    }
}

impl Tolerance {
    pub fn new(abs_eps: f64, rank_eps: f64) -> Result<Self> {
        for (name, v) in [("abs_eps", abs_eps), ("rank_eps", rank_eps)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidArgument(alloc::format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(Self { abs_eps, rank_eps })
    }

    /// Default tolerance for correction decisions: residuals up to `1e-8` pass.
    pub fn for_decisions() -> Self {
        Self {
            abs_eps: DECISION_EPS,
            ..Self::default()
        }
    }

    pub fn with_abs(self, abs_eps: f64) -> Result<Self> {
        Self::new(abs_eps, self.rank_eps)
    }
}
