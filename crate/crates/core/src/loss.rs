//! The gamma-smoothed hinge loss and its per-example dual payoff.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smoothed hinge: zero above margin 1, quadratic on `(1 - gamma, 1)`, linear below.
/// The loss is 1-Lipschitz and `1/gamma`-smooth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothedHinge {
    gamma: f64,
}

impl Default for SmoothedHinge {
    fn default() -> Self {
        Self { gamma: 1.0 }
    }
}

impl SmoothedHinge {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "smoothing gamma must be positive, got {gamma}"
            )));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    #[inline]
    pub fn value(&self, margin: f64) -> f64 {
        if margin >= 1.0 {
            0.0
        } else if margin > 1.0 - self.gamma {
            let r = 1.0 - margin;
            r * r / (2.0 * self.gamma)
        } else {
            1.0 - margin - self.gamma / 2.0
        }
    }

    /// Derivative with respect to the margin; lies in `[-1, 0]`.
    #[inline]
    pub fn derivative(&self, margin: f64) -> f64 {
        if margin >= 1.0 {
            0.0
        } else if margin > 1.0 - self.gamma {
            (margin - 1.0) / self.gamma
        } else {
            -1.0
        }
    }

    /// `-loss*(-alpha) = alpha - gamma * alpha^2 / 2` for `alpha` in `[0, 1]`.
    pub fn conjugate_term(&self, alpha: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InfeasibleDual {
                index: 0,
                value: alpha,
            });
        }
        Ok(self.conjugate_term_unchecked(alpha))
    }

    #[inline]
    pub(crate) fn conjugate_term_unchecked(&self, alpha: f64) -> f64 {
        alpha - self.gamma * alpha * alpha / 2.0
    }
}
