//! Regularized empirical objective, its dual, and evaluation metrics.
//!
//! Primal: `P(w) = (1/m) sum_i loss(y_i <w, x_i>) + (lambda/2) |w|^2`.
//! Dual:   `D(a) = (1/m) sum_i (a_i - gamma a_i^2 / 2) - (lambda/2) |w(a)|^2`
//! with `w(a) = (1/(lambda m)) sum_i a_i y_i x_i` and every `a_i` in `[0, 1]`.

use crate::data::{squared_norm, Dataset};
use crate::error::{Error, Result};
use crate::loss::SmoothedHinge;

/// Loss and regularizer parts of the primal objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimalParts {
    pub loss_term: f64,
    pub norm_term: f64,
}

impl PrimalParts {
    pub fn total(&self) -> f64 {
        self.loss_term + self.norm_term
    }
}

/// An L2-regularized smoothed-hinge ERM problem over a borrowed dataset.
#[derive(Debug, Clone, Copy)]
pub struct Problem<'a> {
    pub data: &'a Dataset,
    pub lambda: f64,
    pub loss: SmoothedHinge,
}

impl<'a> Problem<'a> {
    pub fn new(data: &'a Dataset, lambda: f64, loss: SmoothedHinge) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self { data, lambda, loss })
    }

    pub fn m(&self) -> usize {
        self.data.len()
    }

    pub fn primal_parts(&self, w: &[f64]) -> Result<PrimalParts> {
        self.data.check_dim(w)?;
        let m = self.m() as f64;
        let loss_sum: f64 = self
            .data
            .examples()
            .iter()
            .map(|e| self.loss.value(e.margin(w)))
            .sum();
        Ok(PrimalParts {
            loss_term: loss_sum / m,
            norm_term: 0.5 * self.lambda * squared_norm(w),
        })
    }

    pub fn primal(&self, w: &[f64]) -> Result<f64> {
        Ok(self.primal_parts(w)?.total())
    }

    pub fn dual_to_primal(&self, alpha: &[f64]) -> Result<Vec<f64>> {
        self.check_alpha(alpha)?;
        let scale = 1.0 / (self.lambda * self.m() as f64);
        let mut w = vec![0.0; self.data.dim()];
        for (e, &a) in self.data.examples().iter().zip(alpha) {
            if a != 0.0 {
                e.x.axpy_into(scale * a * e.y.sign(), &mut w);
            }
        }
        Ok(w)
    }

    pub fn dual(&self, alpha: &[f64]) -> Result<f64> {
        let w = self.dual_to_primal(alpha)?;
        Ok(self.dual_with_primal(alpha, &w))
    }

    /// Dual value when `w == w(alpha)` is already known; skips the O(nnz) rebuild.
    pub fn dual_with_primal(&self, alpha: &[f64], w: &[f64]) -> f64 {
        let m = self.m() as f64;
        let payoff: f64 = alpha
            .iter()
            .map(|&a| self.loss.conjugate_term_unchecked(a))
            .sum();
        payoff / m - 0.5 * self.lambda * squared_norm(w)
    }

    /// `P(w) - D(alpha)`.
    pub fn duality_gap(&self, w: &[f64], alpha: &[f64]) -> Result<f64> {
        let dual = self.dual(alpha)?;
        Ok(self.primal(w)? - dual)
    }

    /// Full gradient of the primal objective at `w`.
    pub fn gradient(&self, w: &[f64]) -> Result<Vec<f64>> {
        self.data.check_dim(w)?;
        let m = self.m() as f64;
        let mut g = vec![0.0; w.len()];
        for e in self.data.examples() {
            let d = self.loss.derivative(e.margin(w));
            if d != 0.0 {
                e.x.axpy_into(d * e.y.sign() / m, &mut g);
            }
        }
        for (gi, wi) in g.iter_mut().zip(w) {
            *gi += self.lambda * wi;
        }
        Ok(g)
    }

    pub(crate) fn check_alpha(&self, alpha: &[f64]) -> Result<()> {
        if alpha.len() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                got: alpha.len(),
            });
        }
        if let Some((index, &value)) = alpha
            .iter()
            .enumerate()
            .find(|(_, a)| !(0.0..=1.0).contains(*a))
        {
            return Err(Error::InfeasibleDual { index, value });
        }
        Ok(())
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    Ok(())
}

/// Fraction of examples with `y <w, x> <= 0`. Ties and non-finite margins count as errors.
pub fn zero_one_error(w: &[f64], data: &Dataset) -> Result<f64> {
    data.check_dim(w)?;
    let wrong = data
        .examples()
        .iter()
        .filter(|e| !(e.margin(w) > 0.0))
        .count();
    Ok(wrong as f64 / data.len() as f64)
}
