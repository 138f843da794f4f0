//! Pegasos-style SGD with the `1/(lambda (t+1))` schedule.
//!
//! The iterate is kept as `scale * v` so the `(1 - eta lambda)` shrink costs O(1)
//! and each step only touches the nonzeros of `x`.

use crate::data::LabeledExample;
use crate::loss::SmoothedHinge;

/// Below this the scale is folded back into the vector to avoid underflow.
const MIN_SCALE: f64 = 1e-9;

/// Dense vector represented as `scale * values`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledVector {
    values: Vec<f64>,
    scale: f64,
}

impl ScaledVector {
    pub fn zeros(dim: usize) -> Self {
        Self {
            values: vec![0.0; dim],
            scale: 1.0,
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn dot_sparse(&self, x: &crate::data::SparseVector) -> f64 {
        self.scale * x.dot(&self.values)
    }

    /// Multiplies the whole vector by `factor`.
    pub fn rescale(&mut self, factor: f64) {
        if factor == 0.0 {
            self.values.iter_mut().for_each(|v| *v = 0.0);
            self.scale = 1.0;
            return;
        }
        self.scale *= factor;
        if self.scale.abs() < MIN_SCALE {
            self.normalize();
        }
    }

    /// `self += coef * x`
    pub fn add_sparse(&mut self, coef: f64, x: &crate::data::SparseVector) {
        x.axpy_into(coef / self.scale, &mut self.values);
    }

    fn normalize(&mut self) {
        let s = self.scale;
        self.values.iter_mut().for_each(|v| *v *= s);
        self.scale = 1.0;
    }

    pub fn to_dense(&self) -> Vec<f64> {
        self.values.iter().map(|v| v * self.scale).collect()
    }
}

#[derive(Debug, Clone)]
pub struct PegasosState {
    w: ScaledVector,
    t: u64,
}

impl PegasosState {
    pub fn new(dim: usize) -> Self {
        Self {
            w: ScaledVector::zeros(dim),
            t: 0,
        }
    }

    pub fn iterations(&self) -> u64 {
        self.t
    }

    /// One step with `eta_t = 1/(lambda (t+1))`:
    /// `w <- (1 - eta lambda) w - eta loss'(y<w,x>) y x`.
    pub fn step(&mut self, example: &LabeledExample, lambda: f64, loss: &SmoothedHinge) {
        let eta = 1.0 / (lambda * (self.t as f64 + 1.0));
        let y = example.y.sign();
        let deriv = loss.derivative(y * self.w.dot_sparse(&example.x));
        self.w.rescale(1.0 - eta * lambda);
        if deriv != 0.0 {
            self.w.add_sparse(-eta * deriv * y, &example.x);
        }
        self.t += 1;
    }

    pub fn weights(&self) -> Vec<f64> {
        self.w.to_dense()
    }
}
