//! Stochastic variance-reduced gradient.

use crate::error::{Error, Result};
use crate::objective::Problem;

#[derive(Debug, Clone)]
struct Snapshot {
    w: Vec<f64>,
    full_grad: Vec<f64>,
    /// `loss'(y_i <w_snap, x_i>) y_i` per example
    coefs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SvrgState {
    w: Vec<f64>,
    snapshot: Option<Snapshot>,
    inner_count: u64,
    snapshots_taken: u64,
    t: u64,
}

impl SvrgState {
    pub fn new(w: Vec<f64>) -> Self {
        Self {
            w,
            snapshot: None,
            inner_count: 0,
            snapshots_taken: 0,
            t: 0,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn snapshot_weights(&self) -> Option<&[f64]> {
        self.snapshot.as_ref().map(|s| s.w.as_slice())
    }

    pub fn full_gradient(&self) -> Option<&[f64]> {
        self.snapshot.as_ref().map(|s| s.full_grad.as_slice())
    }

    pub fn inner_count(&self) -> u64 {
        self.inner_count
    }

    pub fn snapshots_taken(&self) -> u64 {
        self.snapshots_taken
    }

    pub fn iterations(&self) -> u64 {
        self.t
    }

    /// Stores `w` as the snapshot and computes the full gradient there.
    pub fn take_snapshot(&mut self, problem: &Problem<'_>) {
        let m = problem.m() as f64;
        let mut full_grad: Vec<f64> = self.w.iter().map(|wj| problem.lambda * wj).collect();
        let coefs: Vec<f64> = problem
            .data
            .examples()
            .iter()
            .map(|e| {
                let y = e.y.sign();
                let c = problem.loss.derivative(y * e.x.dot(&self.w)) * y;
                if c != 0.0 {
                    e.x.axpy_into(c / m, &mut full_grad);
                }
                c
            })
            .collect();
        self.snapshot = Some(Snapshot {
            w: self.w.clone(),
            full_grad,
            coefs,
        });
        self.inner_count = 0;
        self.snapshots_taken += 1;
    }

    /// Variance-reduced direction at the current iterate for example `index`:
    /// `(loss'_i(w) - loss'_i(w_snap)) y_i x_i + lambda (w - w_snap) + mu`.
    pub fn direction(&self, problem: &Problem<'_>, index: usize) -> Result<Vec<f64>> {
        let snap = self.snapshot.as_ref().ok_or(Error::MissingSnapshot)?;
        let e = problem.data.get(index);
        let y = e.y.sign();
        let coef = problem.loss.derivative(y * e.x.dot(&self.w)) * y;
        let mut g: Vec<f64> = self
            .w
            .iter()
            .zip(&snap.w)
            .zip(&snap.full_grad)
            .map(|((wj, sj), mu)| problem.lambda * (wj - sj) + mu)
            .collect();
        let correction = coef - snap.coefs[index];
        if correction != 0.0 {
            e.x.axpy_into(correction, &mut g);
        }
        Ok(g)
    }

    pub fn inner_step(&mut self, problem: &Problem<'_>, index: usize, stepsize: f64) -> Result<()> {
        let snap = self.snapshot.as_ref().ok_or(Error::MissingSnapshot)?;
        let e = problem.data.get(index);
        let y = e.y.sign();
        let correction = problem.loss.derivative(y * e.x.dot(&self.w)) * y - snap.coefs[index];
        // w - eta (lambda (w - w_snap) + mu) on the dense part, then the sparse correction
        let shrink = 1.0 - stepsize * problem.lambda;
        for ((wj, sj), mu) in self.w.iter_mut().zip(&snap.w).zip(&snap.full_grad) {
            *wj = shrink * *wj + stepsize * (problem.lambda * sj - mu);
        }
        if correction != 0.0 {
            e.x.axpy_into(-stepsize * correction, &mut self.w);
        }
        self.inner_count += 1;
        self.t += 1;
        Ok(())
    }
}
