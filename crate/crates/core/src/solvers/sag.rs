//! Stochastic average gradient with one cached gradient per example.
//!
//! The loss gradient of example `i` is `loss'(y_i <w, x_i>) y_i x_i`, so each
//! slot only stores the scalar `loss'(.) y_i`; the running sum of slots is
//! kept densely and refreshed in O(nnz(x_i)) per visit.

use crate::objective::Problem;

#[derive(Debug, Clone)]
pub struct SagState {
    w: Vec<f64>,
    slots: Vec<f64>,
    running_sum: Vec<f64>,
    t: u64,
}

impl SagState {
    pub fn new(problem: &Problem<'_>) -> Self {
        let d = problem.data.dim();
        Self {
            w: vec![0.0; d],
            slots: vec![0.0; problem.m()],
            running_sum: vec![0.0; d],
            t: 0,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// Per-example gradient coefficients; slot `i` holds gradient `slots[i] * x_i`.
    pub fn slots(&self) -> &[f64] {
        &self.slots
    }

    pub fn running_sum(&self) -> &[f64] {
        &self.running_sum
    }

    pub fn iterations(&self) -> u64 {
        self.t
    }

    /// Refreshes slot `index`, then `w <- w - eta ((1/m) sum + lambda w)`.
    pub fn step(&mut self, problem: &Problem<'_>, index: usize, stepsize: f64) {
        let e = problem.data.get(index);
        let y = e.y.sign();
        let coef = problem.loss.derivative(y * e.x.dot(&self.w)) * y;
        let change = coef - self.slots[index];
        if change != 0.0 {
            e.x.axpy_into(change, &mut self.running_sum);
            self.slots[index] = coef;
        }
        let shrink = 1.0 - stepsize * problem.lambda;
        let avg = stepsize / problem.m() as f64;
        for (wj, sj) in self.w.iter_mut().zip(&self.running_sum) {
            *wj = shrink * *wj - avg * sj;
        }
        self.t += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Dataset, Label, LabeledExample, SparseVector};
    use crate::loss::SmoothedHinge;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dataset(rows: &[(&[f64], Label)]) -> Dataset {
        let d = rows[0].0.len();
        Dataset::new(
            rows.iter()
                .map(|(x, y)| LabeledExample::new(SparseVector::from_dense(x).unwrap(), *y))
                .collect(),
            d,
        )
        .unwrap()
    }

    #[test]
    fn zero_slots_and_zero_w_stay_put_without_gradient() {
        // margin 0 gives a nonzero gradient, so check the pre-step state and
        // a zero-feature example that cannot move w
        let data = dataset(&[(&[0.0, 0.0], Label::Positive)]);
        let p = Problem::new(&data, 0.1, SmoothedHinge::default()).unwrap();
        let mut s = SagState::new(&p);
        assert_eq!(s.weights(), &[0.0, 0.0]);
        s.step(&p, 0, 0.5);
        assert_eq!(s.weights(), &[0.0, 0.0]);
    }

    #[test]
    fn single_example_matches_gradient_descent() {
        let data = dataset(&[(&[0.6, -0.8], Label::Positive)]);
        let p = Problem::new(&data, 0.2, SmoothedHinge::default()).unwrap();
        let mut s = SagState::new(&p);
        let mut w = vec![0.0, 0.0];
        let eta = 0.3;
        for _ in 0..25 {
            let g = p.gradient(&w).unwrap();
            for (wj, gj) in w.iter_mut().zip(&g) {
                *wj -= eta * gj;
            }
            s.step(&p, 0, eta);
            for (a, b) in s.weights().iter().zip(&w) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn running_sum_stays_coherent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rows: Vec<(Vec<f64>, Label)> = (0..30)
            .map(|_| {
                let x = (0..6)
                    .map(|_| {
                        if rng.random_bool(0.5) {
                            rng.random_range(-1.0..1.0)
                        } else {
                            0.0
                        }
                    })
                    .collect();
                (
                    x,
                    if rng.random_bool(0.5) {
                        Label::Positive
                    } else {
                        Label::Negative
                    },
                )
            })
            .collect();
        let data = Dataset::new(
            rows.iter()
                .map(|(x, y)| LabeledExample::new(SparseVector::from_dense(x).unwrap(), *y))
                .collect(),
            6,
        )
        .unwrap();
        let p = Problem::new(&data, 0.01, SmoothedHinge::default()).unwrap();
        let mut s = SagState::new(&p);
        for _ in 0..10_000 {
            let i = rng.random_range(0..30);
            s.step(&p, i, 0.2);
        }
        let mut fresh = vec![0.0; 6];
        for (e, c) in data.examples().iter().zip(s.slots()) {
            e.x.axpy_into(*c, &mut fresh);
        }
        for (a, b) in s.running_sum().iter().zip(&fresh) {
            assert!((a - b).abs() <= 1e-10);
        }
    }
}
