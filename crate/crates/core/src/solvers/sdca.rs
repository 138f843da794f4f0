//! Stochastic dual coordinate ascent with the closed-form smoothed-hinge update.

use crate::objective::Problem;

#[derive(Debug, Clone)]
pub struct SdcaState {
    w: Vec<f64>,
    alpha: Vec<f64>,
    sq_norms: Vec<f64>,
    t: u64,
}

impl SdcaState {
    /// Starts from `alpha = 0`, `w = 0`.
    pub fn new(problem: &Problem<'_>) -> Self {
        Self {
            w: vec![0.0; problem.data.dim()],
            alpha: vec![0.0; problem.m()],
            sq_norms: problem
                .data
                .examples()
                .iter()
                .map(|e| e.x.squared_norm())
                .collect(),
            t: 0,
        }
    }

    /// Warm start from a feasible dual point; `w` is rebuilt as `w(alpha)`.
    pub fn from_alpha(problem: &Problem<'_>, alpha: Vec<f64>) -> crate::error::Result<Self> {
        let w = problem.dual_to_primal(&alpha)?;
        let mut state = Self::new(problem);
        state.w = w;
        state.alpha = alpha;
        Ok(state)
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn iterations(&self) -> u64 {
        self.t
    }

    /// The exact maximizer of the dual along coordinate `index`, as an increment.
    pub fn coordinate_delta(&self, problem: &Problem<'_>, index: usize) -> f64 {
        let e = problem.data.get(index);
        let lm = problem.lambda * problem.m() as f64;
        let gamma = problem.loss.gamma();
        let a = self.alpha[index];
        let q = self.sq_norms[index] / lm + gamma;
        let margin = e.margin(&self.w);
        ((1.0 - margin - gamma * a) / q).clamp(-a, 1.0 - a)
    }

    /// Maximizes the dual over coordinate `index` and keeps `w = w(alpha)`.
    /// Returns the applied increment.
    pub fn step(&mut self, problem: &Problem<'_>, index: usize) -> f64 {
        let delta = self.coordinate_delta(problem, index);
        if delta != 0.0 {
            let e = problem.data.get(index);
            let lm = problem.lambda * problem.m() as f64;
            // clamp guards against 1 - a + a rounding above 1
            self.alpha[index] = (self.alpha[index] + delta).clamp(0.0, 1.0);
            e.x.axpy_into(delta * e.y.sign() / lm, &mut self.w);
        }
        self.t += 1;
        delta
    }
}
