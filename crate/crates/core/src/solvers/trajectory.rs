use serde::{Deserialize, Serialize};

/// Metrics of one recorded iterate. Suboptimalities are `NaN` when no
/// reference optimum was supplied; dual quantities are `NaN` for primal-only
/// solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: u64,
    pub epoch: u64,
    pub primal: f64,
    pub dual: f64,
    pub primal_subopt: f64,
    pub dual_subopt: f64,
    pub gap: f64,
    pub loss_term: f64,
    pub norm_term: f64,
}

/// Dual variables at the end of an epoch (SDCA).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSnapshot {
    pub epoch: u64,
    pub alpha: Vec<f64>,
}

/// Gradient-evaluation accounting for one run. Only `stochastic_steps` counts
/// against the budget.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetAccounting {
    pub budget: u64,
    pub sampler_draws: u64,
    pub stochastic_steps: u64,
    /// SVRG warm-start SGD steps.
    pub init_steps: u64,
    /// SVRG full-gradient passes over the training set.
    pub snapshot_passes: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub m: usize,
    pub points: Vec<TrajectoryPoint>,
    pub alpha_snapshots: Vec<AlphaSnapshot>,
    pub accounting: BudgetAccounting,
}

impl TrajectoryRecord {
    pub fn point_at(&self, t: u64) -> Option<&TrajectoryPoint> {
        self.points
            .binary_search_by_key(&t, |p| p.t)
            .ok()
            .map(|i| &self.points[i])
    }
}
