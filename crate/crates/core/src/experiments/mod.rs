//! Experiment machinery: certified reference optima, synthetic data, budgeted
//! sample-size sweeps and the bound explorer.

mod bounds;
mod reference;
mod sweep;
mod synth;

pub use bounds::{
    bound_at, bound_curves, default_c_grid as default_bound_c_grid, log_grid, BoundCurve,
    BoundMode, BoundParams, BoundPoint, LambdaPolicy,
};
pub use reference::{reference_optimum, ReferenceOptimum};
pub use sweep::{
    absolute_stepsize, default_c_grid, default_lambda_grid, default_stepsize_grid, rerun_cell,
    run_sweep, solver_template, training_size, CellRun, CellSummary, OptimalC, SweepCell,
    SweepConfig, SweepResult, THREADS_ENV,
};
pub use synth::{synth_gaussian, synth_pathological, GaussianSpec};
