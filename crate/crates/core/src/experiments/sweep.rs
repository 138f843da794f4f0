//! Budgeted `(T, c, lambda[, stepsize])` sweeps with repetition averaging.
//!
//! For every repetition a test split is carved off the pool. For every
//! `(T, c, rep)` a training set of `round(cT)` examples is drawn without
//! replacement from the rest, each `(lambda, stepsize)` is trained for exactly
//! `T` steps, and the test error is recorded. Per `(T, c)` the best
//! `(lambda, stepsize)` by mean test error is reported, and per `T` the `c`
//! with the lowest such error.

use rand::seq::{index, SliceRandom};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::objective::zero_one_error;
use crate::sampling::{mix_seed, rng_from_seed};
use crate::solvers::{run_solver, Algorithm, RecordOptions, SolverConfig};

use super::bounds::log_grid;

pub const THREADS_ENV: &str = "RECYCLE_OPT_THREADS";

const SPLIT_STREAM: u64 = 0x5350_4c49;
const SUBSET_STREAM: u64 = 0x5355_4253;
const SOLVER_STREAM: u64 = 0x534f_4c56;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub budgets: Vec<u64>,
    pub c_grid: Vec<f64>,
    pub lambda_grid: Vec<f64>,
    /// Stepsize multipliers of `1/(L + lambda)` with `L = max |x_i|^2 / gamma`
    /// over the training set. Used by SAG and SVRG only.
    pub stepsize_grid: Vec<f64>,
    pub repetitions: usize,
    pub test_fraction: f64,
    /// Template for algorithm, sampler, loss and SVRG settings; its
    /// `lambda`, `budget`, `stepsize` and `seed` are overwritten per cell.
    pub solver: SolverConfig,
    pub base_seed: u64,
    /// Draw a new test split per repetition; otherwise repetition 0's split is reused.
    pub redraw_test_split: bool,
    /// Worker cap; falls back to `RECYCLE_OPT_THREADS`, then to all cores.
    pub threads: Option<usize>,
}

impl SweepConfig {
    pub fn new(solver: SolverConfig) -> Self {
        Self {
            budgets: vec![1000, 2000, 4000, 8000, 16000, 32000],
            c_grid: default_c_grid(),
            lambda_grid: default_lambda_grid(),
            stepsize_grid: default_stepsize_grid(),
            repetitions: 50,
            test_fraction: 0.3,
            solver,
            base_seed: 0,
            redraw_test_split: true,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParameter(msg));
        if self.budgets.is_empty() || self.c_grid.is_empty() || self.lambda_grid.is_empty() {
            return fail("budgets, c_grid and lambda_grid must be non-empty".into());
        }
        if self.budgets.contains(&0) {
            return fail("budgets must be positive".into());
        }
        if let Some(c) = self.c_grid.iter().find(|&&c| !(c > 0.0 && c <= 1.0)) {
            return fail(format!("c = {c} outside (0, 1]"));
        }
        if let Some(l) = self
            .lambda_grid
            .iter()
            .find(|&&l| !(l > 0.0 && l.is_finite()))
        {
            return fail(format!("lambda = {l} must be positive"));
        }
        if self.solver.algorithm.needs_stepsize() {
            if self.stepsize_grid.is_empty() {
                return fail(format!(
                    "{} needs a non-empty stepsize_grid",
                    self.solver.algorithm
                ));
            }
            if let Some(s) = self
                .stepsize_grid
                .iter()
                .find(|&&s| !(s > 0.0 && s.is_finite()))
            {
                return fail(format!("stepsize multiplier {s} must be positive"));
            }
        }
        if self.repetitions == 0 {
            return fail("repetitions must be >= 1".into());
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return fail(format!(
                "test_fraction {} outside (0, 1)",
                self.test_fraction
            ));
        }
        Ok(())
    }

    fn stepsizes(&self) -> Vec<Option<f64>> {
        if self.solver.algorithm.needs_stepsize() {
            self.stepsize_grid.iter().map(|&s| Some(s)).collect()
        } else {
            vec![None]
        }
    }
}

/// `c = 0.025, 0.05, ..., 1`.
pub fn default_c_grid() -> Vec<f64> {
    (1..=40).map(|k| k as f64 * 0.025).collect()
}

/// 13 points log-spaced from `1` down to `1e-6`.
pub fn default_lambda_grid() -> Vec<f64> {
    let mut g = log_grid(1e-6, 1.0, 13);
    g.reverse();
    g
}

/// `10^-3 .. 10^1` in half-decade steps.
pub fn default_stepsize_grid() -> Vec<f64> {
    log_grid(1e-3, 10.0, 9)
}

/// Training-set size for ratio `c` and budget `t`, rounding half up.
pub fn training_size(c: f64, t: u64) -> usize {
    (c * t as f64 + 0.5).floor() as usize
}

/// One trained model: a single `(T, c, lambda, stepsize, rep)` point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellRun {
    pub budget: u64,
    pub c_index: usize,
    pub c: f64,
    pub m: usize,
    pub lambda: f64,
    /// Stepsize multiplier and the absolute stepsize it produced.
    pub stepsize_multiplier: Option<f64>,
    pub stepsize: Option<f64>,
    pub rep: usize,
    pub split_seed: u64,
    pub subset_seed: u64,
    pub solver_seed: u64,
    pub test_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub lambda: f64,
    pub stepsize_multiplier: Option<f64>,
    pub mean_test_error: f64,
    pub std_error: f64,
    pub reps: usize,
}

/// Best-over-`(lambda, stepsize)` result for one `(T, c)`. `summary` is `None`
/// when `round(cT) < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub budget: u64,
    pub c: f64,
    pub m: usize,
    pub summary: Option<CellSummary>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalC {
    pub budget: u64,
    pub optimal_c: f64,
    pub error_at_optimal_c: f64,
    pub std_error_at_optimal_c: f64,
    /// `None` when `c = 1` is not on the grid.
    pub error_at_c1: Option<f64>,
    pub std_error_at_c1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub cells: Vec<SweepCell>,
    pub optimal: Vec<OptimalC>,
    pub runs: Vec<CellRun>,
}

impl SweepResult {
    pub fn cell(&self, budget: u64, c: f64) -> Option<&SweepCell> {
        self.cells.iter().find(|x| x.budget == budget && x.c == c)
    }

    pub fn optimal_for(&self, budget: u64) -> Option<&OptimalC> {
        self.optimal.iter().find(|o| o.budget == budget)
    }
}

struct Split {
    test: Dataset,
    train_pool: Vec<usize>,
}

fn make_split(pool: &Dataset, test_fraction: f64, seed: u64) -> Result<Split> {
    let n = pool.len();
    if n < 2 {
        return Err(Error::InsufficientPool {
            available: n,
            needed: 2,
        });
    }
    let n_test = ((test_fraction * n as f64).round() as usize).clamp(1, n.saturating_sub(1));
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_from_seed(seed));
    let test = pool.subset(&order[..n_test])?;
    Ok(Split {
        test,
        train_pool: order[n_test..].to_vec(),
    })
}

fn split_seed(config: &SweepConfig, rep: usize) -> u64 {
    let rep = if config.redraw_test_split {
        rep as u64
    } else {
        0
    };
    mix_seed(config.base_seed, &[SPLIT_STREAM, rep])
}

fn draw_training_set(pool: &Dataset, split: &Split, m: usize, seed: u64) -> Result<Dataset> {
    let picked: Vec<usize> = index::sample(&mut rng_from_seed(seed), split.train_pool.len(), m)
        .into_iter()
        .map(|k| split.train_pool[k])
        .collect();
    pool.subset(&picked)
}

/// Absolute stepsize for a multiplier on a given training set.
pub fn absolute_stepsize(
    config: &SolverConfig,
    train: &Dataset,
    lambda: f64,
    multiplier: f64,
) -> f64 {
    let smoothness = train.max_squared_norm() / config.loss.gamma();
    multiplier / (smoothness + lambda)
}

fn train_and_test(
    template: &SolverConfig,
    train: &Dataset,
    test: &Dataset,
    budget: u64,
    lambda: f64,
    multiplier: Option<f64>,
    seed: u64,
) -> Result<(Option<f64>, f64)> {
    let mut cfg = template.clone();
    cfg.lambda = lambda;
    cfg.budget = budget;
    cfg.seed = seed;
    cfg.stepsize = multiplier.map(|k| absolute_stepsize(template, train, lambda, k));
    let run = run_solver(&cfg, train, RecordOptions::none(), None)?;
    Ok((cfg.stepsize, zero_one_error(&run.w, test)?))
}

fn build_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let threads = threads
        .or_else(|| {
            std::env::var(THREADS_ENV)
                .ok()
                .and_then(|v| v.trim().parse().ok())
        })
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}

/// Runs the full sweep over `pool`.
pub fn run_sweep(config: &SweepConfig, pool: &Dataset) -> Result<SweepResult> {
    config.validate()?;
    let mut template = config.solver.clone();
    template.stepsize = None;
    let mut probe = template.clone();
    probe.lambda = config.lambda_grid[0];
    probe.budget = config.budgets[0];
    if probe.algorithm.needs_stepsize() {
        probe.stepsize = Some(1.0);
    }
    probe.validate()?;

    let stepsizes = config.stepsizes();
    let n_splits = if config.redraw_test_split {
        config.repetitions
    } else {
        1
    };
    let workers = build_pool(config.threads)?;

    workers.install(|| {
        let splits: Vec<Split> = (0..n_splits)
            .into_par_iter()
            .map(|rep| make_split(pool, config.test_fraction, split_seed(config, rep)))
            .collect::<Result<_>>()?;

        let needed = config
            .budgets
            .iter()
            .flat_map(|&t| config.c_grid.iter().map(move |&c| training_size(c, t)))
            .max()
            .unwrap_or(0);
        let available = splits[0].train_pool.len();
        if needed > available {
            return Err(Error::InsufficientPool { available, needed });
        }

        let mut tasks = Vec::new();
        for &budget in &config.budgets {
            for (c_index, &c) in config.c_grid.iter().enumerate() {
                let m = training_size(c, budget);
                if m == 0 {
                    continue;
                }
                for rep in 0..config.repetitions {
                    tasks.push((budget, c_index, c, m, rep));
                }
            }
        }

        let runs: Vec<Vec<CellRun>> = tasks
            .par_iter()
            .map(|&(budget, c_index, c, m, rep)| {
                let split = &splits[if config.redraw_test_split { rep } else { 0 }];
                let cell = [budget, c_index as u64, rep as u64];
                let subset_seed = mix_seed(
                    config.base_seed,
                    &[SUBSET_STREAM, cell[0], cell[1], cell[2]],
                );
                let solver_seed = mix_seed(
                    config.base_seed,
                    &[SOLVER_STREAM, cell[0], cell[1], cell[2]],
                );
                let train = draw_training_set(pool, split, m, subset_seed)?;
                let mut out = Vec::with_capacity(config.lambda_grid.len() * stepsizes.len());
                for &lambda in &config.lambda_grid {
                    for &mult in &stepsizes {
                        let (stepsize, test_error) = train_and_test(
                            &template,
                            &train,
                            &split.test,
                            budget,
                            lambda,
                            mult,
                            solver_seed,
                        )?;
                        out.push(CellRun {
                            budget,
                            c_index,
                            c,
                            m,
                            lambda,
                            stepsize_multiplier: mult,
                            stepsize,
                            rep,
                            split_seed: split_seed(config, rep),
                            subset_seed,
                            solver_seed,
                            test_error,
                        });
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let runs: Vec<CellRun> = runs.into_iter().flatten().collect();
        Ok(summarize(config, &stepsizes, runs))
    })
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn summarize(config: &SweepConfig, stepsizes: &[Option<f64>], runs: Vec<CellRun>) -> SweepResult {
    // runs are ordered (budget, c, rep, lambda, stepsize) by construction
    let per_rep = config.lambda_grid.len() * stepsizes.len();
    let mut cells = Vec::new();
    let mut optimal = Vec::new();
    let mut cursor = 0;
    for &budget in &config.budgets {
        let mut row: Vec<SweepCell> = Vec::new();
        for &c in &config.c_grid {
            let m = training_size(c, budget);
            if m == 0 {
                row.push(SweepCell {
                    budget,
                    c,
                    m,
                    summary: None,
                });
                continue;
            }
            let block = &runs[cursor..cursor + per_rep * config.repetitions];
            cursor += block.len();
            let mut best: Option<CellSummary> = None;
            for (li, &lambda) in config.lambda_grid.iter().enumerate() {
                for (si, &mult) in stepsizes.iter().enumerate() {
                    let k = li * stepsizes.len() + si;
                    let errors: Vec<f64> = (0..config.repetitions)
                        .map(|rep| block[rep * per_rep + k].test_error)
                        .collect();
                    let (mean, se) = mean_and_se(&errors);
                    if best.is_none_or(|b| mean < b.mean_test_error) {
                        best = Some(CellSummary {
                            lambda,
                            stepsize_multiplier: mult,
                            mean_test_error: mean,
                            std_error: se,
                            reps: config.repetitions,
                        });
                    }
                }
            }
            row.push(SweepCell {
                budget,
                c,
                m,
                summary: best,
            });
        }
        let at_c1 = row.iter().find(|x| x.c == 1.0).and_then(|x| x.summary);
        // ties go to the larger c
        let best = row.iter().filter_map(|x| x.summary.map(|s| (x.c, s))).fold(
            None,
            |acc: Option<(f64, CellSummary)>, (c, s)| match acc {
                Some((bc, bs))
                    if bs.mean_test_error < s.mean_test_error
                        || (bs.mean_test_error == s.mean_test_error && bc > c) =>
                {
                    Some((bc, bs))
                }
                _ => Some((c, s)),
            },
        );
        if let Some((c, s)) = best {
            optimal.push(OptimalC {
                budget,
                optimal_c: c,
                error_at_optimal_c: s.mean_test_error,
                std_error_at_optimal_c: s.std_error,
                error_at_c1: at_c1.map(|s| s.mean_test_error),
                std_error_at_c1: at_c1.map(|s| s.std_error),
            });
        }
        cells.extend(row);
    }
    SweepResult {
        cells,
        optimal,
        runs,
    }
}

/// Recomputes the test error of one recorded run from its seeds.
pub fn rerun_cell(config: &SweepConfig, pool: &Dataset, run: &CellRun) -> Result<f64> {
    let split = make_split(pool, config.test_fraction, run.split_seed)?;
    let train = draw_training_set(pool, &split, run.m, run.subset_seed)?;
    let mut template = config.solver.clone();
    template.stepsize = None;
    let (_, err) = train_and_test(
        &template,
        &train,
        &split.test,
        run.budget,
        run.lambda,
        run.stepsize_multiplier,
        run.solver_seed,
    )?;
    Ok(err)
}

/// Convenience: the per-`T` solver template with a given algorithm.
pub fn solver_template(algorithm: Algorithm) -> SolverConfig {
    SolverConfig::new(algorithm, 1.0, 1)
}
