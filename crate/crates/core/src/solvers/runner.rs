use rand::seq::SliceRandom;

use super::{
    Algorithm, AlphaSnapshot, BudgetAccounting, PegasosState, SagState, SdcaState, SolverConfig,
    SvrgState, TrajectoryPoint, TrajectoryRecord,
};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::experiments::ReferenceOptimum;
use crate::objective::Problem;
use crate::sampling::{mix_seed, rng_from_seed, Sampler};

const SAMPLER_STREAM: u64 = 1;
const SVRG_INIT_STREAM: u64 = 2;

/// What to record during a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RecordOptions {
    /// Record every `k` steps (plus `t = 0`, `t = T` and epoch boundaries +-1).
    /// `None` disables recording entirely.
    pub every: Option<u64>,
    /// Fill in suboptimalities; needs a reference optimum.
    pub suboptimality: bool,
    /// Keep the SDCA dual vector at each epoch boundary.
    pub alpha_snapshots: bool,
}

impl RecordOptions {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn every(k: u64) -> Self {
        Self {
            every: Some(k.max(1)),
            suboptimality: false,
            alpha_snapshots: false,
        }
    }

    pub fn with_suboptimality(mut self) -> Self {
        self.suboptimality = true;
        self
    }

    pub fn with_alpha_snapshots(mut self) -> Self {
        self.alpha_snapshots = true;
        self
    }
}

#[derive(Debug, Clone)]
pub struct SolverRun {
    pub w: Vec<f64>,
    /// Final SDCA dual vector.
    pub alpha: Option<Vec<f64>>,
    pub trajectory: TrajectoryRecord,
}

enum Engine {
    Sgd(PegasosState),
    Sdca(SdcaState),
    Sag(SagState, f64),
    Svrg {
        state: SvrgState,
        stepsize: f64,
        inner_len: u64,
    },
}

impl Engine {
    fn weights(&self) -> Vec<f64> {
        match self {
            Engine::Sgd(s) => s.weights(),
            Engine::Sdca(s) => s.weights().to_vec(),
            Engine::Sag(s, _) => s.weights().to_vec(),
            Engine::Svrg { state, .. } => state.weights().to_vec(),
        }
    }

    fn alpha(&self) -> Option<&[f64]> {
        match self {
            Engine::Sdca(s) => Some(s.alpha()),
            _ => None,
        }
    }

    fn step(&mut self, problem: &Problem<'_>, index: usize) -> Result<()> {
        match self {
            Engine::Sgd(s) => s.step(problem.data.get(index), problem.lambda, &problem.loss),
            Engine::Sdca(s) => {
                s.step(problem, index);
            }
            Engine::Sag(s, eta) => s.step(problem, index, *eta),
            Engine::Svrg {
                state,
                stepsize,
                inner_len,
            } => {
                state.inner_step(problem, index, *stepsize)?;
                if state.inner_count() >= *inner_len {
                    state.take_snapshot(problem);
                }
            }
        }
        Ok(())
    }
}

struct Recorder<'r> {
    options: RecordOptions,
    reference: Option<&'r ReferenceOptimum>,
    m: u64,
    budget: u64,
    record: TrajectoryRecord,
}

impl Recorder<'_> {
    fn due(&self, t: u64) -> bool {
        let Some(every) = self.options.every else {
            return false;
        };
        if t == 0 || t == self.budget || t.is_multiple_of(every) {
            return true;
        }
        let r = t % self.m;
        r == 0 || r == 1 || r == self.m - 1
    }

    fn observe(&mut self, problem: &Problem<'_>, engine: &Engine, t: u64) -> Result<()> {
        if self.options.alpha_snapshots && t > 0 && t.is_multiple_of(self.m) {
            if let Some(alpha) = engine.alpha() {
                self.record.alpha_snapshots.push(AlphaSnapshot {
                    epoch: t / self.m,
                    alpha: alpha.to_vec(),
                });
            }
        }
        if !self.due(t) {
            return Ok(());
        }
        let w = engine.weights();
        let parts = problem.primal_parts(&w)?;
        let primal = parts.total();
        let dual = engine
            .alpha()
            .map_or(f64::NAN, |a| problem.dual_with_primal(a, &w));
        let (primal_subopt, dual_subopt) = match self.reference {
            Some(r) if self.options.suboptimality => (primal - r.value(), r.value() - dual),
            _ => (f64::NAN, f64::NAN),
        };
        self.record.points.push(TrajectoryPoint {
            t,
            epoch: t / self.m,
            primal,
            dual,
            primal_subopt,
            dual_subopt,
            gap: primal - dual,
            loss_term: parts.loss_term,
            norm_term: parts.norm_term,
        });
        Ok(())
    }
}

/// Runs exactly `config.budget` stochastic steps on `data`.
///
/// SVRG is warm-started by one SGD pass over a random permutation and an
/// initial snapshot; neither counts against the budget, and both are reported
/// in the trajectory's [`BudgetAccounting`].
pub fn run_solver(
    config: &SolverConfig,
    data: &Dataset,
    options: RecordOptions,
    reference: Option<&ReferenceOptimum>,
) -> Result<SolverRun> {
    config.validate()?;
    if options.suboptimality && reference.is_none() {
        return Err(Error::MissingReference);
    }
    let problem = Problem::new(data, config.lambda, config.loss)?;
    let m = data.len();
    let mut accounting = BudgetAccounting {
        budget: config.budget,
        ..Default::default()
    };

    let mut engine = match config.algorithm {
        Algorithm::Sgd => Engine::Sgd(PegasosState::new(data.dim())),
        Algorithm::Sdca => Engine::Sdca(SdcaState::new(&problem)),
        Algorithm::Sag => Engine::Sag(SagState::new(&problem), config.stepsize.unwrap_or_default()),
        Algorithm::Svrg => {
            let mut init = PegasosState::new(data.dim());
            let mut order: Vec<usize> = (0..m).collect();
            order.shuffle(&mut rng_from_seed(mix_seed(
                config.seed,
                &[SVRG_INIT_STREAM],
            )));
            for &i in &order {
                init.step(data.get(i), config.lambda, &config.loss);
            }
            accounting.init_steps = m as u64;
            let mut state = SvrgState::new(init.weights());
            state.take_snapshot(&problem);
            Engine::Svrg {
                state,
                stepsize: config.stepsize.unwrap_or_default(),
                inner_len: config.svrg_inner_len(m),
            }
        }
    };

    let mut recorder = Recorder {
        options,
        reference,
        m: m as u64,
        budget: config.budget,
        record: TrajectoryRecord {
            m,
            ..Default::default()
        },
    };
    recorder.observe(&problem, &engine, 0)?;

    let tail_start = config.budget / 2;
    let mut tail: Option<(Vec<f64>, u64)> = (config.tail_average
        && config.algorithm == Algorithm::Sgd)
        .then(|| (vec![0.0; data.dim()], 0));

    let mut sampler = Sampler::new(config.sampler, m, mix_seed(config.seed, &[SAMPLER_STREAM]))?;
    for t in 1..=config.budget {
        let index = sampler.next_index();
        engine.step(&problem, index)?;
        if let Some((sum, count)) = tail.as_mut() {
            if t > tail_start {
                for (s, w) in sum.iter_mut().zip(engine.weights()) {
                    *s += w;
                }
                *count += 1;
            }
        }
        recorder.observe(&problem, &engine, t)?;
    }

    accounting.sampler_draws = sampler.draws();
    accounting.stochastic_steps = config.budget;
    if let Engine::Svrg { state, .. } = &engine {
        accounting.snapshot_passes = state.snapshots_taken();
    }
    recorder.record.accounting = accounting;

    let w = match tail {
        Some((sum, count)) if count > 0 => sum.into_iter().map(|s| s / count as f64).collect(),
        _ => engine.weights(),
    };
    Ok(SolverRun {
        w,
        alpha: engine.alpha().map(<[f64]>::to_vec),
        trajectory: recorder.record,
    })
}
