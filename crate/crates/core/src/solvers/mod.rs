//! Pegasos SGD, SDCA, SAG and SVRG, plus a budgeted runner that records
//! trajectories.

mod pegasos;
mod runner;
mod sag;
mod sdca;
mod svrg;
mod trajectory;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss::SmoothedHinge;
use crate::objective::check_lambda;
use crate::sampling::SamplerKind;

pub use pegasos::{PegasosState, ScaledVector};
pub use runner::{run_solver, RecordOptions, SolverRun};
pub use sag::SagState;
pub use sdca::SdcaState;
pub use svrg::SvrgState;
pub use trajectory::{AlphaSnapshot, BudgetAccounting, TrajectoryPoint, TrajectoryRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Sgd,
    Sdca,
    Sag,
    Svrg,
}

impl Algorithm {
    pub fn needs_stepsize(self) -> bool {
        matches!(self, Algorithm::Sag | Algorithm::Svrg)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Sgd => "sgd",
            Algorithm::Sdca => "sdca",
            Algorithm::Sag => "sag",
            Algorithm::Svrg => "svrg",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sgd" | "pegasos" => Ok(Algorithm::Sgd),
            "sdca" => Ok(Algorithm::Sdca),
            "sag" => Ok(Algorithm::Sag),
            "svrg" => Ok(Algorithm::Svrg),
            other => Err(Error::InvalidParameter(format!(
                "unknown algorithm '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub lambda: f64,
    /// Constant stepsize; required for SAG and SVRG, rejected otherwise.
    pub stepsize: Option<f64>,
    pub sampler: SamplerKind,
    /// SVRG inner loop length as a multiple of `m`.
    pub svrg_inner_multiplier: f64,
    /// Number of stochastic steps `T`.
    pub budget: u64,
    pub seed: u64,
    pub loss: SmoothedHinge,
    /// SGD only: return the average of the last half of the iterates.
    pub tail_average: bool,
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm, lambda: f64, budget: u64) -> Self {
        Self {
            algorithm,
            lambda,
            stepsize: None,
            sampler: SamplerKind::Iid,
            svrg_inner_multiplier: 2.0,
            budget,
            seed: 0,
            loss: SmoothedHinge::default(),
            tail_average: false,
        }
    }

    pub fn with_sampler(mut self, sampler: SamplerKind) -> Self {
        self.sampler = sampler;
        self
    }

    pub fn with_stepsize(mut self, stepsize: f64) -> Self {
        self.stepsize = Some(stepsize);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_loss(mut self, loss: SmoothedHinge) -> Self {
        self.loss = loss;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_lambda(self.lambda)?;
        if self.budget == 0 {
            return Err(Error::InvalidParameter("budget T must be >= 1".into()));
        }
        match (self.algorithm.needs_stepsize(), self.stepsize) {
            (true, None) => {
                return Err(Error::InvalidParameter(format!(
                    "{} requires a stepsize",
                    self.algorithm
                )))
            }
            (false, Some(_)) => {
                return Err(Error::InvalidParameter(format!(
                    "{} does not take a stepsize",
                    self.algorithm
                )))
            }
            (true, Some(eta)) if !(eta > 0.0 && eta.is_finite()) => {
                return Err(Error::InvalidParameter(format!(
                    "stepsize must be positive, got {eta}"
                )))
            }
            _ => {}
        }
        if !(self.svrg_inner_multiplier > 0.0 && self.svrg_inner_multiplier.is_finite()) {
            return Err(Error::InvalidParameter(
                "svrg_inner_multiplier must be positive".into(),
            ));
        }
        Ok(())
    }

    /// SVRG inner loop length for a training set of size `m`.
    pub fn svrg_inner_len(&self, m: usize) -> u64 {
        ((self.svrg_inner_multiplier * m as f64).round() as u64).max(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stepsize_required_iff_sag_or_svrg() {
        assert!(SolverConfig::new(Algorithm::Sdca, 0.1, 10)
            .validate()
            .is_ok());
        assert!(SolverConfig::new(Algorithm::Sag, 0.1, 10)
            .validate()
            .is_err());
        assert!(SolverConfig::new(Algorithm::Svrg, 0.1, 10)
            .with_stepsize(0.5)
            .validate()
            .is_ok());
        assert!(SolverConfig::new(Algorithm::Sgd, 0.1, 10)
            .with_stepsize(0.5)
            .validate()
            .is_err());
        assert!(SolverConfig::new(Algorithm::Sag, 0.1, 10)
            .with_stepsize(-1.0)
            .validate()
            .is_err());
    }

    #[test]
    fn rejects_bad_lambda_and_budget() {
        assert!(SolverConfig::new(Algorithm::Sdca, 0.0, 10)
            .validate()
            .is_err());
        assert!(SolverConfig::new(Algorithm::Sdca, 0.1, 0)
            .validate()
            .is_err());
    }

    #[test]
    fn inner_len_rounds() {
        let c = SolverConfig::new(Algorithm::Svrg, 0.1, 10);
        assert_eq!(c.svrg_inner_len(7), 14);
        let mut c = c;
        c.svrg_inner_multiplier = 0.25;
        assert_eq!(c.svrg_inner_len(2), 1);
        assert_eq!(c.svrg_inner_len(6), 2);
    }

    #[test]
    fn parse_algorithm() {
        assert_eq!("SDCA".parse::<Algorithm>().unwrap(), Algorithm::Sdca);
        assert!("adam".parse::<Algorithm>().is_err());
    }
}
