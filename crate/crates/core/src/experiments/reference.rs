use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::loss::SmoothedHinge;
use crate::objective::Problem;
use crate::sampling::{Sampler, SamplerKind};
use crate::solvers::SdcaState;

/// A certified approximate optimum of the regularized objective.
///
/// `dual_value <= P* <= primal_value <= dual_value + tol`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceOptimum {
    pub w: Vec<f64>,
    pub alpha: Vec<f64>,
    pub lambda: f64,
    pub dual_value: f64,
    pub primal_value: f64,
    pub tol: f64,
    pub steps: u64,
}

impl ReferenceOptimum {
    /// Value that suboptimalities are measured against: the primal objective
    /// at the certified point, an upper bound on `P*` within `tol`.
    pub fn value(&self) -> f64 {
        self.primal_value
    }

    pub fn gap(&self) -> f64 {
        self.primal_value - self.dual_value
    }

    /// Interval guaranteed to contain the optimal primal value; its width is
    /// the certified gap, so at most `tol`.
    pub fn interval(&self) -> (f64, f64) {
        (self.dual_value, self.primal_value)
    }
}

/// Runs SDCA with i.i.d. sampling until the duality gap at `(w(alpha), alpha)`
/// is at most `tol`, checking once per epoch. Gives up after
/// `10^4 (m + 1/lambda)` steps.
pub fn reference_optimum(
    data: &Dataset,
    lambda: f64,
    loss: SmoothedHinge,
    tol: f64,
    seed: u64,
) -> Result<ReferenceOptimum> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let problem = Problem::new(data, lambda, loss)?;
    let m = data.len();
    let cap = (1e4 * (m as f64 + 1.0 / lambda)).ceil() as u64;
    let mut state = SdcaState::new(&problem);
    let mut sampler = Sampler::new(SamplerKind::Iid, m, seed)?;
    let mut steps = 0u64;
    loop {
        // rebuild w(alpha) so the certificate does not inherit update drift
        let w = problem.dual_to_primal(state.alpha())?;
        let dual_value = problem.dual_with_primal(state.alpha(), &w);
        let primal_value = problem.primal(&w)?;
        let gap = primal_value - dual_value;
        if gap <= tol {
            return Ok(ReferenceOptimum {
                w,
                alpha: state.alpha().to_vec(),
                lambda,
                dual_value,
                primal_value,
                tol,
                steps,
            });
        }
        if steps >= cap {
            return Err(Error::IterationCap { cap, gap, tol });
        }
        for _ in 0..m {
            state.step(&problem, sampler.next_index());
        }
        steps += m as u64;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Label, LabeledExample, SparseVector};

    #[test]
    fn single_example_closed_form() {
        let data = Dataset::new(
            vec![LabeledExample::new(
                SparseVector::from_dense(&[1.0]).unwrap(),
                Label::Positive,
            )],
            1,
        )
        .unwrap();
        let r = reference_optimum(&data, 1.0, SmoothedHinge::default(), 1e-12, 0).unwrap();
        assert_eq!(r.w, vec![0.5]);
        assert_eq!(r.primal_value, 0.25);
        assert_eq!(r.gap(), 0.0);
        assert_eq!(r.steps, 1);
    }

    #[test]
    fn loose_tolerance_certifies_origin() {
        let data = crate::experiments::synth_pathological(10, 3).unwrap();
        let r = reference_optimum(&data, 0.1, SmoothedHinge::default(), 0.5, 0).unwrap();
        assert_eq!(r.steps, 0);
        assert_eq!(r.gap(), 0.5);
        assert!(r.w.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn certificate_width_within_tol() {
        let data = crate::experiments::synth_pathological(10, 3).unwrap();
        let r = reference_optimum(&data, 0.1, SmoothedHinge::default(), 1e-10, 1).unwrap();
        let (lo, hi) = r.interval();
        assert!(hi - lo <= 1e-10 + f64::EPSILON);
        assert!(r.gap() <= 1e-10);
        assert!(lo <= r.primal_value && r.primal_value <= hi);
    }

    #[test]
    fn rejects_nonpositive_tol() {
        let data = crate::experiments::synth_pathological(4, 3).unwrap();
        assert!(reference_optimum(&data, 0.1, SmoothedHinge::default(), 0.0, 0).is_err());
    }
}
