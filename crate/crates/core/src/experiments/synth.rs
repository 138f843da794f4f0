//! Synthetic datasets.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label, LabeledExample, SparseVector};
use crate::error::{Error, Result};
use crate::sampling::rng_from_seed;

/// `m` points in `R^(m+1)`: point `i` has a 1 at coordinate `i` and a random
/// sign at coordinate `m`, and its label equals that sign.
pub fn synth_pathological(m: usize, seed: u64) -> Result<Dataset> {
    if m < 2 {
        return Err(Error::InvalidParameter(
            "pathological dataset needs m >= 2".into(),
        ));
    }
    let mut rng = rng_from_seed(seed);
    let examples = (0..m)
        .map(|i| {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let x = SparseVector::new(vec![(i, 1.0), (m, sign)], m + 1)?;
            Ok(LabeledExample::new(x, Label::from_sign(sign)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(examples, m + 1)
}

/// Two spherical unit-variance Gaussian classes centred at `+-mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub n: usize,
    pub d: usize,
    /// Probability of flipping each label after its features are drawn.
    pub margin_noise: f64,
    /// `|mu|`; `mu` points along the all-ones direction.
    pub mean_norm: f64,
}

impl GaussianSpec {
    pub const DEFAULT_MEAN_NORM: f64 = 1.0;

    pub fn new(n: usize, d: usize, margin_noise: f64) -> Self {
        Self {
            n,
            d,
            margin_noise,
            mean_norm: Self::DEFAULT_MEAN_NORM,
        }
    }

    pub fn with_mean_norm(mut self, mean_norm: f64) -> Self {
        self.mean_norm = mean_norm;
        self
    }
}

/// Draws `y` uniformly, `x ~ N(y mu, I)`, projects `x` into the unit ball and
/// then flips `y` with probability `margin_noise`.
pub fn synth_gaussian(spec: GaussianSpec, seed: u64) -> Result<Dataset> {
    if spec.n == 0 || spec.d == 0 {
        return Err(Error::InvalidParameter(
            "gaussian dataset needs n, d >= 1".into(),
        ));
    }
    if !(0.0..=1.0).contains(&spec.margin_noise) {
        return Err(Error::InvalidParameter(format!(
            "margin_noise must lie in [0, 1], got {}",
            spec.margin_noise
        )));
    }
    if !(spec.mean_norm >= 0.0 && spec.mean_norm.is_finite()) {
        return Err(Error::InvalidParameter(
            "mean_norm must be non-negative".into(),
        ));
    }
    let mut rng = rng_from_seed(seed);
    let mu = spec.mean_norm / (spec.d as f64).sqrt();
    let examples = (0..spec.n)
        .map(|_| {
            let label = if rng.random_bool(0.5) {
                Label::Positive
            } else {
                Label::Negative
            };
            let mut x: Vec<f64> = (0..spec.d)
                .map(|_| label.sign() * mu + rng.sample::<f64, _>(StandardNormal))
                .collect();
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1.0 {
                x.iter_mut().for_each(|v| *v /= norm);
            }
            let flip = spec.margin_noise > 0.0 && rng.random_bool(spec.margin_noise);
            let y = if flip { label.flipped() } else { label };
            Ok(LabeledExample::new(SparseVector::from_dense(&x)?, y))
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(examples, spec.d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::zero_one_error;

    #[test]
    fn pathological_construction() {
        let data = synth_pathological(10, 7).unwrap();
        assert_eq!(data.len(), 10);
        assert_eq!(data.dim(), 11);
        for (i, e) in data.examples().iter().enumerate() {
            assert_eq!(e.x.squared_norm(), 2.0);
            assert_eq!(e.x.indices(), &[i, 10]);
            assert_eq!(e.y.sign() * e.x.values()[1], 1.0);
        }
        assert!(synth_pathological(1, 0).is_err());
    }

    #[test]
    fn pathological_separated_by_last_coordinate() {
        let data = synth_pathological(25, 1).unwrap();
        let mut w = vec![0.0; 26];
        w[25] = 1.0;
        assert_eq!(zero_one_error(&w, &data).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_is_deterministic_and_in_unit_ball() {
        let spec = GaussianSpec::new(500, 6, 0.1);
        let a = synth_gaussian(spec, 9).unwrap();
        let b = synth_gaussian(spec, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, synth_gaussian(spec, 10).unwrap());
        assert!(a
            .examples()
            .iter()
            .all(|e| e.x.squared_norm() <= 1.0 + 1e-12));
    }

    #[test]
    fn gaussian_rejects_bad_noise() {
        assert!(synth_gaussian(GaussianSpec::new(10, 2, 1.5), 0).is_err());
        assert!(synth_gaussian(GaussianSpec::new(0, 2, 0.0), 0).is_err());
    }
}
