use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{FcabError, Result};

/// Conditional distribution of a reward given the arm's mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RewardModel {
    /// `y ~ Bernoulli(m)`; unbiased.
    #[default]
    Bernoulli,
    /// `y = clamp(m + sigma * Z, 0, 1)` with `Z` standard normal.
    ///
    /// Clipping biases the conditional mean towards 1/2. With
    /// `d = min(m, 1 - m)` the bias is `sigma * (phi(d/sigma) - (d/sigma) * Phi(-d/sigma))`
    /// in absolute value, which never exceeds [`RewardModel::clipping_bias_bound`].
    ClippedGaussian { sigma: f64 },
}

impl RewardModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RewardModel::Bernoulli => Ok(()),
            RewardModel::ClippedGaussian { sigma } if sigma > 0.0 && sigma.is_finite() => Ok(()),
            RewardModel::ClippedGaussian { sigma } => Err(FcabError::param(
                "sigma",
                format!("must be positive, got {sigma}"),
            )),
        }
    }

    /// Upper bound on `|E[y] - m|`: zero for Bernoulli, `sigma / sqrt(2π)` for
    /// the clipped Gaussian.
    pub fn clipping_bias_bound(&self) -> f64 {
        match *self {
            RewardModel::Bernoulli => 0.0,
            RewardModel::ClippedGaussian { sigma } => sigma / (2.0 * std::f64::consts::PI).sqrt(),
        }
    }

    /// Draws one reward; `mean` must already be known to lie in `[0, 1]`.
    #[inline]
    pub(crate) fn draw<R: Rng + ?Sized>(&self, mean: f64, rng: &mut R) -> f64 {
        match *self {
            RewardModel::Bernoulli => {
                if rng.random::<f64>() < mean {
                    1.0
                } else {
                    0.0
                }
            }
            RewardModel::ClippedGaussian { sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                (mean + sigma * z).clamp(0.0, 1.0)
            }
        }
    }
}

/// Samples a reward in `[0, 1]` with conditional mean `mean` (exactly for
/// Bernoulli, up to the clipping bias otherwise).
pub fn sample_reward<R: Rng + ?Sized>(model: &RewardModel, mean: f64, rng: &mut R) -> Result<f64> {
    if !(0.0..=1.0).contains(&mean) {
        return Err(FcabError::param("mean", format!("{mean} outside [0, 1]")));
    }
    model.validate()?;
    Ok(model.draw(mean, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SimRng;
    use rand::SeedableRng;

    #[test]
    fn bernoulli_degenerate_means() {
        let mut rng = SimRng::seed_from_u64(3);
        for _ in 0..10_000 {
            assert_eq!(
                sample_reward(&RewardModel::Bernoulli, 0.0, &mut rng).unwrap(),
                0.0
            );
            assert_eq!(
                sample_reward(&RewardModel::Bernoulli, 1.0, &mut rng).unwrap(),
                1.0
            );
        }
    }

    #[test]
    fn bernoulli_half_mean() {
        // 3 sigma / sqrt(n) = 0.0015 < 0.002
        let mut rng = SimRng::seed_from_u64(11);
        let n = 1_000_000;
        let s: f64 = (0..n)
            .map(|_| sample_reward(&RewardModel::Bernoulli, 0.5, &mut rng).unwrap())
            .sum();
        assert!((s / n as f64 - 0.5).abs() < 0.002);
    }

    #[test]
    fn out_of_range_mean_rejected() {
        let mut rng = SimRng::seed_from_u64(0);
        assert!(sample_reward(&RewardModel::Bernoulli, 1.1, &mut rng).is_err());
        assert!(sample_reward(&RewardModel::Bernoulli, -0.1, &mut rng).is_err());
        let bad = RewardModel::ClippedGaussian { sigma: 0.0 };
        assert!(sample_reward(&bad, 0.5, &mut rng).is_err());
    }

    #[test]
    fn clipped_gaussian_stays_in_range_and_bias_is_bounded() {
        let model = RewardModel::ClippedGaussian { sigma: 0.2 };
        let mut rng = SimRng::seed_from_u64(5);
        for &m in &[0.0, 0.05, 0.5, 0.97] {
            let n = 200_000;
            let mut s = 0.0;
            for _ in 0..n {
                let y = sample_reward(&model, m, &mut rng).unwrap();
                assert!((0.0..=1.0).contains(&y));
                s += y;
            }
            let bias = (s / n as f64 - m).abs();
            // sampling error 3 * 0.2 / sqrt(n) ~ 0.0013
            assert!(
                bias <= model.clipping_bias_bound() + 0.002,
                "m={m} bias={bias}"
            );
        }
        let mid_bias = {
            let mut s = 0.0;
            for _ in 0..200_000 {
                s += model.draw(0.5, &mut rng);
            }
            (s / 200_000.0 - 0.5).abs()
        };
        assert!(mid_bias < 0.002);
    }
}
