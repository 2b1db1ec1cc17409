//! Problem instances: covariates, mean-reward functions, reward sampling and
//! the adversarial lower-bound pair, plus numerical assumption checks.

mod arms;
mod kl;
mod lower_bound;
mod mean;
mod reward;
mod threshold;
mod validate;

pub use arms::{grid_arms, sample_arms_uniform, ArmOrigin, ArmSet};
pub use kl::{bernoulli_kl, instance_kl};
pub use lower_bound::{make_lower_bound_pair, InstancePair};
pub use mean::{MeanFunction, MeanKind};
pub use reward::{sample_reward, RewardModel};
pub use threshold::{
    compute_threshold_m, threshold, Threshold, ThresholdMethod, DEFAULT_RESOLUTION, MIN_RESOLUTION,
};
pub use validate::{
    log_spaced_eps, verify_margin, verify_margin_in, verify_weak_lipschitz,
    verify_weak_lipschitz_in, Assumption, MarginPoint, ValidationReport,
};

use crate::error::{FcabError, Result};

/// One F-CAB problem: `N` arms, their mean function, the reward model and the
/// budget `T`. True arm means are evaluated once at construction.
#[derive(Debug, Clone)]
pub struct Instance {
    arms: ArmSet,
    mean: MeanFunction,
    rewards: RewardModel,
    budget: usize,
    threshold_m: f64,
    arm_means: Vec<f64>,
}

impl Instance {
    /// Builds an instance, computing the threshold at the default resolution.
    pub fn new(
        arms: ArmSet,
        mean: MeanFunction,
        rewards: RewardModel,
        budget: usize,
    ) -> Result<Self> {
        check_budget(budget, arms.len())?;
        let p = budget as f64 / arms.len() as f64;
        let m = threshold(&mean, p, DEFAULT_RESOLUTION, arms.dim())?.value;
        Self::with_threshold(arms, mean, rewards, budget, m)
    }

    /// Builds an instance with a precomputed threshold.
    pub fn with_threshold(
        arms: ArmSet,
        mean: MeanFunction,
        rewards: RewardModel,
        budget: usize,
        threshold_m: f64,
    ) -> Result<Self> {
        check_budget(budget, arms.len())?;
        mean.validate()?;
        mean.check_dim(arms.dim())?;
        rewards.validate()?;
        if !(0.0..=1.0).contains(&threshold_m) {
            return Err(FcabError::param(
                "threshold_m",
                format!("{threshold_m} outside [0, 1]"),
            ));
        }
        let arm_means = arms.points().map(|x| mean.eval_unchecked(x)).collect();
        Ok(Self {
            arms,
            mean,
            rewards,
            budget,
            threshold_m,
            arm_means,
        })
    }

    pub fn arms(&self) -> &ArmSet {
        &self.arms
    }

    pub fn mean(&self) -> &MeanFunction {
        &self.mean
    }

    pub fn rewards(&self) -> &RewardModel {
        &self.rewards
    }

    pub fn n(&self) -> usize {
        self.arms.len()
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Budget fraction `T / N`.
    pub fn p(&self) -> f64 {
        self.budget as f64 / self.arms.len() as f64
    }

    pub fn threshold_m(&self) -> f64 {
        self.threshold_m
    }

    /// True mean reward of every arm, in arm order.
    pub fn arm_means(&self) -> &[f64] {
        &self.arm_means
    }
}

fn check_budget(budget: usize, n: usize) -> Result<()> {
    if budget == 0 || budget > n {
        return Err(FcabError::param(
            "budget",
            format!("T = {budget} must lie in [1, N = {n}]"),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_invariants() {
        let arms = grid_arms(10).unwrap();
        let inst = Instance::new(
            arms.clone(),
            MeanFunction::identity(),
            RewardModel::Bernoulli,
            3,
        )
        .unwrap();
        assert!((inst.p() - 0.3).abs() < 1e-15);
        assert_eq!(inst.threshold_m(), 0.7);
        assert_eq!(inst.arm_means()[9], 1.0);
        assert!(Instance::new(
            arms.clone(),
            MeanFunction::identity(),
            RewardModel::Bernoulli,
            0
        )
        .is_err());
        assert!(Instance::new(
            arms.clone(),
            MeanFunction::identity(),
            RewardModel::Bernoulli,
            11
        )
        .is_err());
        let two_d = sample_arms_uniform(5, 2, 1).unwrap();
        assert!(Instance::new(two_d, MeanFunction::identity(), RewardModel::Bernoulli, 2).is_err());
    }
}
