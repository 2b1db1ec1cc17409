use rand::Rng;

use super::partition::Partition;
use super::trace::{PolicyId, PolicyTrace};
use crate::environment::Instance;
use crate::error::{FcabError, Result};

/// Arm indices sorted by decreasing mean, ties to the lower index.
pub fn arms_by_mean(means: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..means.len()).collect();
    order.sort_by(|&a, &b| means[b].total_cmp(&means[a]).then(a.cmp(&b)));
    order
}

/// Bin indices sorted by decreasing bin mean, ties to the lower bin.
pub fn bins_by_mean(bin_means: &[f64]) -> Vec<usize> {
    arms_by_mean(bin_means)
}

/// Pulls the `T` arms with the largest means.
pub fn oracle_star<R: Rng + ?Sized>(instance: &Instance, rng: &mut R) -> Result<PolicyTrace> {
    let means = instance.arm_means();
    let pulled: Vec<usize> = arms_by_mean(means)
        .into_iter()
        .take(instance.budget())
        .collect();
    Ok(sample(instance, PolicyId::OracleStar, pulled, rng))
}

/// Knows the bin means but not the arm means: exhausts bins in decreasing
/// order of bin mean and fills the remainder with uniformly chosen arms of the
/// next bin.
pub fn oracle_discrete<R: Rng + ?Sized>(
    instance: &Instance,
    partition: &Partition,
    bin_means: &[f64],
    rng: &mut R,
) -> Result<PolicyTrace> {
    if bin_means.len() != partition.bin_count() {
        return Err(FcabError::Inconsistent(format!(
            "{} bin means for {} bins",
            bin_means.len(),
            partition.bin_count()
        )));
    }
    let budget = instance.budget();
    let mut pulled = Vec::with_capacity(budget);
    for bin in bins_by_mean(bin_means) {
        let left = budget - pulled.len();
        if left == 0 {
            break;
        }
        let members = partition.members(bin);
        if members.len() <= left {
            pulled.extend_from_slice(members);
        } else {
            pulled.extend(
                rand::seq::index::sample(rng, members.len(), left)
                    .into_iter()
                    .map(|i| members[i]),
            );
        }
    }
    Ok(sample(instance, PolicyId::OracleDiscrete, pulled, rng))
}

fn sample<R: Rng + ?Sized>(
    instance: &Instance,
    policy: PolicyId,
    pulled: Vec<usize>,
    rng: &mut R,
) -> PolicyTrace {
    let means = instance.arm_means();
    let rewards = pulled
        .iter()
        .map(|&a| instance.rewards().draw(means[a], rng))
        .collect();
    PolicyTrace {
        policy,
        seed: 0,
        pulled,
        rewards,
    }
}

/// Pulls `T` distinct arms uniformly at random.
pub fn baseline_random<R: Rng + ?Sized>(instance: &Instance, rng: &mut R) -> Result<PolicyTrace> {
    let pulled = rand::seq::index::sample(rng, instance.n(), instance.budget()).into_vec();
    Ok(sample(instance, PolicyId::Random, pulled, rng))
}
