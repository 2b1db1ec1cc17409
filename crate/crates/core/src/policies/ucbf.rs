use rand::Rng;

use super::params::index_unchecked;
use super::partition::Partition;
use super::trace::{PolicyId, PolicyTrace};
use crate::environment::Instance;
use crate::error::{FcabError, Result};

/// Runs UCBF for `instance.budget()` rounds.
///
/// Bins with fewer than two arms are never considered. Each remaining bin is
/// first sampled once in ascending order; afterwards the alive bin with the
/// largest index is chosen (ties to the lowest bin) and one of its unpulled
/// arms is drawn uniformly. Emptied bins leave the alive set.
pub fn ucbf_run<R: Rng + ?Sized>(
    instance: &Instance,
    partition: &Partition,
    delta: f64,
    rng: &mut R,
) -> Result<PolicyTrace> {
    let t_budget = instance.budget();
    if partition.n_arms() != instance.n() {
        return Err(FcabError::Inconsistent(format!(
            "partition covers {} arms, instance has {}",
            partition.n_arms(),
            instance.n()
        )));
    }
    if !(delta > 0.0 && delta < t_budget as f64) {
        return Err(FcabError::param(
            "delta",
            format!("must lie in (0, T), got {delta}"),
        ));
    }
    let reachable = partition.reachable_arms();
    if t_budget > reachable {
        return Err(FcabError::BudgetUnreachable {
            budget: t_budget,
            reachable,
        });
    }

    let mut state = RunState {
        remaining: (0..partition.bin_count())
            .map(|b| partition.members(b).to_vec())
            .collect(),
        pulls: vec![0; partition.bin_count()],
        sums: vec![0.0; partition.bin_count()],
        index: vec![f64::NEG_INFINITY; partition.bin_count()],
        log_term: (t_budget as f64 / delta).ln(),
        pulled: Vec::with_capacity(t_budget),
        rewards: Vec::with_capacity(t_budget),
    };
    let mut alive = partition.initially_alive();

    let init: Vec<usize> = alive.iter().copied().take(t_budget).collect();
    let mut emptied = Vec::new();
    for &bin in &init {
        if state.pull(bin, instance, rng) {
            emptied.push(bin);
        }
    }
    alive.retain(|b| !emptied.contains(b));

    for _ in init.len()..t_budget {
        let mut best_pos = usize::MAX;
        let mut best_val = f64::NEG_INFINITY;
        for (pos, &b) in alive.iter().enumerate() {
            if best_pos == usize::MAX || state.index[b] > best_val {
                best_pos = pos;
                best_val = state.index[b];
            }
        }
        if best_pos == usize::MAX {
            return Err(FcabError::Inconsistent(
                "alive set exhausted before budget".into(),
            ));
        }
        if state.pull(alive[best_pos], instance, rng) {
            alive.remove(best_pos);
        }
    }

    Ok(PolicyTrace {
        policy: PolicyId::Ucbf,
        seed: 0,
        pulled: state.pulled,
        rewards: state.rewards,
    })
}

struct RunState {
    remaining: Vec<Vec<usize>>,
    pulls: Vec<usize>,
    sums: Vec<f64>,
    index: Vec<f64>,
    log_term: f64,
    pulled: Vec<usize>,
    rewards: Vec<f64>,
}

impl RunState {
    /// Pulls a uniform unpulled arm of `bin`; returns whether the bin is now empty.
    fn pull<R: Rng + ?Sized>(&mut self, bin: usize, instance: &Instance, rng: &mut R) -> bool {
        let pool = &mut self.remaining[bin];
        let arm = pool.swap_remove(rng.random_range(0..pool.len()));
        let r = instance.rewards().draw(instance.arm_means()[arm], rng);
        self.pulls[bin] += 1;
        self.sums[bin] += r;
        self.index[bin] = index_unchecked(self.sums[bin], self.pulls[bin], self.log_term);
        self.pulled.push(arm);
        self.rewards.push(r);
        pool.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{grid_arms, ArmOrigin, ArmSet, MeanFunction, RewardModel};
    use crate::SimRng;
    use rand::SeedableRng;
    use std::collections::HashSet;

    fn instance(n: usize, t: usize, f: MeanFunction) -> Instance {
        Instance::new(grid_arms(n).unwrap(), f, RewardModel::Bernoulli, t).unwrap()
    }

    #[test]
    fn pulls_each_arm_at_most_once() {
        let inst = instance(300, 150, MeanFunction::identity());
        let part = Partition::build(inst.arms(), 5).unwrap();
        let mut rng = SimRng::seed_from_u64(1);
        let tr = ucbf_run(&inst, &part, 1e-3, &mut rng).unwrap();
        assert_eq!(tr.len(), 150);
        assert_eq!(tr.pulled.iter().collect::<HashSet<_>>().len(), 150);
        assert!(tr.rewards.iter().all(|&r| r == 0.0 || r == 1.0));
    }

    #[test]
    fn initialisation_visits_bins_in_order() {
        let inst = instance(100, 50, MeanFunction::identity());
        let part = Partition::build(inst.arms(), 4).unwrap();
        let tr = ucbf_run(&inst, &part, 1e-3, &mut SimRng::seed_from_u64(7)).unwrap();
        let first: Vec<usize> = tr.pulled[..4].iter().map(|&a| part.bin_of(a)).collect();
        assert_eq!(first, vec![0, 1, 2, 3]);
    }

    #[test]
    fn concentrates_on_high_bins() {
        let step =
            MeanFunction::piecewise_linear(vec![0.0, 0.5, 0.5001, 1.0], vec![0.0, 0.0, 1.0, 1.0])
                .unwrap();
        let inst = instance(1000, 200, step);
        let part = Partition::build(inst.arms(), 10).unwrap();
        let tr = ucbf_run(&inst, &part, 1e-4, &mut SimRng::seed_from_u64(3)).unwrap();
        let low = tr.pulled.iter().filter(|&&a| part.bin_of(a) < 5).count();
        assert!(low < 60, "low-bin pulls = {low}");
    }

    #[test]
    fn singleton_bins_are_skipped_and_budget_checked() {
        let arms =
            ArmSet::from_points(1, vec![0.1, 0.2, 0.6, 0.9, 0.95], ArmOrigin::UniformIid).unwrap();
        let inst = Instance::new(
            arms.clone(),
            MeanFunction::identity(),
            RewardModel::Bernoulli,
            4,
        )
        .unwrap();
        let part = Partition::build(&arms, 4).unwrap();
        let tr = ucbf_run(&inst, &part, 0.01, &mut SimRng::seed_from_u64(0)).unwrap();
        assert!(!tr.pulled.contains(&2));
        let over =
            Instance::new(arms, MeanFunction::identity(), RewardModel::Bernoulli, 5).unwrap();
        assert!(matches!(
            ucbf_run(&over, &part, 0.01, &mut SimRng::seed_from_u64(0)),
            Err(FcabError::BudgetUnreachable {
                budget: 5,
                reachable: 4
            })
        ));
    }

    #[test]
    fn budget_below_alive_bins_truncates_initialisation() {
        let inst = instance(100, 3, MeanFunction::identity());
        let part = Partition::build(inst.arms(), 10).unwrap();
        let tr = ucbf_run(&inst, &part, 0.01, &mut SimRng::seed_from_u64(0)).unwrap();
        let bins: Vec<usize> = tr.pulled.iter().map(|&a| part.bin_of(a)).collect();
        assert_eq!(bins, vec![0, 1, 2]);
    }

    #[test]
    fn exhausts_bins_when_budget_equals_reachable() {
        let inst = instance(40, 40, MeanFunction::identity());
        let part = Partition::build(inst.arms(), 4).unwrap();
        let tr = ucbf_run(&inst, &part, 0.01, &mut SimRng::seed_from_u64(9)).unwrap();
        let mut all = tr.pulled.clone();
        all.sort_unstable();
        assert_eq!(all, (0..40).collect::<Vec<_>>());
    }
}
