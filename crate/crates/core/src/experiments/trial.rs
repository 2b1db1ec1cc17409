use std::time::Instant;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::seed::{discrete_seed, instance_seed, policy_seed};
use crate::analysis::{
    bin_means, diagnostics, regret_decompose, regret_total, DiagnosticsReport, RegretDecomposition,
};
use crate::environment::{grid_arms, sample_arms_uniform, threshold, ArmOrigin, ArmSet, Instance};
use crate::error::{FcabError, Result};
use crate::policies::{
    baseline_random, default_parameters, oracle_discrete, oracle_star, ucbf_run, Partition,
    PolicyId, PolicyTrace,
};
use crate::SimRng;

/// Quantities shared by every trial at one `N`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Cell {
    pub n: usize,
    pub t: usize,
    pub p: f64,
    pub threshold_m: f64,
    pub delta: f64,
    pub below_guarantee: bool,
}

impl Cell {
    pub fn prepare(config: &ExperimentConfig, n: usize) -> Result<Self> {
        let t = config.regime.budget(n);
        let p = t as f64 / n as f64;
        let m = threshold(
            &config.mean_function,
            p,
            config.threshold_resolution,
            config.dim,
        )?
        .value;
        let params = default_parameters(n, p, config.dim)?;
        if params.below_guarantee {
            log::warn!(
                "N = {n}: K = {} does not exceed max(1/p, 1/(1-p))",
                params.k
            );
        }
        Ok(Self {
            n,
            t,
            p,
            threshold_m: m,
            delta: params.delta,
            below_guarantee: params.below_guarantee,
        })
    }
}

/// Outcome of one policy run on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub policy: PolicyId,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub p: f64,
    pub rep: usize,
    pub instance_seed: u64,
    pub policy_seed: u64,
    pub regret: f64,
    pub decomposition: RegretDecomposition,
    pub diagnostics: DiagnosticsReport,
    pub below_guarantee: bool,
    pub wall_ms: f64,
    #[serde(skip)]
    pub trace: Option<PolicyTrace>,
}

/// Runs replication `rep` of `policy` at `n` arms.
pub fn run_trial(
    config: &ExperimentConfig,
    n: usize,
    policy: PolicyId,
    rep: usize,
) -> Result<TrialResult> {
    config.validate()?;
    if !config.policies.contains(&policy) {
        return Err(FcabError::param(
            "policy",
            format!("'{policy}' is not listed in the config"),
        ));
    }
    let cell = Cell::prepare(config, n)?;
    run_in_cell(config, &cell, policy, rep, true)
}

pub(crate) fn build_arms(config: &ExperimentConfig, n: usize, seed: u64) -> Result<ArmSet> {
    match config.arms {
        ArmOrigin::UniformIid => sample_arms_uniform(n, config.dim, seed),
        ArmOrigin::Grid => grid_arms(n),
    }
}

pub(crate) fn run_in_cell(
    config: &ExperimentConfig,
    cell: &Cell,
    policy: PolicyId,
    rep: usize,
    keep_trace: bool,
) -> Result<TrialResult> {
    let started = config.record_timing.then(Instant::now);
    let n = cell.n;
    let iseed = instance_seed(config.master_seed, n, rep);
    let pseed = policy_seed(config.master_seed, n, policy, rep);
    let instance = Instance::with_threshold(
        build_arms(config, n, iseed)?,
        config.mean_function.clone(),
        config.reward_model,
        cell.t,
        cell.threshold_m,
    )?;
    let k = config.bins_for(policy, n, cell.t)?;
    let partition = Partition::build(instance.arms(), k)?;
    let means = bin_means(&instance, &partition, config.bin_means)?;

    let mut trace = run_policy(policy, &instance, &partition, &means, cell.delta, pseed)?;
    trace.policy = policy;
    let reference = if policy == PolicyId::OracleDiscrete {
        trace.clone()
    } else {
        oracle_discrete(
            &instance,
            &partition,
            &means,
            &mut SimRng::seed_from_u64(discrete_seed(config.master_seed, n, rep)),
        )?
    };

    let regret = regret_total(&instance, &trace)?;
    let decomposition = regret_decompose(&instance, &partition, &means, &trace, &reference)?;
    let diagnostics = diagnostics(&instance, &partition, &means)?;
    Ok(TrialResult {
        policy,
        n,
        t: cell.t,
        k,
        p: cell.p,
        rep,
        instance_seed: iseed,
        policy_seed: pseed,
        regret,
        decomposition,
        diagnostics,
        below_guarantee: cell.below_guarantee,
        wall_ms: started.map_or(0.0, |s| s.elapsed().as_secs_f64() * 1e3),
        trace: keep_trace.then_some(trace),
    })
}

/// Runs `policy` with its own stream seeded by `seed`.
pub fn run_policy(
    policy: PolicyId,
    instance: &Instance,
    partition: &Partition,
    bin_means: &[f64],
    delta: f64,
    seed: u64,
) -> Result<PolicyTrace> {
    let mut rng = SimRng::seed_from_u64(seed);
    let trace = match policy {
        PolicyId::Ucbf | PolicyId::UcbfCabK => ucbf_run(instance, partition, delta, &mut rng),
        PolicyId::OracleStar => oracle_star(instance, &mut rng),
        PolicyId::OracleDiscrete => oracle_discrete(instance, partition, bin_means, &mut rng),
        PolicyId::Random => baseline_random(instance, &mut rng),
    }?;
    Ok(PolicyTrace {
        policy,
        ..trace.with_seed(seed)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::MeanFunction;
    use crate::experiments::Regime;

    fn config(p: f64) -> ExperimentConfig {
        ExperimentConfig::new(
            MeanFunction::sinusoid(0.4, 1.0, 0.5).unwrap(),
            PolicyId::ALL.to_vec(),
            vec![200],
            Regime::FixedP { p },
        )
    }

    #[test]
    fn repeatable() {
        let c = config(0.5);
        let a = run_trial(&c, 200, PolicyId::Ucbf, 3).unwrap();
        let b = run_trial(&c, 200, PolicyId::Ucbf, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trace.as_ref().unwrap().len(), 100);
    }

    #[test]
    fn full_budget_has_no_regret() {
        let c = config(1.0);
        for policy in PolicyId::ALL {
            let r = run_trial(&c, 200, policy, 0).unwrap();
            assert_eq!(r.regret, 0.0, "{policy}");
        }
    }

    #[test]
    fn oracle_star_has_no_regret() {
        let c = config(0.3);
        for rep in 0..5 {
            assert_eq!(
                run_trial(&c, 200, PolicyId::OracleStar, rep)
                    .unwrap()
                    .regret,
                0.0
            );
        }
    }

    #[test]
    fn unlisted_policy_is_rejected() {
        let mut c = config(0.5);
        c.policies = vec![PolicyId::Ucbf];
        assert!(run_trial(&c, 200, PolicyId::Random, 0).is_err());
    }
}
