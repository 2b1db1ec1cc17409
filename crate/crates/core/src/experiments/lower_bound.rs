use serde::{Deserialize, Serialize};

use super::seed::lower_bound_seed;
use super::trial::run_policy;
use crate::analysis::{bin_means, regret_total, BinMeanSource};
use crate::environment::{grid_arms, instance_kl, make_lower_bound_pair, Instance, RewardModel};
use crate::error::{FcabError, Result};
use crate::par::{map_indexed, Execution};
use crate::policies::{cab_parameters, default_parameters, Partition, PolicyId};

/// Regret level whose exceedance probability the protocol estimates.
pub fn lower_bound_threshold(t: usize, p: f64) -> f64 {
    0.01 * (t as f64).cbrt() / p.cbrt()
}

/// Target frequency: at least one of the two instances should exceed the
/// threshold with probability 0.1 or more.
pub const TARGET_FREQUENCY: f64 = 0.1;

/// KL budget of the pair per unit `alpha^3`.
pub const KL_CONSTANT: f64 = 70.4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LowerBoundConfig {
    pub schema: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub p: f64,
    pub lipschitz: f64,
    #[serde(default = "default_alpha")]
    pub alpha_lb: f64,
    #[serde(default = "default_policy")]
    pub policy: PolicyId,
    #[serde(default = "default_reps")]
    pub replications: usize,
    #[serde(default)]
    pub master_seed: u64,
}

fn default_alpha() -> f64 {
    0.23
}

impl LowerBoundConfig {
    /// Checks the schema version, the replication count and the construction window.
    pub fn validate(&self) -> Result<()> {
        if self.schema != super::config::SCHEMA_VERSION {
            return Err(FcabError::param(
                "schema",
                format!("unsupported version {}", self.schema),
            ));
        }
        if self.replications == 0 {
            return Err(FcabError::param("replications", "must be at least 1"));
        }
        make_lower_bound_pair(self.p, self.lipschitz, self.alpha_lb, self.n).map(|_| ())
    }
}

fn default_policy() -> PolicyId {
    PolicyId::Ucbf
}

fn default_reps() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LbReport {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub p: f64,
    pub lipschitz: f64,
    pub l_tilde: f64,
    pub alpha_lb: f64,
    pub lb_half_width: f64,
    pub policy: PolicyId,
    pub replications: usize,
    pub master_seed: u64,
    pub threshold: f64,
    /// Empirical `P(R_T >= threshold)` on each member of the pair.
    pub frequency: [f64; 2],
    pub max_frequency: f64,
    pub mean_regret: [f64; 2],
    pub target_frequency: f64,
    pub reached_target: bool,
    pub instance_kl: f64,
    pub kl_bound: f64,
    pub kl_within_bound: bool,
    /// Whether `N >= max(1 / (min(p, 1-p)^3 L̃^2), 811)`, the size under which
    /// the construction's guarantees are proved.
    pub size_condition_met: bool,
}

/// Runs `policy` `replications` times on each member of the lower-bound pair
/// (grid arms, Bernoulli rewards) and reports how often the regret exceeds
/// `0.01 T^{1/3} p^{-1/3}`.
#[allow(clippy::too_many_arguments)]
pub fn lower_bound_protocol(
    n: usize,
    p: f64,
    lipschitz: f64,
    alpha_lb: f64,
    policy: PolicyId,
    replications: usize,
    master_seed: u64,
    exec: Execution,
) -> Result<LbReport> {
    if replications == 0 {
        return Err(FcabError::param("replications", "must be at least 1"));
    }
    let pair = make_lower_bound_pair(p, lipschitz, alpha_lb, n)?;
    let arms = grid_arms(n)?;
    let t = ((p * n as f64 + 0.5).floor() as usize).clamp(1, n);
    let params = default_parameters(n, p, 1)?;
    let k = if policy == PolicyId::UcbfCabK {
        cab_parameters(t)?
    } else {
        params.k
    };
    let instances = [0u8, 1].map(|role| {
        Instance::with_threshold(
            arms.clone(),
            pair.member(role).clone(),
            RewardModel::Bernoulli,
            t,
            0.5,
        )
    });
    let [i0, i1] = instances;
    let instances = [i0?, i1?];
    let partition = Partition::build(&arms, k)?;
    let means = [
        bin_means(&instances[0], &partition, BinMeanSource::Integral)?,
        bin_means(&instances[1], &partition, BinMeanSource::Integral)?,
    ];

    let regrets: Vec<Result<f64>> = map_indexed(2 * replications, exec, |i| {
        let role = i / replications;
        let rep = i % replications;
        let seed = lower_bound_seed(master_seed, n, role as u8, policy, rep);
        let inst = &instances[role];
        let trace = run_policy(policy, inst, &partition, &means[role], params.delta, seed)?;
        regret_total(inst, &trace)
    });
    let regrets: Vec<f64> = regrets.into_iter().collect::<Result<_>>()?;

    let threshold = lower_bound_threshold(t, p);
    let summarize = |role: usize| {
        let slice = &regrets[role * replications..(role + 1) * replications];
        let hits = slice.iter().filter(|&&r| r >= threshold).count();
        (
            hits as f64 / replications as f64,
            slice.iter().sum::<f64>() / replications as f64,
        )
    };
    let (f0, r0) = summarize(0);
    let (f1, r1) = summarize(1);
    let max_frequency = f0.max(f1);
    let kl = instance_kl(&pair, &arms)?;
    let kl_bound = KL_CONSTANT * alpha_lb.powi(3);
    let side = p.min(1.0 - p);
    let size_needed = (1.0 / (side.powi(3) * pair.l_tilde.powi(2))).max(811.0);
    Ok(LbReport {
        n,
        t,
        k,
        p,
        lipschitz,
        l_tilde: pair.l_tilde,
        alpha_lb,
        lb_half_width: pair.lb_half_width,
        policy,
        replications,
        master_seed,
        threshold,
        frequency: [f0, f1],
        max_frequency,
        mean_regret: [r0, r1],
        target_frequency: TARGET_FREQUENCY,
        reached_target: max_frequency >= TARGET_FREQUENCY,
        instance_kl: kl,
        kl_bound,
        kl_within_bound: kl <= kl_bound,
        size_condition_met: n as f64 >= size_needed,
    })
}

/// Runs the protocol described by `config`.
pub fn run_lower_bound(config: &LowerBoundConfig, exec: Execution) -> Result<LbReport> {
    config.validate()?;
    lower_bound_protocol(
        config.n,
        config.p,
        config.lipschitz,
        config.alpha_lb,
        config.policy,
        config.replications,
        config.master_seed,
        exec,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_value() {
        // 0.01 * (5e4)^(1/3) * 2^(1/3) = 0.01 * 1e5^(1/3)
        let v = lower_bound_threshold(50_000, 0.5);
        assert!((v - 0.464_158_883).abs() < 1e-8, "{v}");
    }

    #[test]
    fn oracle_never_exceeds() {
        let r = lower_bound_protocol(
            20_000,
            0.5,
            0.5,
            0.23,
            PolicyId::OracleStar,
            5,
            1,
            Execution::Serial,
        )
        .unwrap();
        assert_eq!(r.frequency, [0.0, 0.0]);
        assert!(r.kl_within_bound);
        assert!(r.size_condition_met);
    }

    #[test]
    fn window_errors_propagate() {
        assert!(lower_bound_protocol(
            1000,
            0.5,
            0.5,
            0.01,
            PolicyId::Ucbf,
            5,
            1,
            Execution::Serial
        )
        .is_err());
    }
}
