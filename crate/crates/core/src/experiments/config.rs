use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::analysis::BinMeanSource;
use crate::environment::{
    ArmOrigin, MeanFunction, RewardModel, DEFAULT_RESOLUTION, MIN_RESOLUTION,
};
use crate::error::{FcabError, Result};
use crate::policies::{cab_parameters, default_parameters, power_law_k, PolicyId};

pub const SCHEMA_VERSION: u32 = 1;
pub const MIN_ARMS: usize = 30;
pub const DEFAULT_REPLICATIONS: usize = 100;

/// How the budget follows the number of arms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Regime {
    /// `T = round(p N)`.
    FixedP { p: f64 },
    /// `T = round(0.5 N^alpha)`, `alpha` in `(2/3, 1]`.
    PowerLaw { alpha: f64 },
}

impl Regime {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Regime::FixedP { p } if !(p > 0.0 && p <= 1.0) => Err(FcabError::param(
                "regime.p",
                format!("must lie in (0, 1], got {p}"),
            )),
            Regime::PowerLaw { alpha } if !(alpha > 2.0 / 3.0 && alpha <= 1.0) => {
                Err(FcabError::param(
                    "regime.alpha",
                    format!("must lie in the window (2/3, 1], got {alpha}"),
                ))
            }
            _ => Ok(()),
        }
    }

    /// Budget for `n` arms, rounded half up and kept within `[1, n]`.
    pub fn budget(&self, n: usize) -> usize {
        let raw = match *self {
            Regime::FixedP { p } => p * n as f64,
            Regime::PowerLaw { alpha } => 0.5 * (n as f64).powf(alpha),
        };
        ((raw + 0.5).floor() as usize).clamp(1, n)
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            Regime::PowerLaw { alpha } => Some(alpha),
            Regime::FixedP { .. } => None,
        }
    }
}

/// Bin count used by `ucbf` and by the bin-based analysis of the other
/// policies. `ucbf-cab-k` always uses [`KRule::CabTuned`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KRule {
    /// The schedule from [`default_parameters`]; under a power-law regime
    /// in one dimension, [`power_law_k`].
    #[default]
    FcabTuned,
    /// `floor(sqrt(T) / ln T)`.
    CabTuned,
    Explicit {
        k: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub mean_function: MeanFunction,
    #[serde(default)]
    pub reward_model: RewardModel,
    pub policies: Vec<PolicyId>,
    pub n_grid: Vec<usize>,
    pub regime: Regime,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub k_rule: KRule,
    #[serde(default = "default_arms")]
    pub arms: ArmOrigin,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default)]
    pub bin_means: BinMeanSource,
    /// Record per-trial wall time; off by default so outputs are reproducible.
    #[serde(default)]
    pub record_timing: bool,
    #[serde(default = "default_resolution")]
    pub threshold_resolution: usize,
}

fn default_replications() -> usize {
    DEFAULT_REPLICATIONS
}

fn default_arms() -> ArmOrigin {
    ArmOrigin::UniformIid
}

fn default_dim() -> usize {
    1
}

fn default_resolution() -> usize {
    DEFAULT_RESOLUTION
}

impl ExperimentConfig {
    /// Config with every optional field at its default.
    pub fn new(
        mean_function: MeanFunction,
        policies: Vec<PolicyId>,
        n_grid: Vec<usize>,
        regime: Regime,
    ) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            mean_function,
            reward_model: RewardModel::default(),
            policies,
            n_grid,
            regime,
            replications: DEFAULT_REPLICATIONS,
            master_seed: 0,
            k_rule: KRule::default(),
            arms: default_arms(),
            dim: 1,
            bin_means: BinMeanSource::default(),
            record_timing: false,
            threshold_resolution: DEFAULT_RESOLUTION,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(FcabError::param(
                "schema",
                format!(
                    "unsupported version {}, expected {SCHEMA_VERSION}",
                    self.schema
                ),
            ));
        }
        self.mean_function.validate()?;
        self.reward_model.validate()?;
        self.regime.validate()?;
        if self.dim == 0 {
            return Err(FcabError::param("dim", "must be at least 1"));
        }
        if !self.mean_function.supports_dim(self.dim) {
            return Err(FcabError::UnsupportedDimension {
                kind: self.mean_function.kind_name(),
                dim: self.dim,
            });
        }
        if self.arms == ArmOrigin::Grid && self.dim != 1 {
            return Err(FcabError::param("arms", "grid arms are one-dimensional"));
        }
        if self.policies.is_empty() {
            return Err(FcabError::param(
                "policies",
                "at least one policy is required",
            ));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = self.policies.iter().find(|p| !seen.insert(**p)) {
            return Err(FcabError::param(
                "policies",
                format!("'{dup}' listed twice"),
            ));
        }
        if self.n_grid.is_empty() {
            return Err(FcabError::param("n_grid", "at least one N is required"));
        }
        if let Some(n) = self.n_grid.iter().find(|&&n| n < MIN_ARMS) {
            return Err(FcabError::param(
                "n_grid",
                format!("N = {n} is below {MIN_ARMS}"),
            ));
        }
        if self.replications == 0 {
            return Err(FcabError::param("replications", "must be at least 1"));
        }
        if let KRule::Explicit { k: 0 } = self.k_rule {
            return Err(FcabError::param("k_rule.k", "must be at least 1"));
        }
        if self.threshold_resolution < MIN_RESOLUTION {
            return Err(FcabError::param(
                "threshold_resolution",
                format!("must be at least {MIN_RESOLUTION}"),
            ));
        }
        Ok(())
    }

    /// Bin count `policy` uses at `n` arms and budget `t`.
    pub fn bins_for(&self, policy: PolicyId, n: usize, t: usize) -> Result<usize> {
        if policy == PolicyId::UcbfCabK {
            return cab_parameters(t);
        }
        match (self.k_rule, self.regime) {
            (KRule::Explicit { k }, _) => Ok(k),
            (KRule::CabTuned, _) => cab_parameters(t),
            (KRule::FcabTuned, Regime::PowerLaw { alpha }) if self.dim == 1 => {
                power_law_k(t, alpha)
            }
            (KRule::FcabTuned, _) => Ok(default_parameters(n, t as f64 / n as f64, self.dim)?.k),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig::new(
            MeanFunction::identity(),
            vec![PolicyId::Ucbf],
            vec![1000],
            Regime::FixedP { p: 0.5 },
        )
    }

    #[test]
    fn rounding_half_up() {
        assert_eq!(Regime::FixedP { p: 0.5 }.budget(101), 51);
        assert_eq!(Regime::FixedP { p: 0.3 }.budget(10), 3);
        assert_eq!(Regime::FixedP { p: 1.0 }.budget(77), 77);
        // 0.5 * 8192^0.7 = 274.3
        assert_eq!(Regime::PowerLaw { alpha: 0.7 }.budget(8192), 274);
    }

    #[test]
    fn validation_errors() {
        assert!(base().validate().is_ok());
        let mut c = base();
        c.regime = Regime::PowerLaw { alpha: 0.5 };
        assert!(c.validate().unwrap_err().to_string().contains("(2/3, 1]"));
        let mut c = base();
        c.n_grid = vec![10];
        assert!(c.validate().is_err());
        let mut c = base();
        c.policies = vec![PolicyId::Ucbf, PolicyId::Ucbf];
        assert!(c.validate().is_err());
        let mut c = base();
        c.dim = 2;
        assert!(c.validate().is_err());
    }

    #[test]
    fn bin_rules() {
        let mut c = base();
        assert_eq!(c.bins_for(PolicyId::Ucbf, 1000, 500).unwrap(), 2);
        assert_eq!(c.bins_for(PolicyId::UcbfCabK, 1000, 500).unwrap(), 3);
        c.k_rule = KRule::Explicit { k: 7 };
        assert_eq!(c.bins_for(PolicyId::Random, 1000, 500).unwrap(), 7);
        c.k_rule = KRule::FcabTuned;
        c.regime = Regime::PowerLaw { alpha: 0.85 };
        let t = c.regime.budget(1000);
        assert_eq!(
            c.bins_for(PolicyId::Ucbf, 1000, t).unwrap(),
            power_law_k(t, 0.85).unwrap()
        );
    }

    #[test]
    fn defaults_from_minimal_json() {
        let json = r#"{"schema":1,"mean_function":{"kind":"constant","value":0.5},
            "policies":["ucbf"],"n_grid":[100],"regime":{"kind":"fixed_p","p":0.5}}"#;
        let c: ExperimentConfig = serde_json::from_str(json).unwrap();
        assert_eq!(c.replications, DEFAULT_REPLICATIONS);
        assert_eq!(c.k_rule, KRule::FcabTuned);
        assert_eq!(c.arms, ArmOrigin::UniformIid);
        assert_eq!(c.dim, 1);
    }
}
