//! Monte Carlo harness: replicated trials, sweeps over `N`, regret-exponent
//! fits, the lower-bound protocol and assumption validation runs.
//!
//! Every trial derives its random streams from `(master_seed, N, policy, rep)`
//! alone, so results do not depend on scheduling or thread count. Covariates
//! depend only on `(master_seed, N, rep)`; all policies of one replication see
//! the same instance.

mod config;
mod fit;
mod lower_bound;
mod seed;
mod sweep;
mod trial;
mod validation;

pub use config::{ExperimentConfig, KRule, Regime, DEFAULT_REPLICATIONS, MIN_ARMS, SCHEMA_VERSION};
pub use fit::{fit_exponent, ExponentFit, Summary};
pub use lower_bound::{
    lower_bound_protocol, lower_bound_threshold, run_lower_bound, LbReport, LowerBoundConfig,
    KL_CONSTANT, TARGET_FREQUENCY,
};
pub use seed::{
    derive_seed, discrete_seed, instance_seed, lower_bound_seed, policy_seed, splitmix64,
};
pub use sweep::{
    run_sweep, run_sweep_with, run_trials, CellFailure, SweepResult, SweepRow, CSV_HEADER,
};
pub use trial::{run_policy, run_trial, TrialResult};
pub use validation::{
    run_validation, ValidationConfig, ValidationEntry, ValidationSummary, ValidationTarget,
};
