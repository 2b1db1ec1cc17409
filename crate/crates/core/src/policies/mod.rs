//! Bandit policies for the fixed-budget setting: UCBF over a regular
//! partition, two oracles that know the means, and a uniform baseline.
//!
//! Every policy pulls each arm at most once and returns a [`PolicyTrace`].

mod oracle;
mod params;
mod partition;
mod trace;
mod ucbf;

pub use oracle::{arms_by_mean, baseline_random, bins_by_mean, oracle_discrete, oracle_star};
pub use params::{cab_parameters, default_parameters, power_law_k, ucbf_index, UcbfParameters};
pub use partition::Partition;
pub use trace::{PolicyId, PolicyTrace, PullRecord};
pub use ucbf::ucbf_run;
