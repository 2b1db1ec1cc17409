use serde::{Deserialize, Serialize};

use super::bins::compute_f_hat;
use crate::environment::Instance;
use crate::error::{FcabError, Result};
use crate::policies::{bins_by_mean, Partition, PolicyTrace};

/// Regret of one run split into discretization and learning terms.
///
/// `r_total = r_disc + r_fmab` and `r_fmab = r_opt + r_boundary + r_subopt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegretDecomposition {
    pub r_total: f64,
    /// Regret of the discretized oracle.
    pub r_disc: f64,
    /// Regret relative to the discretized oracle; may be negative.
    pub r_fmab: f64,
    /// Unpulled arms of the best `f̂` bins.
    pub r_opt: f64,
    /// Pulls in bins ranked `f̂ + 2` and below.
    pub r_subopt: f64,
    /// Disagreement inside bin `f̂ + 1`.
    pub r_boundary: f64,
    pub f_hat: usize,
    pub f: usize,
    pub m_hat: f64,
    pub threshold_m: f64,
}

/// Sum of the `T` largest values and the `T`-th largest value.
pub(crate) fn top_t(means: &[f64], t: usize) -> (f64, f64) {
    let mut sorted = means.to_vec();
    sorted.select_nth_unstable_by(t - 1, |a, b| b.total_cmp(a));
    sorted.truncate(t);
    let m_hat = sorted[t - 1];
    (canonical_sum(sorted), m_hat)
}

/// Sum in decreasing order, so equal multisets give bit-identical sums.
fn canonical_sum(mut values: Vec<f64>) -> f64 {
    values.sort_unstable_by(|a, b| b.total_cmp(a));
    values.iter().sum()
}

fn pulled_mask(n: usize, trace: &PolicyTrace, t: usize) -> Result<Vec<bool>> {
    if trace.pulled.len() != t {
        return Err(FcabError::TraceLength {
            expected: t,
            got: trace.pulled.len(),
        });
    }
    let mut mask = vec![false; n];
    for &a in &trace.pulled {
        if a >= n || mask[a] {
            return Err(FcabError::Inconsistent(format!(
                "{} trace pulls arm {a} twice or out of range",
                trace.policy
            )));
        }
        mask[a] = true;
    }
    Ok(mask)
}

/// `R_T`: sum of the `T` largest true means minus the true means of the pulled arms.
pub fn regret_total(instance: &Instance, trace: &PolicyTrace) -> Result<f64> {
    let t = instance.budget();
    pulled_mask(instance.n(), trace, t)?;
    let means = instance.arm_means();
    let (best, _) = top_t(means, t);
    Ok(best - canonical_sum(trace.pulled.iter().map(|&a| means[a]).collect()))
}

/// Splits the regret of `trace` using the discretized-oracle run `discrete_trace`
/// built from the same `bin_means`.
pub fn regret_decompose(
    instance: &Instance,
    partition: &Partition,
    bin_means: &[f64],
    trace: &PolicyTrace,
    discrete_trace: &PolicyTrace,
) -> Result<RegretDecomposition> {
    let n = instance.n();
    let t = instance.budget();
    if partition.n_arms() != n || bin_means.len() != partition.bin_count() {
        return Err(FcabError::Inconsistent(
            "partition or bin means do not match the instance".into(),
        ));
    }
    let phi = pulled_mask(n, trace, t)?;
    let phi_d = pulled_mask(n, discrete_trace, t)?;
    let means = instance.arm_means();
    let m = instance.threshold_m();

    let order = bins_by_mean(bin_means);
    let mut rank = vec![0usize; order.len()];
    for (r, &b) in order.iter().enumerate() {
        rank[b] = r;
    }
    let counts = partition.counts();
    let ordered: Vec<usize> = order.iter().map(|&b| counts[b]).collect();
    let f_hat = compute_f_hat(&ordered, t)?;

    let (best, m_hat) = top_t(means, t);
    let (mut r_opt, mut r_boundary, mut r_subopt) = (0.0, 0.0, 0.0);
    for a in 0..n {
        let r = rank[partition.bin_of(a)];
        let mu = means[a];
        // the discretized oracle must hold every arm of the top f̂ bins and nothing below f̂ + 1
        if (r < f_hat && !phi_d[a]) || (r > f_hat && phi_d[a]) {
            return Err(FcabError::Inconsistent(
                "discrete trace does not follow the bin ordering".into(),
            ));
        }
        if r < f_hat {
            if !phi[a] {
                r_opt += mu - m;
            }
        } else if r == f_hat {
            match (phi_d[a], phi[a]) {
                (true, false) => r_boundary += mu - m,
                (false, true) => r_boundary += m - mu,
                _ => {}
            }
        } else if phi[a] {
            r_subopt += m - mu;
        }
    }

    let sum_phi = canonical_sum(trace.pulled.iter().map(|&a| means[a]).collect());
    let sum_phi_d = canonical_sum(discrete_trace.pulled.iter().map(|&a| means[a]).collect());
    Ok(RegretDecomposition {
        r_total: best - sum_phi,
        r_disc: best - sum_phi_d,
        r_fmab: sum_phi_d - sum_phi,
        r_opt,
        r_subopt,
        r_boundary,
        f_hat,
        f: (instance.p() * partition.bin_count() as f64).floor() as usize,
        m_hat,
        threshold_m: m,
    })
}
