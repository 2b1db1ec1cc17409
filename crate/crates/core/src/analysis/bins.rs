use serde::{Deserialize, Serialize};

use crate::environment::{Instance, MeanFunction};
use crate::error::{FcabError, Result};
use crate::policies::Partition;

/// How bin means are obtained for ordering bins.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinMeanSource {
    /// Average of the mean function over the bin.
    #[default]
    Integral,
    /// Average of the true means of the arms inside the bin (0 for empty bins).
    Empirical,
}

/// Average of `f` over the box `[lo, hi]`.
pub fn bin_mean(f: &MeanFunction, lo: &[f64], hi: &[f64]) -> Result<f64> {
    f.box_average(lo, hi)
}

/// Bin mean for every bin of `partition`.
pub fn bin_means(
    instance: &Instance,
    partition: &Partition,
    source: BinMeanSource,
) -> Result<Vec<f64>> {
    if partition.n_arms() != instance.n() || partition.dim() != instance.arms().dim() {
        return Err(FcabError::Inconsistent(
            "partition was not built from this instance's arms".into(),
        ));
    }
    match source {
        BinMeanSource::Integral => (0..partition.bin_count())
            .map(|b| {
                let (lo, hi) = partition.bounds(b);
                bin_mean(instance.mean(), &lo, &hi)
            })
            .collect(),
        BinMeanSource::Empirical => {
            let means = instance.arm_means();
            Ok((0..partition.bin_count())
                .map(|b| {
                    let members = partition.members(b);
                    if members.is_empty() {
                        0.0
                    } else {
                        members.iter().map(|&a| means[a]).sum::<f64>() / members.len() as f64
                    }
                })
                .collect())
        }
    }
}

/// The `f̂` with `N_1 + .. + N_f̂ < T <= N_1 + .. + N_{f̂+1}` for counts ordered
/// by decreasing bin mean.
pub fn compute_f_hat(ordered_counts: &[usize], t: usize) -> Result<usize> {
    if t == 0 {
        return Err(FcabError::param("T", "must be positive"));
    }
    let mut acc = 0usize;
    for (f, &n) in ordered_counts.iter().enumerate() {
        acc += n;
        if acc >= t {
            return Ok(f);
        }
    }
    Err(FcabError::BudgetUnreachable {
        budget: t,
        reachable: acc,
    })
}
