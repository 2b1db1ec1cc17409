use serde::{Deserialize, Serialize};

use super::bins::compute_f_hat;
use super::regret::top_t;
use crate::environment::Instance;
use crate::error::{FcabError, Result};
use crate::policies::{bins_by_mean, Partition};

/// Scale-free summaries of how close an instance is to the idealised picture
/// behind the regret analysis. Purely descriptive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub k: usize,
    pub bins: usize,
    /// `floor(p * K^d)`.
    pub f: usize,
    pub f_hat: usize,
    pub f_gap: usize,
    /// Mean of the `T`-th best arm.
    pub m_hat: f64,
    pub threshold_m: f64,
    /// `|M̂ - M| K / L`; 0 when `L = 0`.
    pub m_hat_ratio: f64,
    /// `max_k |N_k - N / K^d|`.
    pub count_deviation: f64,
    /// `count_deviation * 2 K^d / N`.
    pub count_ratio: f64,
}

pub fn diagnostics(
    instance: &Instance,
    partition: &Partition,
    bin_means: &[f64],
) -> Result<DiagnosticsReport> {
    if bin_means.len() != partition.bin_count() || partition.n_arms() != instance.n() {
        return Err(FcabError::Inconsistent(
            "partition or bin means do not match the instance".into(),
        ));
    }
    let bins = partition.bin_count();
    let counts = partition.counts();
    let ordered: Vec<usize> = bins_by_mean(bin_means)
        .into_iter()
        .map(|b| counts[b])
        .collect();
    let f_hat = compute_f_hat(&ordered, instance.budget())?;
    let f = (instance.p() * bins as f64).floor() as usize;
    let (_, m_hat) = top_t(instance.arm_means(), instance.budget());
    let m = instance.threshold_m();
    let l = instance.mean().lipschitz;
    let ideal = instance.n() as f64 / bins as f64;
    let count_deviation = counts
        .iter()
        .map(|&c| (c as f64 - ideal).abs())
        .fold(0.0, f64::max);
    Ok(DiagnosticsReport {
        k: partition.k(),
        bins,
        f,
        f_hat,
        f_gap: f.abs_diff(f_hat),
        m_hat,
        threshold_m: m,
        m_hat_ratio: if l > 0.0 {
            (m_hat - m).abs() * partition.k() as f64 / l
        } else {
            0.0
        },
        count_deviation,
        count_ratio: count_deviation * 2.0 / ideal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{bin_means, BinMeanSource};
    use crate::environment::{grid_arms, ArmOrigin, ArmSet, MeanFunction, RewardModel};

    #[test]
    fn grid_reference_values() {
        let inst = Instance::new(
            grid_arms(4).unwrap(),
            MeanFunction::identity(),
            RewardModel::Bernoulli,
            2,
        )
        .unwrap();
        let part = Partition::build(inst.arms(), 2).unwrap();
        let bm = bin_means(&inst, &part, BinMeanSource::Integral).unwrap();
        let d = diagnostics(&inst, &part, &bm).unwrap();
        assert_eq!(d.m_hat, 0.75);
        assert_eq!(d.f, 1);
        assert!((d.m_hat_ratio - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exact_equipartition() {
        // midpoints (i + 0.5) / 80 sit strictly inside the bins
        let xs: Vec<f64> = (0..80).map(|i| (i as f64 + 0.5) / 80.0).collect();
        let arms = ArmSet::from_points(1, xs, ArmOrigin::Grid).unwrap();
        let inst =
            Instance::new(arms, MeanFunction::identity(), RewardModel::Bernoulli, 40).unwrap();
        let part = Partition::build(inst.arms(), 4).unwrap();
        let bm = bin_means(&inst, &part, BinMeanSource::Integral).unwrap();
        let d = diagnostics(&inst, &part, &bm).unwrap();
        assert_eq!(d.count_deviation, 0.0);
        assert_eq!(d.f, 2);
        assert_eq!(d.f_hat, 1);
        let json = serde_json::to_value(d).unwrap();
        assert!(json.as_object().unwrap().values().all(|v| !v.is_object()));
    }
}
