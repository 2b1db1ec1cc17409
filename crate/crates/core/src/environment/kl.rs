use super::arms::{ArmOrigin, ArmSet};
use super::lower_bound::InstancePair;
use crate::error::{FcabError, Result};

/// Kullback-Leibler divergence between Bernoulli(p) and Bernoulli(q).
pub fn bernoulli_kl(p: f64, q: f64) -> Result<f64> {
    for (name, v) in [("p", p), ("q", q)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(FcabError::param(
                name,
                format!("must lie in (0, 1), got {v}"),
            ));
        }
    }
    Ok(kl_unchecked(p, q))
}

#[inline]
fn kl_unchecked(p: f64, q: f64) -> f64 {
    (p * (p / q).ln() + (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln()).max(0.0)
}

/// Sum of per-arm Bernoulli divergences between the two members of `pair`,
/// an upper bound on the divergence between the observation laws of any policy.
pub fn instance_kl(pair: &InstancePair, arms: &ArmSet) -> Result<f64> {
    if arms.dim() != 1 || arms.origin() != ArmOrigin::Grid {
        return Err(FcabError::Inconsistent(
            "instance_kl needs one-dimensional grid arms".into(),
        ));
    }
    arms.points()
        .map(|x| {
            let a = pair.m0.eval_unchecked(x);
            let b = pair.m1.eval_unchecked(x);
            if a == b {
                Ok(0.0)
            } else {
                bernoulli_kl(a, b)
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{grid_arms, make_lower_bound_pair};

    #[test]
    fn kl_values() {
        assert_eq!(bernoulli_kl(0.5, 0.5).unwrap(), 0.0);
        // 0.25 ln(1/3) + 0.75 ln 3 = 0.5 ln 3
        let v = bernoulli_kl(0.25, 0.75).unwrap();
        assert!((v - 0.5 * 3f64.ln()).abs() < 1e-15);
        assert!((v - 0.549306).abs() < 1e-6);
        let w = bernoulli_kl(0.45, 0.55).unwrap();
        // 0.1 * ln(11/9), computed by hand
        assert!((w - 0.1 * (11.0f64 / 9.0).ln()).abs() < 1e-15);
        assert!((w - 0.020067).abs() < 1e-6);
        assert!(w <= 4.0 * 0.1 * 0.1);
    }

    #[test]
    fn kl_endpoints_rejected() {
        assert!(bernoulli_kl(0.0, 0.5).is_err());
        assert!(bernoulli_kl(0.5, 1.0).is_err());
    }

    #[test]
    fn instance_kl_requires_grid() {
        let pair = make_lower_bound_pair(0.5, 0.5, 0.23, 100_000).unwrap();
        let arms = crate::environment::sample_arms_uniform(10, 1, 0).unwrap();
        assert!(instance_kl(&pair, &arms).is_err());
        let grid = grid_arms(100_000).unwrap();
        let kl = instance_kl(&pair, &grid).unwrap();
        assert!(kl > 0.0 && kl <= 70.4 * 0.23f64.powi(3));
    }

    #[test]
    fn identical_members_give_zero() {
        let pair = make_lower_bound_pair(0.5, 0.5, 0.23, 100_000).unwrap();
        let same = InstancePair {
            m1: pair.m0.clone(),
            ..pair
        };
        assert_eq!(instance_kl(&same, &grid_arms(1000).unwrap()).unwrap(), 0.0);
    }
}
