use serde::{Deserialize, Serialize};

use crate::error::{FcabError, Result};

/// Bin count and confidence parameter for UCBF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UcbfParameters {
    /// Bins per axis.
    pub k: usize,
    pub delta: f64,
    /// Set when `K <= max(1/p, 1/(1-p))`, i.e. the regret guarantee does not
    /// apply at this `N`.
    pub below_guarantee: bool,
}

/// Default schedule: in one dimension `K = floor(N^{1/3} ln(N)^{-2/3})` and
/// `delta = N^{-4/3}`; in `d >= 2` dimensions
/// `K = ceil(N^{1/(d+2)} ln(N)^{-2/(d+2)})` and `delta = N^{-(2d+2)/(d+2)}`.
pub fn default_parameters(n: usize, p: f64, dim: usize) -> Result<UcbfParameters> {
    if n < 3 {
        return Err(FcabError::param(
            "N",
            format!("must be at least 3, got {n}"),
        ));
    }
    if dim == 0 {
        return Err(FcabError::param("dim", "must be at least 1"));
    }
    let nf = n as f64;
    let ln = nf.ln();
    let (k, delta) = if dim == 1 {
        let raw = nf.cbrt() / ln.cbrt().powi(2);
        (raw.floor(), nf.powf(-4.0 / 3.0))
    } else {
        let d = dim as f64;
        let raw = nf.powf(1.0 / (d + 2.0)) * ln.powf(-2.0 / (d + 2.0));
        (raw.ceil(), nf.powf(-(2.0 * d + 2.0) / (d + 2.0)))
    };
    let k = (k as usize).max(1);
    Ok(UcbfParameters {
        k,
        delta,
        below_guarantee: below_guarantee(k, p),
    })
}

fn below_guarantee(k: usize, p: f64) -> bool {
    (k as f64) <= (1.0 / p).max(1.0 / (1.0 - p))
}

/// Bin count tuned for the classical continuum-armed setting:
/// `K = max(1, floor(sqrt(T) / ln T))`.
pub fn cab_parameters(t: usize) -> Result<usize> {
    if t < 8 {
        return Err(FcabError::param(
            "T",
            format!("must be at least 8, got {t}"),
        ));
    }
    let tf = t as f64;
    Ok(((tf.sqrt() / tf.ln()).floor() as usize).max(1))
}

/// Bin count for budgets `T = 0.5 N^alpha`:
/// `K = floor(alpha^{2/3} (2T)^{1/(3 alpha)} ln(2T)^{-2/3})`, at least 1.
pub fn power_law_k(t: usize, alpha: f64) -> Result<usize> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(FcabError::param(
            "alpha",
            format!("must lie in (0, 1], got {alpha}"),
        ));
    }
    if t < 2 {
        return Err(FcabError::param(
            "T",
            format!("must be at least 2, got {t}"),
        ));
    }
    let two_t = 2.0 * t as f64;
    let raw = alpha.powf(2.0 / 3.0) * two_t.powf(1.0 / (3.0 * alpha)) * two_t.ln().powf(-2.0 / 3.0);
    Ok((raw.floor() as usize).max(1))
}

/// Upper confidence index `sum / n + sqrt(ln(T / delta) / (2 n))`.
///
/// Never-pulled bins have no index; UCBF pulls them once during initialisation.
pub fn ucbf_index(sum_rewards: f64, n_k: usize, t: usize, delta: f64) -> Result<f64> {
    if n_k == 0 {
        return Err(FcabError::param(
            "n_k",
            "index undefined for an unpulled bin",
        ));
    }
    if !(delta > 0.0 && delta < t as f64) {
        return Err(FcabError::param(
            "delta",
            format!("must lie in (0, T), got {delta}"),
        ));
    }
    Ok(index_unchecked(sum_rewards, n_k, ((t as f64) / delta).ln()))
}

#[inline]
pub(crate) fn index_unchecked(sum_rewards: f64, n_k: usize, log_term: f64) -> f64 {
    let n = n_k as f64;
    sum_rewards / n + (log_term / (2.0 * n)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_schedule() {
        let a = default_parameters(1000, 0.5, 1).unwrap();
        assert_eq!(a.k, 2);
        assert!((a.delta - 1e-4).abs() < 1e-16);
        let b = default_parameters(1_000_000, 0.5, 1).unwrap();
        assert_eq!(b.k, 17);
        assert!((b.delta - 1e-8).abs() < 1e-20);
        assert!(!b.below_guarantee);
        // K = 2 <= 1/0.4 = 2.5
        assert!(default_parameters(1000, 0.4, 1).unwrap().below_guarantee);
        assert!(default_parameters(2, 0.5, 1).is_err());
    }

    #[test]
    fn multi_dimensional_schedule_uses_ceiling() {
        // N = 10^4, d = 2: 10^(4/4) * ln(10^4)^(-1/2) = 10 / 3.0349 = 3.295
        let p = default_parameters(10_000, 0.5, 2).unwrap();
        assert_eq!(p.k, 4);
        assert!((p.delta - 10_000f64.powf(-1.5)).abs() < 1e-18);
    }

    #[test]
    fn cab_schedule() {
        assert_eq!(cab_parameters(10_000).unwrap(), 10);
        assert_eq!(cab_parameters(100).unwrap(), 2);
        assert_eq!(cab_parameters(8).unwrap(), 1);
        assert!(cab_parameters(7).is_err());
    }

    #[test]
    fn power_law_matches_default_at_alpha_one() {
        for n in [1000usize, 8192, 131_072, 1_000_000] {
            let t = n / 2;
            let d = default_parameters(n, 0.5, 1).unwrap().k;
            assert_eq!(power_law_k(t, 1.0).unwrap(), d, "N = {n}");
        }
    }

    #[test]
    fn index_values() {
        let v = ucbf_index(1.2, 2, 100, 0.01).unwrap();
        assert!((v - (0.6 + (1e4f64.ln() / 4.0).sqrt())).abs() < 1e-15);
        assert!((v - 2.117427).abs() < 1e-6);
        let e2 = std::f64::consts::E.powi(2);
        let one = ucbf_index(0.0, 1, 100, 100.0 / e2).unwrap();
        assert!((one - 1.0).abs() < 1e-12);
        let w = ucbf_index(25.0, 50, 100, 0.01).unwrap();
        assert!((w - 0.803485).abs() < 1e-6);
        assert!(ucbf_index(0.0, 0, 100, 0.01).is_err());
    }
}
