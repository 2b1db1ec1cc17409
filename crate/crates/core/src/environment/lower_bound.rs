use serde::{Deserialize, Serialize};

use super::mean::MeanFunction;
use crate::error::{FcabError, Result};

/// Two piecewise-linear mean functions that coincide outside `[x0, x1]` and
/// swap which of the two bumps around `1 - p` lies above the threshold 1/2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstancePair {
    pub m0: MeanFunction,
    pub m1: MeanFunction,
    pub lb_half_width: f64,
    pub x0: f64,
    pub x1: f64,
    pub alpha_lb: f64,
    pub l_tilde: f64,
    pub p: f64,
    /// Margin constant both members satisfy: `6 * max(1/L, 2)`.
    pub margin_q: f64,
}

/// Builds the adversarial pair for budget fraction `p`, Lipschitz constant
/// `lipschitz` and `n` grid arms.
///
/// `alpha_lb` must lie in `(20 n^{-2/3}, 0.5]` and the bumps must fit inside
/// `(0, 1)`; otherwise `n` is too small for the construction.
pub fn make_lower_bound_pair(
    p: f64,
    lipschitz: f64,
    alpha_lb: f64,
    n: usize,
) -> Result<InstancePair> {
    if !(p > 0.0 && p < 1.0) {
        return Err(FcabError::param(
            "p",
            format!("must lie in (0, 1), got {p}"),
        ));
    }
    if !(lipschitz > 0.0 && lipschitz.is_finite()) {
        return Err(FcabError::param(
            "lipschitz",
            format!("must be positive, got {lipschitz}"),
        ));
    }
    if n == 0 {
        return Err(FcabError::param("n", "at least one arm is required"));
    }
    let nf = n as f64;
    let alpha_min = 20.0 * nf.powf(-2.0 / 3.0);
    if !(alpha_lb > alpha_min && alpha_lb <= 0.5) {
        return Err(FcabError::LowerBoundWindow(format!(
            "alpha_lb = {alpha_lb} must lie in ({alpha_min:.6}, 0.5] for N = {n}"
        )));
    }
    let l_tilde = lipschitz.min(0.5);
    let half_width = alpha_lb * (nf * l_tilde * l_tilde).cbrt().recip();
    if 2.0 * half_width >= p.min(1.0 - p) {
        return Err(FcabError::LowerBoundWindow(format!(
            "2 * half_width = {:.6} must be below min(p, 1-p) = {:.6}; increase N",
            2.0 * half_width,
            p.min(1.0 - p)
        )));
    }
    let margin_q = 6.0 * (1.0 / lipschitz).max(2.0);
    let member = |role| {
        MeanFunction::lower_bound_member(role, p, l_tilde, half_width)
            .map(|f| f.with_margin(margin_q))
    };
    Ok(InstancePair {
        m0: member(0)?,
        m1: member(1)?,
        lb_half_width: half_width,
        x0: 1.0 - p - 2.0 * half_width,
        x1: 1.0 - p + 2.0 * half_width,
        alpha_lb,
        l_tilde,
        p,
        margin_q,
    })
}

impl InstancePair {
    pub fn member(&self, role: u8) -> &MeanFunction {
        if role == 0 {
            &self.m0
        } else {
            &self.m1
        }
    }

    /// Largest deviation of either member from 1/2 inside `[x0, x1]`.
    pub fn peak_deviation(&self) -> f64 {
        self.l_tilde * self.lb_half_width
    }
}
