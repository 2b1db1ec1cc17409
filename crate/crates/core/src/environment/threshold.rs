//! The threshold `M = inf { A : λ({x : m(x) >= A}) < p }`.
//!
//! Three routes, in order of preference: the function's declared analytic
//! value, an exact solve for piecewise-linear functions, and a grid quantile.
//! When `m` has a plateau at the `p`-level the defining minimum is not
//! attained; every route returns the infimum and the plateau is flagged.

use serde::{Deserialize, Serialize};

use super::mean::MeanFunction;
use crate::error::{FcabError, Result};

pub const DEFAULT_RESOLUTION: usize = 1_000_000;
pub const MIN_RESOLUTION: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMethod {
    Analytic,
    ExactPiecewise,
    GridQuantile,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub value: f64,
    pub method: ThresholdMethod,
    /// `m` is constant on a set of positive measure at level `value`.
    pub plateau: bool,
}

/// One-dimensional threshold; see [`threshold`].
pub fn compute_threshold_m(f: &MeanFunction, p: f64, resolution: usize) -> Result<f64> {
    threshold(f, p, resolution, 1).map(|t| t.value)
}

/// Threshold of `f` on `[0,1]^dim` at budget fraction `p ∈ (0, 1]`.
///
/// The grid route evaluates `f` on the midpoint lattice with
/// `ceil(resolution^(1/dim))` nodes per axis; its error is at most
/// `L * dim / resolution^(1/dim)` for `L`-Lipschitz `f`.
pub fn threshold(f: &MeanFunction, p: f64, resolution: usize, dim: usize) -> Result<Threshold> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(FcabError::param(
            "p",
            format!("must lie in (0, 1], got {p}"),
        ));
    }
    if resolution < MIN_RESOLUTION {
        return Err(FcabError::param(
            "resolution",
            format!("must be at least {MIN_RESOLUTION}, got {resolution}"),
        ));
    }
    f.check_dim(dim)?;
    if let Some(value) = f.analytic_m {
        return Ok(Threshold {
            value,
            method: ThresholdMethod::Analytic,
            plateau: false,
        });
    }
    if let Some((bp, vals)) = f.piecewise_linear_form() {
        return Ok(exact_piecewise(&bp, &vals, p));
    }
    Ok(grid_quantile(f, p, resolution, dim))
}

/// Measure of `{m >= level}` (or `{m > level}` when `strict`).
fn level_measure(bp: &[f64], vals: &[f64], level: f64, strict: bool) -> f64 {
    let above = |v: f64| if strict { v > level } else { v >= level };
    let mut total = 0.0;
    for j in 1..bp.len() {
        let (u, w) = (vals[j - 1], vals[j]);
        let h = bp[j] - bp[j - 1];
        total += match (above(u), above(w)) {
            (true, true) => h,
            (false, false) => 0.0,
            (true, false) => (u - level) / (u - w) * h,
            (false, true) => (w - level) / (w - u) * h,
        };
    }
    total
}

fn exact_piecewise(bp: &[f64], vals: &[f64], p: f64) -> Threshold {
    let mut levels = vals.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    // Between consecutive vertex levels the measure is affine in the level.
    for (j, &v) in levels.iter().enumerate() {
        let closed = level_measure(bp, vals, v, false);
        let open = level_measure(bp, vals, v, true);
        if open < p {
            return Threshold {
                value: v,
                method: ThresholdMethod::ExactPiecewise,
                plateau: closed - open > 1e-12,
            };
        }
        let next = levels[j + 1];
        let b = level_measure(bp, vals, next, false);
        if b < p {
            let value = v + (open - p) / (open - b) * (next - v);
            return Threshold {
                value,
                method: ThresholdMethod::ExactPiecewise,
                plateau: false,
            };
        }
    }
    unreachable!("measure of {{m > max m}} is zero")
}

fn grid_quantile(f: &MeanFunction, p: f64, resolution: usize, dim: usize) -> Threshold {
    let per_axis = ((resolution as f64).powf(1.0 / dim as f64) - 1e-9)
        .ceil()
        .max(1.0) as usize;
    let total = per_axis.pow(dim as u32);
    let mut values = Vec::with_capacity(total);
    let mut idx = vec![0usize; dim];
    let mut x = vec![0.0; dim];
    for _ in 0..total {
        for (xj, &ij) in x.iter_mut().zip(&idx) {
            *xj = (ij as f64 + 0.5) / per_axis as f64;
        }
        values.push(f.eval_unchecked(&x));
        for ij in idx.iter_mut().rev() {
            *ij += 1;
            if *ij < per_axis {
                break;
            }
            *ij = 0;
        }
    }
    // The k-th largest value with k = ceil(p * total): strictly fewer than
    // p * total grid values exceed it.
    let k = ((p * total as f64) - 1e-9).ceil().max(1.0) as usize;
    let (_, &mut kth, _) = values.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
    let ties = values.iter().filter(|&&v| v == kth).count();
    Threshold {
        value: kth,
        method: ThresholdMethod::GridQuantile,
        plateau: ties as f64 > 1e-3 * total as f64,
    }
}
