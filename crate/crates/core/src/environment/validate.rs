//! Numerical checks of the weak-Lipschitz and margin conditions.
//!
//! Both conditions are measure-theoretic, so they can only be falsified on a
//! grid. Each check allows an additive slack of `2 / grid`.

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::mean::MeanFunction;
use crate::error::{FcabError, Result};
use crate::SimRng;

const FULL_PAIRS_LIMIT: usize = 2_000;
const RANDOM_PAIRS: usize = 1_000_000;
const NEIGHBOR_OFFSETS: usize = 8;
const PAIR_SEED: u64 = 0x05ee_d0f9_a1d0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assumption {
    WeakLipschitz,
    Margin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginPoint {
    pub eps: f64,
    /// Grid estimate of `λ({x : |M - m(x)| <= eps})`.
    pub measure: f64,
    /// `Q * eps + slack`.
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub assumption: Assumption,
    pub function: String,
    pub threshold_m: f64,
    /// `L` for the Lipschitz check, `Q` for the margin check.
    pub constant: f64,
    pub grid: usize,
    pub slack: f64,
    pub passed: bool,
    /// Pairs (Lipschitz) or epsilon values (margin) examined.
    pub checked: u64,
    /// Largest violation `lhs - rhs` found, before slack; negative when the
    /// condition holds with room to spare.
    pub worst_excess: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_pair: Option<[Vec<f64>; 2]>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub margin_points: Vec<MarginPoint>,
}

fn check_grid(grid: usize) -> Result<()> {
    if grid < 1_000 {
        return Err(FcabError::param(
            "grid",
            format!("must be at least 1000, got {grid}"),
        ));
    }
    Ok(())
}

fn lattice(grid: usize, dim: usize, midpoints: bool) -> (usize, Vec<f64>) {
    let per_axis = ((grid as f64).powf(1.0 / dim as f64).round() as usize).max(2);
    let total = per_axis.pow(dim as u32);
    let coord = |i: usize| {
        if midpoints {
            (i as f64 + 0.5) / per_axis as f64
        } else {
            i as f64 / (per_axis - 1) as f64
        }
    };
    let mut pts = Vec::with_capacity(total * dim);
    let mut idx = vec![0usize; dim];
    for _ in 0..total {
        pts.extend(idx.iter().map(|&i| coord(i)));
        for ij in idx.iter_mut().rev() {
            *ij += 1;
            if *ij < per_axis {
                break;
            }
            *ij = 0;
        }
    }
    (per_axis, pts)
}

/// Weak-Lipschitz check in one dimension.
pub fn verify_weak_lipschitz(
    f: &MeanFunction,
    m: f64,
    l: f64,
    grid: usize,
) -> Result<ValidationReport> {
    verify_weak_lipschitz_in(f, m, l, grid, 1)
}

/// Checks `|m(x) - m(y)| <= max(|M - m(x)|, L ||x - y||_2)` on lattice pairs.
///
/// All pairs are examined when the lattice has at most 2000 points; otherwise
/// every near-neighbour pair along each axis plus 10^6 seeded random pairs.
pub fn verify_weak_lipschitz_in(
    f: &MeanFunction,
    m: f64,
    l: f64,
    grid: usize,
    dim: usize,
) -> Result<ValidationReport> {
    check_grid(grid)?;
    f.check_dim(dim)?;
    let (per_axis, pts) = lattice(grid, dim, false);
    let n = pts.len() / dim;
    let point = |i: usize| &pts[i * dim..(i + 1) * dim];
    let vals: Vec<f64> = (0..n).map(|i| f.eval_unchecked(point(i))).collect();

    let mut worst = f64::NEG_INFINITY;
    let mut worst_pair = (0, 0);
    let mut checked = 0u64;
    let mut visit = |i: usize, j: usize| {
        let dist: f64 = point(i)
            .iter()
            .zip(point(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let lhs = (vals[i] - vals[j]).abs();
        let reach = l * dist;
        // the condition is anchored at the first argument, so test both orders
        for (a, b) in [(i, j), (j, i)] {
            let excess = lhs - (m - vals[a]).abs().max(reach);
            if excess > worst {
                worst = excess;
                worst_pair = (a, b);
            }
        }
        checked += 1;
    };

    if n <= FULL_PAIRS_LIMIT {
        for i in 0..n {
            for j in i + 1..n {
                visit(i, j);
            }
        }
    } else {
        let mut offsets: Vec<usize> = (1..=NEIGHBOR_OFFSETS).collect();
        offsets.extend((1..dim).map(|k| per_axis.pow(k as u32)));
        for &s in &offsets {
            for i in 0..n.saturating_sub(s) {
                visit(i, i + s);
            }
        }
        let mut rng = SimRng::seed_from_u64(PAIR_SEED);
        for _ in 0..RANDOM_PAIRS {
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            if i != j {
                visit(i, j);
            }
        }
    }

    let slack = 2.0 / grid as f64;
    Ok(ValidationReport {
        assumption: Assumption::WeakLipschitz,
        function: f.kind_name().to_string(),
        threshold_m: m,
        constant: l,
        grid,
        slack,
        passed: worst <= slack,
        checked,
        worst_excess: worst,
        worst_pair: Some([point(worst_pair.0).to_vec(), point(worst_pair.1).to_vec()]),
        margin_points: Vec::new(),
    })
}

/// Margin check in one dimension.
pub fn verify_margin(
    f: &MeanFunction,
    m: f64,
    q: f64,
    eps_values: &[f64],
    grid: usize,
) -> Result<ValidationReport> {
    verify_margin_in(f, m, q, eps_values, grid, 1)
}

/// Estimates `λ({x : |M - m(x)| <= eps})` on a grid and passes iff it stays
/// below `Q * eps + 2 / grid` for every `eps`.
///
/// In one dimension the estimate is the exact band measure of the linear
/// interpolant through `grid + 1` equispaced nodes; in higher dimensions it is
/// the fraction of midpoint-lattice nodes inside the band.
pub fn verify_margin_in(
    f: &MeanFunction,
    m: f64,
    q: f64,
    eps_values: &[f64],
    grid: usize,
    dim: usize,
) -> Result<ValidationReport> {
    check_grid(grid)?;
    f.check_dim(dim)?;
    if let Some(bad) = eps_values.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
        return Err(FcabError::param("eps", format!("{bad} outside (0, 1)")));
    }
    let slack = 2.0 / grid as f64;
    let measure_of: Box<dyn Fn(f64) -> f64> = if dim == 1 {
        // exact measure of the eps-band of the piecewise-linear interpolant
        let dev: Vec<f64> = (0..=grid)
            .map(|i| f.eval_unchecked(&[i as f64 / grid as f64]) - m)
            .collect();
        Box::new(move |eps| {
            dev.windows(2)
                .map(|w| band_fraction(w[0], w[1], eps))
                .sum::<f64>()
                / grid as f64
        })
    } else {
        let (_, pts) = lattice(grid, dim, true);
        let mut gaps: Vec<f64> = pts
            .chunks_exact(dim)
            .map(|x| (m - f.eval_unchecked(x)).abs())
            .collect();
        gaps.sort_by(f64::total_cmp);
        Box::new(move |eps| gaps.partition_point(|&g| g <= eps) as f64 / gaps.len() as f64)
    };

    let margin_points: Vec<MarginPoint> = eps_values
        .iter()
        .map(|&eps| {
            let measure = measure_of(eps);
            let bound = q * eps + slack;
            MarginPoint {
                eps,
                measure,
                bound,
                passed: measure <= bound,
            }
        })
        .collect();
    let worst_excess = margin_points
        .iter()
        .map(|mp| mp.measure - q * mp.eps)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ValidationReport {
        assumption: Assumption::Margin,
        function: f.kind_name().to_string(),
        threshold_m: m,
        constant: q,
        grid,
        slack,
        passed: margin_points.iter().all(|mp| mp.passed),
        checked: margin_points.len() as u64,
        worst_excess,
        worst_pair: None,
        margin_points,
    })
}

/// Fraction of a cell on which the linear segment from `a` to `b` lies in `[-eps, eps]`.
fn band_fraction(a: f64, b: f64, eps: f64) -> f64 {
    if a == b {
        return if a.abs() <= eps { 1.0 } else { 0.0 };
    }
    let t1 = (-eps - a) / (b - a);
    let t2 = (eps - a) / (b - a);
    (t1.max(t2).min(1.0) - t1.min(t2).max(0.0)).max(0.0)
}

/// Log-spaced epsilon values in `[lo, hi]`.
pub fn log_spaced_eps(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::make_lower_bound_pair;

    #[test]
    fn identity_is_lipschitz() {
        let id = MeanFunction::identity();
        for grid in [1_000, 50_000] {
            let r = verify_weak_lipschitz(&id, 0.3, 1.0, grid).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn step_across_threshold_fails_with_location() {
        let step = MeanFunction::piecewise_linear(
            vec![0.0, 0.5, 0.5 + 1e-9, 1.0],
            vec![0.2, 0.2, 0.8, 0.8],
        )
        .unwrap();
        let r = verify_weak_lipschitz(&step, 0.5, 1.0, 1_000).unwrap();
        assert!(!r.passed);
        let [x, y] = r.worst_pair.unwrap();
        assert!((x[0] - 0.5) * (y[0] - 0.5) < 0.0, "{x:?} {y:?}");
        assert!((r.worst_excess - 0.3).abs() < 1e-9);

        let big = verify_weak_lipschitz(&step, 0.5, 1.0, 100_000).unwrap();
        assert!(!big.passed);
    }

    #[test]
    fn identity_margin() {
        let id = MeanFunction::identity();
        assert!(verify_margin(&id, 0.7, 2.0, &[0.1], 10_000).unwrap().passed);
        let fail = verify_margin(&id, 0.7, 1.0, &[0.1], 10_000).unwrap();
        assert!(!fail.passed);
        assert!((fail.margin_points[0].measure - 0.2).abs() < 1e-12);
        let r2 = verify_margin_in(&id, 0.7, 1.0, &[0.1], 10_000, 2);
        assert!(r2.is_err());
    }

    #[test]
    fn lower_bound_members_pass_both() {
        let pair = make_lower_bound_pair(0.5, 0.5, 0.23, 1_000_000).unwrap();
        let eps = log_spaced_eps(1e-5, 0.99, 40);
        for f in [&pair.m0, &pair.m1] {
            assert!(
                verify_weak_lipschitz(f, 0.5, pair.l_tilde, 100_000)
                    .unwrap()
                    .passed
            );
            assert!(
                verify_margin(f, 0.5, pair.margin_q, &eps, 1_000_000)
                    .unwrap()
                    .passed
            );
        }
    }

    #[test]
    fn two_dimensional_checks() {
        let s = MeanFunction::sinusoid(0.3, 1.0, 0.5).unwrap();
        // gradient norm <= 2π * 0.3 / sqrt(2)
        let l = std::f64::consts::TAU * 0.3;
        assert!(
            verify_weak_lipschitz_in(&s, 0.5, l, 1_600, 2)
                .unwrap()
                .passed
        );
        assert!(
            !verify_weak_lipschitz_in(&s, 0.5, 0.05, 1_600, 2)
                .unwrap()
                .passed
        );
        let r = verify_margin_in(&s, 0.5, 100.0, &[0.01, 0.1], 10_000, 2).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn band_fraction_cases() {
        assert_eq!(band_fraction(0.0, 0.0, 0.1), 1.0);
        assert_eq!(band_fraction(0.5, 0.5, 0.1), 0.0);
        assert!((band_fraction(-1.0, 1.0, 0.5) - 0.5).abs() < 1e-15);
        assert!((band_fraction(0.0, 1.0, 0.25) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn bad_inputs() {
        let id = MeanFunction::identity();
        assert!(verify_weak_lipschitz(&id, 0.5, 1.0, 10).is_err());
        assert!(verify_margin(&id, 0.5, 1.0, &[1.5], 1000).is_err());
    }

    #[test]
    fn report_serializes() {
        let id = MeanFunction::identity();
        let r = verify_margin(&id, 0.7, 2.0, &[0.1, 0.2], 1_000).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["assumption"], "margin");
        assert_eq!(json["margin_points"].as_array().unwrap().len(), 2);
    }
}
