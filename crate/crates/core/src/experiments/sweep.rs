use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::fit::{fit_exponent, ExponentFit, Summary};
use super::trial::{run_in_cell, Cell, TrialResult};
use crate::error::{FcabError, Result};
use crate::par::{map_indexed, Execution};
use crate::policies::PolicyId;

pub const CSV_HEADER: &str =
    "policy,N,T,K,p,regret_mean,regret_std,q10,q50,q90,r_disc,r_opt,r_subopt,r_boundary,wall_ms";

/// Aggregate of all replications of one policy at one `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub policy: PolicyId,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub p: f64,
    pub replications: usize,
    pub regret_mean: f64,
    /// Sample standard deviation; 0 for a single replication.
    pub regret_std: f64,
    pub q10: f64,
    pub q50: f64,
    pub q90: f64,
    pub r_disc: f64,
    pub r_fmab: f64,
    pub r_opt: f64,
    pub r_subopt: f64,
    pub r_boundary: f64,
    pub wall_ms: f64,
    pub below_guarantee: bool,
    /// Per-replication regret, in replication order.
    pub regrets: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub policy: PolicyId,
    #[serde(rename = "N")]
    pub n: usize,
    pub rep: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub alpha: Option<f64>,
    pub rows: Vec<SweepRow>,
    pub failures: Vec<CellFailure>,
}

/// Runs every (N, policy, replication) trial serially.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    run_sweep_with(config, Execution::Serial)
}

/// Runs every (N, policy, replication) trial under `exec`.
///
/// Each trial seeds itself from its coordinates, and results are reduced in a
/// fixed order, so the output does not depend on `exec`.
pub fn run_sweep_with(config: &ExperimentConfig, exec: Execution) -> Result<SweepResult> {
    config.validate()?;
    let cells: Vec<Result<Cell>> = config
        .n_grid
        .iter()
        .map(|&n| Cell::prepare(config, n))
        .collect();
    let pols = config.policies.len();
    let reps = config.replications;
    let per_n = pols * reps;

    let outcomes: Vec<Option<Result<TrialResult>>> = map_indexed(cells.len() * per_n, exec, |i| {
        let cell = cells[i / per_n].as_ref().ok()?;
        let policy = config.policies[(i % per_n) / reps];
        Some(run_in_cell(config, cell, policy, i % reps, false))
    });

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (ci, cell) in cells.iter().enumerate() {
        let n = config.n_grid[ci];
        for (pi, &policy) in config.policies.iter().enumerate() {
            if let Err(e) = cell {
                failures.push(CellFailure {
                    policy,
                    n,
                    rep: None,
                    message: e.to_string(),
                });
                continue;
            }
            let start = ci * per_n + pi * reps;
            let mut trials = Vec::with_capacity(reps);
            let mut failed = None;
            for (rep, outcome) in outcomes[start..start + reps].iter().enumerate() {
                match outcome {
                    Some(Ok(t)) => trials.push(t),
                    Some(Err(e)) => {
                        failed = Some((rep, e.to_string()));
                        break;
                    }
                    None => unreachable!("trial scheduled for a failed cell"),
                }
            }
            match failed {
                Some((rep, message)) => {
                    log::error!("{policy} at N = {n} failed at replication {rep}: {message}");
                    failures.push(CellFailure {
                        policy,
                        n,
                        rep: Some(rep),
                        message,
                    })
                }
                None => rows.push(aggregate(&trials)),
            }
        }
    }
    Ok(SweepResult {
        alpha: config.regime.alpha(),
        rows,
        failures,
    })
}

/// Every individual trial, ordered by N, then policy, then replication.
/// Fails on the first trial that errors.
pub fn run_trials(config: &ExperimentConfig, exec: Execution) -> Result<Vec<TrialResult>> {
    config.validate()?;
    let cells = config
        .n_grid
        .iter()
        .map(|&n| Cell::prepare(config, n))
        .collect::<Result<Vec<_>>>()?;
    let pols = config.policies.len();
    let reps = config.replications;
    let per_n = pols * reps;
    map_indexed(cells.len() * per_n, exec, |i| {
        let policy = config.policies[(i % per_n) / reps];
        run_in_cell(config, &cells[i / per_n], policy, i % reps, false)
    })
    .into_iter()
    .collect()
}

fn aggregate(trials: &[&TrialResult]) -> SweepRow {
    let first = trials[0];
    let count = trials.len() as f64;
    let mean_of =
        |f: &dyn Fn(&TrialResult) -> f64| trials.iter().map(|t| f(t)).sum::<f64>() / count;
    let regrets: Vec<f64> = trials.iter().map(|t| t.regret).collect();
    let regret_mean = regrets.iter().sum::<f64>() / count;
    let regret_std = if trials.len() > 1 {
        (regrets
            .iter()
            .map(|r| (r - regret_mean).powi(2))
            .sum::<f64>()
            / (count - 1.0))
            .sqrt()
    } else {
        0.0
    };
    let mut sorted = regrets.clone();
    sorted.sort_by(f64::total_cmp);
    SweepRow {
        policy: first.policy,
        n: first.n,
        t: first.t,
        k: first.k,
        p: first.p,
        replications: trials.len(),
        regret_mean,
        regret_std,
        q10: quantile(&sorted, 0.1),
        q50: quantile(&sorted, 0.5),
        q90: quantile(&sorted, 0.9),
        r_disc: mean_of(&|t| t.decomposition.r_disc),
        r_fmab: mean_of(&|t| t.decomposition.r_fmab),
        r_opt: mean_of(&|t| t.decomposition.r_opt),
        r_subopt: mean_of(&|t| t.decomposition.r_subopt),
        r_boundary: mean_of(&|t| t.decomposition.r_boundary),
        wall_ms: mean_of(&|t| t.wall_ms),
        below_guarantee: first.below_guarantee,
        regrets,
    }
}

/// Linearly interpolated quantile of sorted data.
pub(crate) fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl SweepResult {
    pub fn row(&self, policy: PolicyId, n: usize) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.policy == policy && r.n == n)
    }

    /// `(T, regret)` points of `policy`, ordered by `N`.
    pub fn regret_points(&self, policy: PolicyId, summary: Summary) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.policy == policy)
            .map(|r| {
                let y = match summary {
                    Summary::Mean => r.regret_mean,
                    Summary::Median => r.q50,
                };
                (r.t as f64, y)
            })
            .collect()
    }

    /// Log-log fit of regret against `T` for `policy`.
    pub fn exponent(&self, policy: PolicyId, summary: Summary) -> Result<ExponentFit> {
        fit_exponent(&self.regret_points(policy, summary))
    }

    /// The CSV table, floats with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{},{},{},{}", r.policy, r.n, r.t, r.k);
            for v in [
                r.p,
                r.regret_mean,
                r.regret_std,
                r.q10,
                r.q50,
                r.q90,
                r.r_disc,
                r.r_opt,
                r.r_subopt,
                r.r_boundary,
                r.wall_ms,
            ] {
                let _ = write!(out, ",{v:.16e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(self.to_csv().as_bytes())
            .map_err(|e| FcabError::Inconsistent(format!("writing CSV: {e}")))
    }
}
