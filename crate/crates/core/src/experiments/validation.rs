use serde::{Deserialize, Serialize};

use super::config::SCHEMA_VERSION;
use crate::environment::{
    log_spaced_eps, make_lower_bound_pair, threshold, verify_margin_in, verify_weak_lipschitz_in,
    MeanFunction, ValidationReport, DEFAULT_RESOLUTION,
};
use crate::error::{FcabError, Result};

/// A function, with its budget fraction, whose assumptions should be checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ValidationTarget {
    /// Both members of the lower-bound pair, checked with `L̃` and `Q = 6 max(1/L, 2)`.
    LowerBoundPair {
        #[serde(rename = "N")]
        n: usize,
        p: f64,
        lipschitz: f64,
        #[serde(default = "default_alpha")]
        alpha_lb: f64,
    },
    /// A function checked with its own `lipschitz` and `margin` constants.
    Function {
        mean_function: MeanFunction,
        p: f64,
        #[serde(default = "default_dim")]
        dim: usize,
    },
}

fn default_alpha() -> f64 {
    0.23
}

fn default_dim() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationConfig {
    pub schema: u32,
    pub targets: Vec<ValidationTarget>,
    #[serde(default = "default_lipschitz_grid")]
    pub lipschitz_grid: usize,
    #[serde(default = "default_margin_grid")]
    pub margin_grid: usize,
    #[serde(default = "default_eps_min")]
    pub eps_min: f64,
    #[serde(default = "default_eps_max")]
    pub eps_max: f64,
    #[serde(default = "default_eps_count")]
    pub eps_count: usize,
}

fn default_lipschitz_grid() -> usize {
    100_000
}

fn default_margin_grid() -> usize {
    1_000_000
}

fn default_eps_min() -> f64 {
    1e-5
}

fn default_eps_max() -> f64 {
    0.5
}

fn default_eps_count() -> usize {
    40
}

impl ValidationConfig {
    pub fn new(targets: Vec<ValidationTarget>) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            targets,
            lipschitz_grid: default_lipschitz_grid(),
            margin_grid: default_margin_grid(),
            eps_min: default_eps_min(),
            eps_max: default_eps_max(),
            eps_count: default_eps_count(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(FcabError::param(
                "schema",
                format!("unsupported version {}", self.schema),
            ));
        }
        if self.targets.is_empty() {
            return Err(FcabError::param(
                "targets",
                "at least one target is required",
            ));
        }
        if !(self.eps_min > 0.0 && self.eps_min <= self.eps_max && self.eps_max < 1.0) {
            return Err(FcabError::param("eps", "need 0 < eps_min <= eps_max < 1"));
        }
        if self.eps_count == 0 {
            return Err(FcabError::param("eps_count", "must be at least 1"));
        }
        if self.lipschitz_grid < 1_000 || self.margin_grid < 1_000 {
            return Err(FcabError::param(
                "grid",
                "lipschitz_grid and margin_grid must be at least 1000",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationEntry {
    pub label: String,
    pub report: ValidationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub passed: bool,
    pub entries: Vec<ValidationEntry>,
}

/// Checks the weak-Lipschitz and margin conditions for every target.
pub fn run_validation(config: &ValidationConfig) -> Result<ValidationSummary> {
    config.validate()?;
    let eps = log_spaced_eps(config.eps_min, config.eps_max, config.eps_count);
    let mut entries = Vec::new();
    for target in &config.targets {
        match target {
            ValidationTarget::LowerBoundPair {
                n,
                p,
                lipschitz,
                alpha_lb,
            } => {
                let pair = make_lower_bound_pair(*p, *lipschitz, *alpha_lb, *n)?;
                for role in [0u8, 1] {
                    let f = pair.member(role);
                    let label = format!("lower_bound_pair(N={n}, p={p}, L={lipschitz}).m{role}");
                    entries.push(ValidationEntry {
                        label: label.clone(),
                        report: verify_weak_lipschitz_in(
                            f,
                            0.5,
                            pair.l_tilde,
                            config.lipschitz_grid,
                            1,
                        )?,
                    });
                    entries.push(ValidationEntry {
                        label,
                        report: verify_margin_in(
                            f,
                            0.5,
                            pair.margin_q,
                            &eps,
                            config.margin_grid,
                            1,
                        )?,
                    });
                }
            }
            ValidationTarget::Function {
                mean_function,
                p,
                dim,
            } => {
                let f = mean_function.clone().normalized()?;
                if f.margin <= 0.0 {
                    return Err(FcabError::param(
                        "margin",
                        "function targets need a positive margin constant",
                    ));
                }
                let m = threshold(&f, *p, DEFAULT_RESOLUTION, *dim)?.value;
                let label = format!("{}(p={p}, d={dim})", f.kind_name());
                entries.push(ValidationEntry {
                    label: label.clone(),
                    report: verify_weak_lipschitz_in(
                        &f,
                        m,
                        f.lipschitz,
                        config.lipschitz_grid,
                        *dim,
                    )?,
                });
                entries.push(ValidationEntry {
                    label,
                    report: verify_margin_in(&f, m, f.margin, &eps, config.margin_grid, *dim)?,
                });
            }
        }
    }
    Ok(ValidationSummary {
        passed: entries.iter().all(|e| e.report.passed),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_passes() {
        let mut c = ValidationConfig::new(vec![ValidationTarget::LowerBoundPair {
            n: 100_000,
            p: 0.3,
            lipschitz: 1.0,
            alpha_lb: 0.23,
        }]);
        c.margin_grid = 100_000;
        let s = run_validation(&c).unwrap();
        assert_eq!(s.entries.len(), 4);
        assert!(s.passed, "{s:#?}");
    }

    #[test]
    fn identity_with_too_small_margin_fails() {
        let f = MeanFunction::identity().with_margin(1.0);
        let mut c = ValidationConfig::new(vec![ValidationTarget::Function {
            mean_function: f,
            p: 0.3,
            dim: 1,
        }]);
        c.margin_grid = 10_000;
        c.lipschitz_grid = 1_000;
        c.eps_min = 0.1;
        c.eps_max = 0.1;
        let s = run_validation(&c).unwrap();
        assert!(!s.passed);
        assert!(s.entries[0].report.passed);
    }
}
