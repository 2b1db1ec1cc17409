//! Mean-reward functions on the unit cube.
//!
//! Every kind evaluates into `[0, 1]`. The one-dimensional kinds that are
//! piecewise linear (explicit breakpoints, tabulated grids, the adversarial
//! lower-bound members and constants) expose their vertex representation so
//! thresholds and bin integrals can be computed exactly.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{FcabError, Result};

/// Shape of a mean-reward function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeanKind {
    /// Linear interpolation between `(breakpoints[i], values[i])`; breakpoints
    /// strictly increase from 0 to 1.
    PiecewiseLinear {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    /// `offset + amplitude * mean_j sin(2π (frequency * x_j + phase))`.
    Sinusoid {
        amplitude: f64,
        frequency: f64,
        offset: f64,
        #[serde(default)]
        phase: f64,
    },
    /// One of the two adversarial functions used for the lower bound.
    /// `role` is 0 or 1; `half_width` is the bump half-width around `1 - p`.
    LowerBoundMember {
        role: u8,
        p: f64,
        l_tilde: f64,
        half_width: f64,
    },
    /// Values on the uniform grid `j / (len - 1)`, linearly interpolated.
    Tabulated {
        values: Vec<f64>,
    },
    Constant {
        value: f64,
    },
}

/// A mean-reward function with its regularity metadata.
///
/// `lipschitz` and `margin` are the constants the function is declared to
/// satisfy (0 when undeclared); `analytic_m` overrides numerical threshold
/// computation when the threshold is known in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanFunction {
    #[serde(flatten)]
    pub kind: MeanKind,
    #[serde(default)]
    pub lipschitz: f64,
    #[serde(default)]
    pub margin: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analytic_m: Option<f64>,
}

impl MeanFunction {
    fn from_kind(kind: MeanKind) -> Result<Self> {
        let mut f = MeanFunction {
            kind,
            lipschitz: 0.0,
            margin: 0.0,
            analytic_m: None,
        };
        f.validate()?;
        f.lipschitz = f.natural_lipschitz();
        if let MeanKind::LowerBoundMember { .. } = f.kind {
            f.analytic_m = Some(0.5);
        }
        Ok(f)
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::from_kind(MeanKind::Constant { value })
    }

    /// `m(x) = x` on `[0, 1]`.
    pub fn identity() -> Self {
        Self::piecewise_linear(vec![0.0, 1.0], vec![0.0, 1.0]).expect("identity is valid")
    }

    pub fn piecewise_linear(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::from_kind(MeanKind::PiecewiseLinear {
            breakpoints,
            values,
        })
    }

    pub fn sinusoid(amplitude: f64, frequency: f64, offset: f64) -> Result<Self> {
        Self::sinusoid_with_phase(amplitude, frequency, offset, 0.0)
    }

    pub fn sinusoid_with_phase(
        amplitude: f64,
        frequency: f64,
        offset: f64,
        phase: f64,
    ) -> Result<Self> {
        Self::from_kind(MeanKind::Sinusoid {
            amplitude,
            frequency,
            offset,
            phase,
        })
    }

    pub fn tabulated(values: Vec<f64>) -> Result<Self> {
        Self::from_kind(MeanKind::Tabulated { values })
    }

    pub fn lower_bound_member(role: u8, p: f64, l_tilde: f64, half_width: f64) -> Result<Self> {
        Self::from_kind(MeanKind::LowerBoundMember {
            role,
            p,
            l_tilde,
            half_width,
        })
    }

    pub fn with_lipschitz(mut self, lipschitz: f64) -> Self {
        self.lipschitz = lipschitz;
        self
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    pub fn with_analytic_m(mut self, m: Option<f64>) -> Self {
        self.analytic_m = m;
        self
    }

    /// Validates and fills metadata derivable from the shape: an undeclared
    /// (zero) Lipschitz constant becomes the shape's own, and lower-bound
    /// members get their analytic threshold 1/2.
    pub fn normalized(mut self) -> Result<Self> {
        self.validate()?;
        if self.lipschitz == 0.0 {
            self.lipschitz = self.natural_lipschitz();
        }
        if let (MeanKind::LowerBoundMember { .. }, None) = (&self.kind, self.analytic_m) {
            self.analytic_m = Some(0.5);
        }
        Ok(self)
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            MeanKind::PiecewiseLinear { .. } => "piecewise_linear",
            MeanKind::Sinusoid { .. } => "sinusoid",
            MeanKind::LowerBoundMember { .. } => "lower_bound_member",
            MeanKind::Tabulated { .. } => "tabulated",
            MeanKind::Constant { .. } => "constant",
        }
    }

    /// Whether the function is defined on `[0,1]^dim`.
    pub fn supports_dim(&self, dim: usize) -> bool {
        match self.kind {
            MeanKind::Constant { .. } | MeanKind::Sinusoid { .. } => dim >= 1,
            _ => dim == 1,
        }
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.supports_dim(dim) {
            Ok(())
        } else {
            Err(FcabError::UnsupportedDimension {
                kind: self.kind_name(),
                dim,
            })
        }
    }

    /// Checks the structural invariants of the kind and the metadata ranges.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(FcabError::InvalidMeanFunction(msg));
        if !(self.lipschitz >= 0.0 && self.lipschitz.is_finite()) {
            return bad(format!(
                "lipschitz must be finite and >= 0, got {}",
                self.lipschitz
            ));
        }
        if !(self.margin >= 0.0 && self.margin.is_finite()) {
            return bad(format!(
                "margin must be finite and >= 0, got {}",
                self.margin
            ));
        }
        if let Some(m) = self.analytic_m {
            if !(0.0..=1.0).contains(&m) {
                return bad(format!("analytic_m must lie in [0,1], got {m}"));
            }
        }
        match &self.kind {
            MeanKind::PiecewiseLinear {
                breakpoints,
                values,
            } => {
                if breakpoints.len() < 2 || breakpoints.len() != values.len() {
                    return bad(format!(
                        "need at least two breakpoints with matching values ({} vs {})",
                        breakpoints.len(),
                        values.len()
                    ));
                }
                if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
                    return bad("breakpoints must span [0, 1]".into());
                }
                if breakpoints
                    .windows(2)
                    .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
                {
                    return bad("breakpoints must be strictly increasing".into());
                }
                if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
                    return bad("values must lie in [0, 1]".into());
                }
            }
            MeanKind::Sinusoid {
                amplitude,
                frequency,
                offset,
                phase,
            } => {
                if ![amplitude, frequency, offset, phase]
                    .iter()
                    .all(|v| v.is_finite())
                {
                    return bad("sinusoid parameters must be finite".into());
                }
                let lo = offset - amplitude.abs();
                let hi = offset + amplitude.abs();
                if lo < 0.0 || hi > 1.0 {
                    return bad(format!("sinusoid range [{lo}, {hi}] leaves [0, 1]"));
                }
            }
            MeanKind::LowerBoundMember {
                role,
                p,
                l_tilde,
                half_width,
            } => {
                if *role > 1 {
                    return bad(format!("role must be 0 or 1, got {role}"));
                }
                if !(*p > 0.0 && *p < 1.0) {
                    return bad(format!("p must lie in (0,1), got {p}"));
                }
                if !(*l_tilde > 0.0 && *l_tilde <= 0.5) {
                    return bad(format!("l_tilde must lie in (0, 0.5], got {l_tilde}"));
                }
                if !(*half_width > 0.0 && 2.0 * half_width < p.min(1.0 - p)) {
                    return bad(format!(
                        "half_width {half_width} must satisfy 0 < 2 * half_width < min(p, 1-p)"
                    ));
                }
            }
            MeanKind::Tabulated { values } => {
                if values.len() < 2 {
                    return bad("tabulated function needs at least two values".into());
                }
                if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
                    return bad("values must lie in [0, 1]".into());
                }
            }
            MeanKind::Constant { value } => {
                if !(0.0..=1.0).contains(value) {
                    return bad(format!("constant {value} outside [0, 1]"));
                }
            }
        }
        Ok(())
    }

    /// Lipschitz constant implied by the shape itself.
    fn natural_lipschitz(&self) -> f64 {
        match &self.kind {
            MeanKind::Sinusoid {
                amplitude,
                frequency,
                ..
            } => TAU * (amplitude * frequency).abs(),
            MeanKind::LowerBoundMember { l_tilde, .. } => *l_tilde,
            MeanKind::Constant { .. } => 0.0,
            _ => {
                let (bp, vals) = self.piecewise_linear_form().expect("piecewise kind");
                bp.windows(2)
                    .zip(vals.windows(2))
                    .map(|(x, y)| ((y[1] - y[0]) / (x[1] - x[0])).abs())
                    .fold(0.0, f64::max)
            }
        }
    }

    /// Vertex representation for the one-dimensional piecewise-linear kinds.
    pub fn piecewise_linear_form(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match &self.kind {
            MeanKind::PiecewiseLinear {
                breakpoints,
                values,
            } => Some((breakpoints.clone(), values.clone())),
            MeanKind::Tabulated { values } => {
                let last = (values.len() - 1) as f64;
                let bp = (0..values.len()).map(|j| j as f64 / last).collect();
                Some((bp, values.clone()))
            }
            MeanKind::Constant { value } => Some((vec![0.0, 1.0], vec![*value, *value])),
            MeanKind::LowerBoundMember {
                role,
                p,
                l_tilde,
                half_width,
            } => {
                let (w, l) = (*half_width, *l_tilde);
                let c = 1.0 - p;
                let (x0, x1) = (c - 2.0 * w, c + 2.0 * w);
                let s = if *role == 0 { 1.0 } else { -1.0 };
                let bp = vec![0.0, x0, x0 + w, c, c + w, x1, 1.0];
                let vals = vec![
                    0.5 - l * x0,
                    0.5,
                    0.5 - s * l * w,
                    0.5,
                    0.5 + s * l * w,
                    0.5,
                    0.5 + l * (1.0 - x1),
                ];
                Some((bp, vals))
            }
            MeanKind::Sinusoid { .. } => None,
        }
    }

    /// Evaluates the function, checking that `x` lies in the unit cube.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        if x.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(FcabError::OutsideUnitCube { point: x.to_vec() });
        }
        Ok(self.eval_unchecked(x))
    }

    /// Evaluation without domain checks; callers guarantee `x` is in the cube
    /// and of a supported dimension.
    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        match &self.kind {
            MeanKind::Constant { value } => *value,
            MeanKind::Sinusoid {
                amplitude,
                frequency,
                offset,
                phase,
            } => {
                let s: f64 = x
                    .iter()
                    .map(|&xj| (TAU * (frequency * xj + phase)).sin())
                    .sum();
                (offset + amplitude * s / x.len() as f64).clamp(0.0, 1.0)
            }
            MeanKind::LowerBoundMember {
                role,
                p,
                l_tilde,
                half_width,
            } => lower_bound_value(*role, *p, *l_tilde, *half_width, x[0]),
            MeanKind::PiecewiseLinear {
                breakpoints,
                values,
            } => interpolate(breakpoints, values, x[0]),
            MeanKind::Tabulated { values } => {
                let last = values.len() - 1;
                let pos = x[0] * last as f64;
                let j = (pos.floor() as usize).min(last - 1);
                let frac = pos - j as f64;
                values[j] + frac * (values[j + 1] - values[j])
            }
        }
    }

    /// Average of the function over the box `prod_j [lo_j, hi_j]`, in closed form.
    pub fn box_average(&self, lo: &[f64], hi: &[f64]) -> Result<f64> {
        self.check_dim(lo.len())?;
        if lo.len() != hi.len() {
            return Err(FcabError::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo
            .iter()
            .zip(hi)
            .any(|(a, b)| !(0.0 <= *a && a < b && *b <= 1.0))
        {
            return Err(FcabError::Inconsistent(format!(
                "box {lo:?}..{hi:?} is not a non-degenerate sub-box of the unit cube"
            )));
        }
        Ok(match &self.kind {
            MeanKind::Constant { value } => *value,
            MeanKind::Sinusoid {
                amplitude,
                frequency,
                offset,
                phase,
            } => {
                let s: f64 = lo
                    .iter()
                    .zip(hi)
                    .map(|(&a, &b)| sin_average(*frequency, *phase, a, b))
                    .sum();
                offset + amplitude * s / lo.len() as f64
            }
            _ => {
                let (bp, vals) = self.piecewise_linear_form().expect("piecewise kind");
                piecewise_integral(&bp, &vals, lo[0], hi[0]) / (hi[0] - lo[0])
            }
        })
    }
}

fn lower_bound_value(role: u8, p: f64, l: f64, w: f64, x: f64) -> f64 {
    let c = 1.0 - p;
    let x0 = c - 2.0 * w;
    let x1 = c + 2.0 * w;
    // Outer branches are shared; the four inner ones flip sign with the role.
    let s = if role == 0 { 1.0 } else { -1.0 };
    if x < x0 {
        0.5 - l * (x0 - x)
    } else if x < x0 + w {
        0.5 - s * l * (x - x0)
    } else if x < c {
        0.5 - s * l * (c - x)
    } else if x < c + w {
        0.5 + s * l * (x - c)
    } else if x < x1 {
        0.5 + s * l * (x1 - x)
    } else {
        0.5 + l * (x - x1)
    }
}

fn interpolate(bp: &[f64], vals: &[f64], x: f64) -> f64 {
    let j = bp.partition_point(|&b| b <= x).clamp(1, bp.len() - 1);
    let (x0, x1) = (bp[j - 1], bp[j]);
    let t = (x - x0) / (x1 - x0);
    vals[j - 1] + t * (vals[j] - vals[j - 1])
}

/// Exact integral of the piecewise-linear interpolant over `[a, b]`.
pub(crate) fn piecewise_integral(bp: &[f64], vals: &[f64], a: f64, b: f64) -> f64 {
    let mut total = 0.0;
    for j in 1..bp.len() {
        let lo = bp[j - 1].max(a);
        let hi = bp[j].min(b);
        if hi <= lo {
            continue;
        }
        let slope = (vals[j] - vals[j - 1]) / (bp[j] - bp[j - 1]);
        let at = |x: f64| vals[j - 1] + slope * (x - bp[j - 1]);
        total += 0.5 * (at(lo) + at(hi)) * (hi - lo);
    }
    total
}

fn sin_average(frequency: f64, phase: f64, a: f64, b: f64) -> f64 {
    if frequency == 0.0 {
        return (TAU * phase).sin();
    }
    let w = TAU * frequency;
    ((TAU * phase + w * a).cos() - (TAU * phase + w * b).cos()) / (w * (b - a))
}
