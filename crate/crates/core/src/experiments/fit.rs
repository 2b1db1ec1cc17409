use serde::{Deserialize, Serialize};

use crate::error::{FcabError, Result};

/// Least-squares line through `(ln T, ln regret)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Per-`N` summary of the replications used as the regret point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Summary {
    #[default]
    Mean,
    Median,
}

pub fn fit_exponent(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(FcabError::param(
            "points",
            format!("need at least 3, got {}", points.len()),
        ));
    }
    if let Some(&(t, r)) = points.iter().find(|(t, r)| !(*t > 0.0 && *r > 0.0)) {
        return Err(FcabError::param(
            "points",
            format!("({t}, {r}) is not positive"),
        ));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(FcabError::param("points", "all T values coincide"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r2 = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    Ok(ExponentFit {
        slope,
        intercept,
        r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let pts: Vec<(f64, f64)> = [10.0f64, 100.0, 1000.0]
            .iter()
            .map(|&t| (t, t.cbrt()))
            .collect();
        let f = fit_exponent(&pts).unwrap();
        assert!((f.slope - 1.0 / 3.0).abs() < 1e-14);
        assert!(f.intercept.abs() < 1e-13);
        assert!((f.r2 - 1.0).abs() < 1e-14);

        let flat = fit_exponent(&[(10.0, 7.0), (100.0, 7.0), (1000.0, 7.0)]).unwrap();
        assert_eq!(flat.slope, 0.0);
    }

    #[test]
    fn rejects_bad_points() {
        assert!(fit_exponent(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_exponent(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
        assert!(fit_exponent(&[(5.0, 1.0), (5.0, 2.0), (5.0, 3.0)]).is_err());
    }
}
