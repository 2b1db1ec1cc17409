use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{FcabError, Result};
use crate::SimRng;

/// How the covariates of an [`ArmSet`] were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArmOrigin {
    UniformIid,
    Grid,
}

/// Covariates of the `N` arms, stored row-major (`dim` coordinates per arm).
#[derive(Debug, Clone, PartialEq)]
pub struct ArmSet {
    dim: usize,
    coords: Vec<f64>,
    origin: ArmOrigin,
}

impl ArmSet {
    /// Builds an arm set from explicit covariates. Every coordinate must lie in `[0, 1]`.
    pub fn from_points(dim: usize, coords: Vec<f64>, origin: ArmOrigin) -> Result<Self> {
        if dim == 0 {
            return Err(FcabError::param("dim", "must be at least 1"));
        }
        if coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(FcabError::param(
                "coords",
                format!(
                    "length {} is not a positive multiple of {dim}",
                    coords.len()
                ),
            ));
        }
        if let Some(chunk) = coords
            .chunks_exact(dim)
            .find(|c| c.iter().any(|v| !(0.0..=1.0).contains(v)))
        {
            return Err(FcabError::OutsideUnitCube {
                point: chunk.to_vec(),
            });
        }
        Ok(Self {
            dim,
            coords,
            origin,
        })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn origin(&self) -> ArmOrigin {
        self.origin
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }
}

/// `n` covariates drawn i.i.d. uniformly on `[0,1]^dim`; a pure function of the seed.
pub fn sample_arms_uniform(n: usize, dim: usize, seed: u64) -> Result<ArmSet> {
    if n == 0 {
        return Err(FcabError::param("n", "at least one arm is required"));
    }
    if dim == 0 {
        return Err(FcabError::param("dim", "must be at least 1"));
    }
    let mut rng = SimRng::seed_from_u64(seed);
    let coords = (0..n * dim).map(|_| rng.random::<f64>()).collect();
    Ok(ArmSet {
        dim,
        coords,
        origin: ArmOrigin::UniformIid,
    })
}

/// Deterministic one-dimensional covariates `i / n` for `i = 1..=n`.
pub fn grid_arms(n: usize) -> Result<ArmSet> {
    if n == 0 {
        return Err(FcabError::param("n", "at least one arm is required"));
    }
    let coords = (1..=n).map(|i| i as f64 / n as f64).collect();
    Ok(ArmSet {
        dim: 1,
        coords,
        origin: ArmOrigin::Grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_sets_rejected() {
        assert!(sample_arms_uniform(0, 1, 1).is_err());
        assert!(grid_arms(0).is_err());
        assert!(sample_arms_uniform(3, 0, 1).is_err());
    }

    #[test]
    fn grid_formula() {
        let arms = grid_arms(4).unwrap();
        let xs: Vec<f64> = arms.points().map(|p| p[0]).collect();
        assert_eq!(xs, vec![0.25, 0.5, 0.75, 1.0]);
        assert_eq!(grid_arms(1).unwrap().point(0), &[1.0]);

        let ten = grid_arms(10).unwrap();
        assert_eq!(ten.len(), 10);
        assert_eq!(ten.point(9), &[1.0]);
        for i in 1..10 {
            let gap = ten.point(i)[0] - ten.point(i - 1)[0];
            assert!((gap - 0.1).abs() < 1e-15);
        }
    }

    #[test]
    fn uniform_is_deterministic_and_centered() {
        let a = sample_arms_uniform(1000, 2, 9).unwrap();
        let b = sample_arms_uniform(1000, 2, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_arms_uniform(1000, 2, 10).unwrap());

        // 3 sigma / sqrt(n) with sigma^2 = 1/12 gives 0.000866 < 0.002
        let big = sample_arms_uniform(1_000_000, 1, 42).unwrap();
        let mean = big.points().map(|p| p[0]).sum::<f64>() / big.len() as f64;
        assert!((mean - 0.5).abs() < 0.002, "mean {mean}");
    }

    #[test]
    fn from_points_checks_cube() {
        assert!(ArmSet::from_points(1, vec![0.2, 1.2], ArmOrigin::UniformIid).is_err());
        assert!(ArmSet::from_points(2, vec![0.2, 0.3, 0.4], ArmOrigin::UniformIid).is_err());
        let ok = ArmSet::from_points(2, vec![0.4, 0.9], ArmOrigin::UniformIid).unwrap();
        assert_eq!(ok.len(), 1);
    }
}
