use crate::environment::ArmSet;
use crate::error::{FcabError, Result};

/// `K^d` axis-aligned bins over `[0,1]^d` and the arms each one holds.
///
/// Along every axis, bin digit `j` (0-based) covers `[j/K, (j+1)/K)`, the last
/// one closed on the right. The bin index is the base-`K` number whose digits
/// are the per-axis digits, first coordinate most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    k: usize,
    dim: usize,
    bin_count: usize,
    assignment: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl Partition {
    pub fn build(arms: &ArmSet, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(FcabError::param("K", "must be at least 1"));
        }
        let dim = arms.dim();
        let bin_count = u32::try_from(dim)
            .ok()
            .and_then(|d| k.checked_pow(d))
            .filter(|&c| c <= u32::MAX as usize)
            .ok_or(FcabError::PartitionOverflow {
                bins: k,
                dim: dim as u32,
            })?;
        let mut members = vec![Vec::new(); bin_count];
        let assignment: Vec<usize> = arms
            .points()
            .enumerate()
            .map(|(i, x)| {
                let bin = x.iter().fold(0, |acc, &c| acc * k + axis_digit(c, k));
                members[bin].push(i);
                bin
            })
            .collect();
        Ok(Self {
            k,
            dim,
            bin_count,
            assignment,
            members,
        })
    }

    /// Bins per axis.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bin_count(&self) -> usize {
        self.bin_count
    }

    pub fn n_arms(&self) -> usize {
        self.assignment.len()
    }

    pub fn bin_of(&self, arm: usize) -> usize {
        self.assignment[arm]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Arm indices in `bin`, ascending.
    pub fn members(&self, bin: usize) -> &[usize] {
        &self.members[bin]
    }

    /// `N_k` for every bin.
    pub fn counts(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    /// Bins holding at least two arms, ascending: the UCBF alive set at start.
    pub fn initially_alive(&self) -> Vec<usize> {
        (0..self.bin_count)
            .filter(|&b| self.members[b].len() >= 2)
            .collect()
    }

    /// Number of arms reachable by UCBF.
    pub fn reachable_arms(&self) -> usize {
        self.members.iter().map(Vec::len).filter(|&c| c >= 2).sum()
    }

    /// Per-axis digits of `bin`, 0-based.
    pub fn digits(&self, bin: usize) -> Vec<usize> {
        let mut digits = vec![0; self.dim];
        let mut rest = bin;
        for d in digits.iter_mut().rev() {
            *d = rest % self.k;
            rest /= self.k;
        }
        digits
    }

    /// Lower and upper corners of `bin`.
    pub fn bounds(&self, bin: usize) -> (Vec<f64>, Vec<f64>) {
        let k = self.k as f64;
        self.digits(bin)
            .into_iter()
            .map(|j| (j as f64 / k, (j + 1) as f64 / k))
            .unzip()
    }
}

/// Axis digit of coordinate `x`, consistent with the floating-point edges `j / K`.
fn axis_digit(x: f64, k: usize) -> usize {
    let mut j = ((x * k as f64).floor().max(0.0) as usize).min(k - 1);
    if j + 1 < k && x >= (j + 1) as f64 / k as f64 {
        j += 1;
    } else if j > 0 && x < j as f64 / k as f64 {
        j -= 1;
    }
    j
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{grid_arms, sample_arms_uniform, ArmOrigin};

    fn one_d(xs: &[f64]) -> ArmSet {
        ArmSet::from_points(1, xs.to_vec(), ArmOrigin::UniformIid).unwrap()
    }

    #[test]
    fn half_open_intervals() {
        let p = Partition::build(&one_d(&[0.2, 1.0, 0.0, 0.3999999]), 5).unwrap();
        assert_eq!(p.bin_of(0), 1); // [0.2, 0.4)
        assert_eq!(p.bin_of(1), 4); // last interval is closed
        assert_eq!(p.bin_of(2), 0);
        assert_eq!(p.bin_of(3), 1);
        assert_eq!(p.bounds(1), (vec![0.2], vec![0.4]));
    }

    #[test]
    fn two_dimensional_digits() {
        let arms = ArmSet::from_points(2, vec![0.4, 0.9], ArmOrigin::UniformIid).unwrap();
        let p = Partition::build(&arms, 3).unwrap();
        assert_eq!(p.bin_count(), 9);
        let bin = p.bin_of(0);
        // 1-based digits (2, 3)
        assert_eq!(p.digits(bin), vec![1, 2]);
        assert_eq!(bin, 5);
    }

    #[test]
    fn counts_sum_and_consistency() {
        let arms = sample_arms_uniform(5000, 2, 4).unwrap();
        let p = Partition::build(&arms, 7).unwrap();
        assert_eq!(p.counts().iter().sum::<usize>(), 5000);
        for (i, x) in arms.points().enumerate() {
            let (lo, hi) = p.bounds(p.bin_of(i));
            for j in 0..2 {
                assert!(x[j] >= lo[j]);
                assert!(x[j] < hi[j] || (hi[j] == 1.0 && x[j] == 1.0));
            }
        }
    }

    #[test]
    fn grid_arm_on_an_edge_moves_up() {
        // arms i/60: 15/60 opens the second interval, 60/60 closes the last
        let p = Partition::build(&grid_arms(60).unwrap(), 4).unwrap();
        assert_eq!(p.counts(), vec![14, 15, 15, 16]);
        assert_eq!(p.initially_alive(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn overflow_and_zero_k() {
        let arms = sample_arms_uniform(3, 8, 0).unwrap();
        assert!(matches!(
            Partition::build(&arms, 1 << 10),
            Err(FcabError::PartitionOverflow { .. })
        ));
        assert!(Partition::build(&arms, 0).is_err());
    }

    #[test]
    fn sparse_bins_are_not_alive() {
        let p = Partition::build(&one_d(&[0.1, 0.15, 0.6, 0.95, 0.97]), 4).unwrap();
        assert_eq!(p.counts(), vec![2, 0, 1, 2]);
        assert_eq!(p.initially_alive(), vec![0, 3]);
        assert_eq!(p.reachable_arms(), 4);
    }
}
