//! Regret accounting: total regret from true means, its exact split into a
//! discretization term and three learning terms, bin means, and diagnostics.

mod bins;
mod diagnostics;
mod regret;

pub use bins::{bin_mean, bin_means, compute_f_hat, BinMeanSource};
pub use diagnostics::{diagnostics, DiagnosticsReport};
pub use regret::{regret_decompose, regret_total, RegretDecomposition};
