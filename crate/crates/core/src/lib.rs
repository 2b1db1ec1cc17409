//! Simulation laboratory for the finite continuum-armed bandit: `N` one-shot
//! arms with covariates in `[0,1]^d`, a budget of `T` pulls, and the UCBF
//! family of bin-based upper-confidence policies.

pub mod analysis;
pub mod environment;
pub mod error;
pub mod experiments;
pub mod par;
pub mod policies;

pub use error::{FcabError, Result};

/// Random stream used for every sampling operation.
pub type SimRng = rand_chacha::ChaCha8Rng;
