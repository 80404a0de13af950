//! Universal learning rates of empirical risk minimization, made executable on
//! finite truncations: combinatorial dimensions, adversarial distributions,
//! simulated learning curves, and checks of explicit finite-n bounds.

pub mod classcat;
pub mod dims;
pub mod distros;
pub mod erm;
pub mod curves;
