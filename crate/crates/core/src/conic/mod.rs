//! Small dense conic solver over products of free, nonnegative, zero and
//! PSD cones.

mod ipm;
mod program;

use thiserror::Error;

pub use program::{
    cone_violation, residuals, ConeBlock, ConeKind, ConeProgram, ConeSolution, LinearRow, Residuals,
    SolveStatus, SolverSettings,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConicError {
    #[error("invalid cone program: {0}")]
    InvalidProgram(String),
    #[error("invalid solver settings: {0}")]
    InvalidSettings(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// Solve `prog` to the relative accuracy in `settings`.
///
/// Iteration-limit and numerical-failure outcomes are reported through
/// [`ConeSolution::status`]; `Err` is reserved for malformed input.
pub fn solve(prog: &ConeProgram, settings: &SolverSettings) -> Result<ConeSolution, ConicError> {
    ipm::solve(prog, settings)
}

#[cfg(test)]
mod tests;
