//! Doubly nonnegative relaxations of quadratic maximization over l1-type
//! sets, plus the closed-form bounds that compete with them.
//!
//! All lifted formulations work with `Y in S^{2n}` where `x = A y`,
//! `A = [I, -I]`, and `Q~ = A^T Q A = [[Q, -Q], [-Q, Q]]`.

mod bounds;
mod build;
mod lift;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::conic::{self, ConeSolution, ConicError, SolveStatus, SolverSettings};
use crate::linalg::{LinalgError, SymMat};

pub use bounds::{bound_b1, bound_b1_from, bound_b2, certify_new_eq, holder_factor, NewEqCertificate};
pub use build::{build, BuiltRelaxation};
pub use lift::{extract_x, lift_qtilde, repair_complementarity, splitting_matrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RelaxError {
    #[error("k = {k} is outside [1, n] = [1, {n}]")]
    KOutOfRange { k: f64, n: usize },
    #[error("p = {0} must satisfy 1 < p < 2")]
    POutOfRange(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("matrix error: {0}")]
    Linalg(#[from] LinalgError),
    #[error("solver error: {0}")]
    Conic(#[from] ConicError),
    #[error("solver hit a numerical failure on {0}")]
    NumericalFailure(RelaxationKind),
}

/// The seven formulations, with their parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "tag", rename_all = "kebab-case")]
pub enum RelaxationKind {
    /// `max Q~.Y  s.t. e^T Y e = 1, Y >= 0, Y psd`
    DnnL1,
    /// `max Q~.Y  s.t. e^T Y e <= 1, Y_{i,n+i} = 0, Y >= 0, Y psd`
    DnnL1New,
    /// `max Q.X  s.t. tr X = 1, e^T |X| e <= k, X psd`
    SdpX { k: f64 },
    /// `max k Q~.Y  s.t. k tr(A^T A Y) = 1, e^T Y e = 1, Y >= 0, Y psd`
    DnnL2L1 { k: f64 },
    /// `max k Q~.Y  s.t. k tr(A^T A Y) = 1, e^T Y e <= 1, Y_{i,n+i} = 0, Y >= 0, Y psd`
    DnnL2L1NewLe { k: f64 },
    /// `max k Q~.Y  s.t. k tr Y = 1, e^T Y e = 1, Y_{i,n+i} = 0, Y >= 0, Y psd`
    DnnL2L1NewEq { k: f64 },
    /// `max c Q~.Y  s.t. c tr Y <= 1, e^T Y e <= 1, Y_{i,n+i} = 0, Y >= 0, Y psd`,
    /// with `c = n^{2(p-1)/p}`
    DnnLp { p: f64 },
}

impl RelaxationKind {
    pub const NAMES: [&'static str; 7] = [
        "dnn-l1",
        "dnn-l1-new",
        "sdp-x",
        "dnn-l2l1",
        "dnn-l2l1-new-le",
        "dnn-l2l1-new-eq",
        "dnn-lp",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RelaxationKind::DnnL1 => "dnn-l1",
            RelaxationKind::DnnL1New => "dnn-l1-new",
            RelaxationKind::SdpX { .. } => "sdp-x",
            RelaxationKind::DnnL2L1 { .. } => "dnn-l2l1",
            RelaxationKind::DnnL2L1NewLe { .. } => "dnn-l2l1-new-le",
            RelaxationKind::DnnL2L1NewEq { .. } => "dnn-l2l1-new-eq",
            RelaxationKind::DnnLp { .. } => "dnn-lp",
        }
    }

    pub fn k(&self) -> Option<f64> {
        match *self {
            RelaxationKind::SdpX { k }
            | RelaxationKind::DnnL2L1 { k }
            | RelaxationKind::DnnL2L1NewLe { k }
            | RelaxationKind::DnnL2L1NewEq { k } => Some(k),
            _ => None,
        }
    }

    pub fn p(&self) -> Option<f64> {
        match *self {
            RelaxationKind::DnnLp { p } => Some(p),
            _ => None,
        }
    }

    /// Build a kind from its name and optional parameters.
    pub fn from_name(name: &str, k: Option<f64>, p: Option<f64>) -> Result<Self, KindParseError> {
        let need_k = |k: Option<f64>| k.ok_or(KindParseError::MissingParameter { name: name.to_string(), param: "k" });
        match name {
            "dnn-l1" => Ok(RelaxationKind::DnnL1),
            "dnn-l1-new" => Ok(RelaxationKind::DnnL1New),
            "sdp-x" => Ok(RelaxationKind::SdpX { k: need_k(k)? }),
            "dnn-l2l1" => Ok(RelaxationKind::DnnL2L1 { k: need_k(k)? }),
            "dnn-l2l1-new-le" => Ok(RelaxationKind::DnnL2L1NewLe { k: need_k(k)? }),
            "dnn-l2l1-new-eq" => Ok(RelaxationKind::DnnL2L1NewEq { k: need_k(k)? }),
            "dnn-lp" => Ok(RelaxationKind::DnnLp {
                p: p.ok_or(KindParseError::MissingParameter { name: name.to_string(), param: "p" })?,
            }),
            other => Err(KindParseError::Unknown(other.to_string())),
        }
    }

    /// Check parameter ranges against the problem dimension.
    pub fn validate(&self, n: usize) -> Result<(), RelaxError> {
        if let Some(k) = self.k() {
            if !(k >= 1.0 && k <= n as f64) {
                return Err(RelaxError::KOutOfRange { k, n });
            }
        }
        if let Some(p) = self.p() {
            if !(p > 1.0 && p < 2.0) {
                return Err(RelaxError::POutOfRange(p));
            }
        }
        Ok(())
    }
}

impl fmt::Display for RelaxationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.k(), self.p()) {
            (Some(k), _) => write!(f, "{}(k={k})", self.name()),
            (_, Some(p)) => write!(f, "{}(p={p})", self.name()),
            _ => f.write_str(self.name()),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KindParseError {
    #[error("unknown relaxation '{0}' (expected one of: {names})", names = RelaxationKind::NAMES.join(", "))]
    Unknown(String),
    #[error("relaxation '{name}' requires --{param}")]
    MissingParameter { name: String, param: &'static str },
}

impl FromStr for RelaxationKind {
    type Err = KindParseError;

    /// Parses parameter-free names only; use [`RelaxationKind::from_name`]
    /// for the parameterized ones.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_name(s, None, None)
    }
}

/// A solved relaxation.
#[derive(Debug, Clone)]
pub struct RelaxationSolution {
    pub kind: RelaxationKind,
    pub value: f64,
    /// `Y` (order `2n`) or, for [`RelaxationKind::SdpX`], `X` (order `n`).
    pub matrix: SymMat,
    pub solution: ConeSolution,
    pub elapsed: Duration,
}

impl RelaxationSolution {
    pub fn is_optimal(&self) -> bool {
        self.solution.status == SolveStatus::Optimal
    }
}

/// Build and solve one relaxation. Iteration-limit outcomes are returned
/// (check [`RelaxationSolution::is_optimal`]); numerical failures are errors.
pub fn solve_relaxation(
    kind: RelaxationKind,
    q: &SymMat,
    settings: &SolverSettings,
) -> Result<RelaxationSolution, RelaxError> {
    let start = Instant::now();
    let built = build(kind, q)?;
    let solution = conic::solve(&built.program, settings)?;
    if solution.status == SolveStatus::NumericalFailure {
        return Err(RelaxError::NumericalFailure(kind));
    }
    let matrix = built.decode(&solution.x)?;
    Ok(RelaxationSolution {
        kind,
        value: solution.objective,
        matrix,
        solution,
        elapsed: start.elapsed(),
    })
}
