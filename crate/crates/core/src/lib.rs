//! Semidefinite relaxations and bounds for maximizing a quadratic form over
//! the l1 ball, the unit sphere intersected with an l1 ball, and lp balls
//! with `1 < p < 2`.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense symmetric matrices, Jacobi eigensolver, PSD projection,
//!   `svec`/`smat`.
//! * [`conic`]: a small interior-point solver for programs over products of
//!   nonnegative and PSD cones.
//! * [`relax`]: builders for the doubly nonnegative relaxations, closed-form
//!   bounds and the complementarity repair.
//! * [`oracle`]: exact and heuristic lower bounds used to validate the
//!   relaxations.
//! * [`report`]: bound comparison, reference instances, and the p sweep used
//!   by the command-line tool.

pub mod conic;
pub mod instances;
pub mod linalg;
pub mod matrix_file;
pub mod oracle;
pub mod relax;
pub mod report;
pub mod rng;

pub use linalg::SymMat;
