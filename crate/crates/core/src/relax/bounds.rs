use serde::Serialize;

use super::{solve_relaxation, RelaxError, RelaxationKind};
use crate::conic::SolverSettings;
use crate::linalg::{eig_sym, lambda_max, SymMat};

/// `n^{2(p-1)/p}`: squared Hölder constant between the l1 and lp norms.
pub fn holder_factor(n: usize, p: f64) -> f64 {
    (n as f64).powf(2.0 * (p - 1.0) / p)
}

/// Eigenvalue bound `max{lambda_max(Q), 0}` over the unit l2 ball.
pub fn bound_b2(q: &SymMat) -> Result<f64, RelaxError> {
    Ok(lambda_max(q)?.max(0.0))
}

/// Hölder bound `n^{2(p-1)/p} v(DNN_L1)` for the lp ball.
pub fn bound_b1(q: &SymMat, p: f64, settings: &SolverSettings) -> Result<f64, RelaxError> {
    RelaxationKind::DnnLp { p }.validate(q.order())?;
    let dnn = solve_relaxation(RelaxationKind::DnnL1, q, settings)?;
    Ok(bound_b1_from(dnn.value, q.order(), p))
}

/// [`bound_b1`] from an already computed `v(DNN_L1)`.
pub fn bound_b1_from(dnn_l1_value: f64, n: usize, p: f64) -> f64 {
    holder_factor(n, p) * dnn_l1_value
}

/// Whether the equality-form lifted relaxation is a valid upper bound for
/// the sparse-PCA problem at this `k`.
///
/// The bound holds whenever the optimum over `{||x||_2 = 1, ||x||_1^2 <= k}`
/// stays strictly below `lambda_max(Q)`. Two checkable sufficient conditions
/// are tried: `v(DNN_L2L1) < lambda_max`, and for a simple top eigenvalue,
/// `||v||_1 > sqrt(k)` for its unit eigenvector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NewEqCertificate {
    pub lambda_max: f64,
    pub dnn_l2l1_below_lambda: bool,
    /// `None` when the top eigenvalue is not simple.
    pub eigenvector_l1: Option<f64>,
    pub eigenvector_condition: Option<bool>,
    pub certified: bool,
}

/// `margin` is the amount by which `v(DNN_L2L1)` must undercut
/// `lambda_max` to count as strictly below it.
pub fn certify_new_eq(q: &SymMat, k: f64, dnn_l2l1_value: f64, margin: f64) -> Result<NewEqCertificate, RelaxError> {
    let eig = eig_sym(q)?;
    let lmax = eig.values[0];
    let below = dnn_l2l1_value < lmax - margin;
    let simple = eig.values.len() == 1 || eig.values[0] - eig.values[1] > 1e-8 * (1.0 + lmax.abs());
    let (l1, cond) = if simple {
        let l1: f64 = eig.vector(0).iter().map(|v| v.abs()).sum();
        (Some(l1), Some(l1 > k.sqrt() + 1e-9))
    } else {
        (None, None)
    };
    Ok(NewEqCertificate {
        lambda_max: lmax,
        dnn_l2l1_below_lambda: below,
        eigenvector_l1: l1,
        eigenvector_condition: cond,
        certified: below || cond == Some(true),
    })
}
