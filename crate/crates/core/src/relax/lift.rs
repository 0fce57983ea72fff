use super::RelaxError;
use crate::linalg::{Matrix, SymMat};

/// `Q~ = [[Q, -Q], [-Q, Q]]`.
pub fn lift_qtilde(q: &SymMat) -> SymMat {
    let n = q.order();
    SymMat::from_fn(2 * n, |a, b| {
        let sign = if (a < n) == (b < n) { 1.0 } else { -1.0 };
        sign * q.get(a % n, b % n)
    })
}

/// The `n x 2n` map `A = [I, -I]` taking the split vector `y` to `x`.
pub fn splitting_matrix(n: usize) -> Matrix {
    let mut a = Matrix::zeros(n, 2 * n);
    for i in 0..n {
        a.set(i, i, 1.0);
        a.set(i, n + i, -1.0);
    }
    a
}

/// `k A Y A^T`, the `x`-space matrix of a lifted `Y`.
pub fn extract_x(y: &SymMat, k: f64) -> Result<SymMat, RelaxError> {
    let d = y.order();
    if d % 2 != 0 {
        return Err(RelaxError::Precondition(format!("Y must have even order, got {d}")));
    }
    let n = d / 2;
    Ok(SymMat::from_fn(n, |i, j| {
        k * (y.get(i, j) - y.get(i, n + j) - y.get(n + i, j) + y.get(n + i, n + j))
    }))
}

/// Zero out every `Y_{i,n+i}` by adding `delta_i (e_i - e_{n+i})(e_i - e_{n+i})^T`
/// with `delta_i = Y_{i,n+i}`.
///
/// Each rank-one update is PSD, keeps `e^T Y e`, and changes the objective by
/// `4 Q_ii delta_i`, so with `diag(Q) >= 0` the objective does not decrease.
/// The updates touch disjoint entries, so one pass settles every index.
pub fn repair_complementarity(ystar: &SymMat, q: &SymMat) -> Result<SymMat, RelaxError> {
    let n = q.order();
    if ystar.order() != 2 * n {
        return Err(RelaxError::Precondition(format!(
            "Y has order {} but Q has order {n}",
            ystar.order()
        )));
    }
    if let Some(i) = (0..n).find(|&i| q.get(i, i) < 0.0) {
        return Err(RelaxError::Precondition(format!(
            "diag(Q) must be nonnegative; Q[{i}][{i}] = {}",
            q.get(i, i)
        )));
    }
    let mut out = ystar.clone();
    for i in 0..n {
        let delta = out.get(i, n + i);
        if delta == 0.0 {
            continue;
        }
        out.set(i, i, out.get(i, i) + delta);
        out.set(n + i, n + i, out.get(n + i, n + i) + delta);
        out.set(i, n + i, 0.0);
    }
    Ok(out)
}
