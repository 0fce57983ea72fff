//! Reference and random problem instances.

use crate::linalg::SymMat;
use crate::rng::SplitMix64;

/// The 6 x 6 test matrix used for the worked examples (all entries negative,
/// yet indefinite with `lambda_max ~ 7.0857`).
pub const EXAMPLE_Q: [[f64; 6]; 6] = [
    [-11.0, -11.0, -7.0, -10.0, -8.0, -2.0],
    [-11.0, -5.0, -10.0, -9.0, -10.0, -7.0],
    [-7.0, -10.0, -10.0, -3.0, -6.0, -8.0],
    [-10.0, -9.0, -3.0, -8.0, -9.0, -10.0],
    [-8.0, -10.0, -6.0, -9.0, -8.0, -7.0],
    [-2.0, -7.0, -8.0, -10.0, -7.0, -6.0],
];

pub fn example_q() -> SymMat {
    SymMat::from_fn(6, |i, j| EXAMPLE_Q[i][j])
}

/// Symmetric matrix with independent upper-triangle entries uniform in `[lo, hi)`.
pub fn random_symmetric(rng: &mut SplitMix64, n: usize, lo: f64, hi: f64) -> SymMat {
    SymMat::from_fn(n, |_, _| rng.uniform(lo, hi))
}

/// Full matrix with entries uniform in `[0, 1)`, then `(Q + Q^T) / 2`.
pub fn random_unit_symmetrized(rng: &mut SplitMix64, n: usize) -> SymMat {
    let full: Vec<f64> = (0..n * n).map(|_| rng.next_f64()).collect();
    SymMat::from_fn(n, |i, j| 0.5 * (full[i * n + j] + full[j * n + i]))
}

/// Random positive semidefinite matrix `G G^T / n` with Gaussian `G`.
pub fn random_psd(rng: &mut SplitMix64, n: usize) -> SymMat {
    let g: Vec<f64> = (0..n * n).map(|_| rng.gaussian()).collect();
    SymMat::from_fn(n, |i, j| (0..n).map(|k| g[i * n + k] * g[j * n + k]).sum::<f64>() / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_matrix_is_symmetric_as_printed() {
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(EXAMPLE_Q[i][j], EXAMPLE_Q[j][i]);
            }
        }
        assert_eq!(example_q().diag(), vec![-11.0, -5.0, -10.0, -8.0, -8.0, -6.0]);
    }
}
