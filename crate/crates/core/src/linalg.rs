//! Dense symmetric linear algebra.
//!
//! Everything here works on small matrices (order up to a few dozen), so the
//! routines favour accuracy and determinism over speed: a cyclic Jacobi
//! eigensolver, Cholesky, and partially pivoted LU.

use serde::Serialize;
use std::f64::consts::SQRT_2;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix order must be positive")]
    EmptyMatrix,
}

/// Symmetric matrix of order `m` storing one cell per unordered pair
/// (packed upper triangle, row by row).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymMat {
    order: usize,
    packed: Vec<f64>,
}

impl SymMat {
    pub fn zeros(order: usize) -> Self {
        SymMat {
            order,
            packed: vec![0.0; order * (order + 1) / 2],
        }
    }

    pub fn identity(order: usize) -> Self {
        Self::from_diag(&vec![1.0; order])
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Build from a closure evaluated on the upper triangle (`i <= j`).
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            for j in i..order {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Build from a full row-major `order x order` array, replacing it by
    /// `(M + M^T) / 2`.
    pub fn from_full_symmetrized(order: usize, full: &[f64]) -> Result<Self, LinalgError> {
        if full.len() != order * order {
            return Err(LinalgError::DimensionMismatch {
                expected: order * order,
                got: full.len(),
            });
        }
        let m = Self::from_fn(order, |i, j| 0.5 * (full[i * order + j] + full[j * order + i]));
        m.check_finite()?;
        Ok(m)
    }

    /// Outer product `v v^T`.
    pub fn outer(v: &[f64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j])
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.packed[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.packed[k] = v;
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.order && j < self.order);
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.order - i * (i + 1) / 2 + j
    }

    pub fn check_finite(&self) -> Result<(), LinalgError> {
        for i in 0..self.order {
            for j in i..self.order {
                if !self.get(i, j).is_finite() {
                    return Err(LinalgError::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    /// Full row-major copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let m = self.order;
        let mut out = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                let v = self.get(i, j);
                out[i * m + j] = v;
                out[j * m + i] = v;
            }
        }
        out
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.order).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self.get(i, i)).sum()
    }

    /// Matrix inner product `A . B = trace(A B^T)`.
    pub fn inner(&self, other: &SymMat) -> f64 {
        assert_eq!(self.order, other.order, "inner product of mismatched orders");
        let mut s = 0.0;
        for i in 0..self.order {
            s += self.get(i, i) * other.get(i, i);
            for j in i + 1..self.order {
                s += 2.0 * self.get(i, j) * other.get(i, j);
            }
        }
        s
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// Sum of all entries, `e^T M e`.
    pub fn sum_entries(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.order {
            s += self.get(i, i);
            for j in i + 1..self.order {
                s += 2.0 * self.get(i, j);
            }
        }
        s
    }

    pub fn scaled(&self, alpha: f64) -> SymMat {
        SymMat {
            order: self.order,
            packed: self.packed.iter().map(|v| alpha * v).collect(),
        }
    }

    pub fn add(&self, other: &SymMat) -> SymMat {
        assert_eq!(self.order, other.order);
        SymMat {
            order: self.order,
            packed: self.packed.iter().zip(&other.packed).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &SymMat) -> SymMat {
        self.add(&other.scaled(-1.0))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.order);
        (0..self.order)
            .map(|i| (0..self.order).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// `x^T M x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Smallest entry (elementwise).
    pub fn min_entry(&self) -> f64 {
        self.packed.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Rectangular row-major matrix. Only used for the `n x 2n` splitting map and
/// a few test helpers, so the interface is deliberately thin.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// `self^T * S * self` for symmetric `S` of order `rows`.
    pub fn congruence_t(&self, s: &SymMat) -> SymMat {
        assert_eq!(s.order(), self.rows);
        let (r, c) = (self.rows, self.cols);
        // T = S * self  (r x c)
        let mut t = vec![0.0; r * c];
        for i in 0..r {
            for k in 0..r {
                let sik = s.get(i, k);
                if sik == 0.0 {
                    continue;
                }
                for j in 0..c {
                    t[i * c + j] += sik * self.get(k, j);
                }
            }
        }
        SymMat::from_fn(c, |a, b| (0..r).map(|i| self.get(i, a) * t[i * c + b]).sum())
    }

    /// `self * S * self^T` for symmetric `S` of order `cols`.
    pub fn congruence(&self, s: &SymMat) -> SymMat {
        assert_eq!(s.order(), self.cols);
        let (r, c) = (self.rows, self.cols);
        let mut t = vec![0.0; r * c];
        for i in 0..r {
            for k in 0..c {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                for j in 0..c {
                    t[i * c + j] += aik * s.get(k, j);
                }
            }
        }
        SymMat::from_fn(r, |a, b| (0..c).map(|j| t[a * c + j] * self.get(b, j)).sum())
    }
}

/// Eigendecomposition of a symmetric matrix. `values` are sorted descending
/// and column `i` of `vectors` (row-major, `m x m`) belongs to `values[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigDecomp {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
}

impl EigDecomp {
    pub fn order(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        let m = self.order();
        (0..m).map(|r| self.vectors[r * m + i]).collect()
    }

    /// `V diag(f(lambda)) V^T`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> SymMat {
        let m = self.order();
        let w: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        SymMat::from_fn(m, |i, j| {
            (0..m)
                .map(|k| w[k] * self.vectors[i * m + k] * self.vectors[j * m + k])
                .sum()
        })
    }

    pub fn reconstruct(&self) -> SymMat {
        self.reconstruct_with(|l| l)
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigendecomposition on a full row-major copy.
pub(crate) fn jacobi_dense(a: &mut [f64], m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; m * m];
    for i in 0..m {
        v[i * m + i] = 1.0;
    }
    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if total == 0.0 {
        return ((0..m).map(|_| 0.0).collect(), v);
    }
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..m {
            for q in p + 1..m {
                off += a[p * m + q] * a[p * m + q];
            }
        }
        if off.sqrt() <= 1e-17 * total {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[p * m + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                // skip rotations that cannot change anything at working precision
                if apq.abs() < 1e-300 || (apq.abs() * 1e18 < app.abs() && apq.abs() * 1e18 < aqq.abs())
                {
                    a[p * m + q] = 0.0;
                    a[q * m + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                a[p * m + p] = app - t * apq;
                a[q * m + q] = aqq + t * apq;
                a[p * m + q] = 0.0;
                a[q * m + p] = 0.0;
                for r in 0..m {
                    if r != p && r != q {
                        let arp = a[r * m + p];
                        let arq = a[r * m + q];
                        let nrp = arp - s * (arq + tau * arp);
                        let nrq = arq + s * (arp - tau * arq);
                        a[r * m + p] = nrp;
                        a[p * m + r] = nrp;
                        a[r * m + q] = nrq;
                        a[q * m + r] = nrq;
                    }
                }
                for r in 0..m {
                    let vrp = v[r * m + p];
                    let vrq = v[r * m + q];
                    v[r * m + p] = vrp - s * (vrq + tau * vrp);
                    v[r * m + q] = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }
    ((0..m).map(|i| a[i * m + i]).collect(), v)
}

fn sorted_decomp(values: Vec<f64>, vectors: Vec<f64>, m: usize) -> EigDecomp {
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let mut out_vals = Vec::with_capacity(m);
    let mut out_vecs = vec![0.0; m * m];
    for (col, &src) in order.iter().enumerate() {
        out_vals.push(values[src]);
        // first non-negligible component nonnegative
        let mut sign = 1.0;
        for r in 0..m {
            let x = vectors[r * m + src];
            if x.abs() > 1e-12 {
                sign = x.signum();
                break;
            }
        }
        for r in 0..m {
            out_vecs[r * m + col] = sign * vectors[r * m + src];
        }
    }
    EigDecomp {
        values: out_vals,
        vectors: out_vecs,
    }
}

/// Symmetric eigendecomposition, eigenvalues in descending order.
pub fn eig_sym(mat: &SymMat) -> Result<EigDecomp, LinalgError> {
    mat.check_finite()?;
    let m = mat.order();
    let mut a = mat.to_dense();
    let (vals, vecs) = jacobi_dense(&mut a, m);
    Ok(sorted_decomp(vals, vecs, m))
}

pub fn lambda_max(mat: &SymMat) -> Result<f64, LinalgError> {
    if mat.order() == 0 {
        return Err(LinalgError::EmptyMatrix);
    }
    Ok(eig_sym(mat)?.values[0])
}

/// Nearest positive semidefinite matrix in Frobenius norm.
pub fn project_psd(mat: &SymMat) -> Result<SymMat, LinalgError> {
    Ok(eig_sym(mat)?.reconstruct_with(|l| l.max(0.0)))
}

/// Length of the symmetric vectorization of an order-`m` matrix.
#[inline]
pub fn svec_len(m: usize) -> usize {
    m * (m + 1) / 2
}

/// Order `m` such that `svec_len(m) == len`, if any.
pub fn svec_order(len: usize) -> Option<usize> {
    let m = ((((8 * len + 1) as f64).sqrt() - 1.0) / 2.0).round() as usize;
    (svec_len(m) == len).then_some(m)
}

/// Position of entry `(i, j)` inside `svec`: upper triangle, row by row.
#[inline]
pub fn svec_index(m: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * m - i * (i + 1) / 2 + j
}

/// Inverse of [`svec_index`].
pub fn svec_entry(m: usize, mut k: usize) -> (usize, usize) {
    for i in 0..m {
        let row = m - i;
        if k < row {
            return (i, i + k);
        }
        k -= row;
    }
    panic!("svec index out of range");
}

/// Isometric vectorization: off-diagonal entries carry a factor `sqrt(2)`
/// so that `svec(A) . svec(B) == A . B`.
pub fn svec(mat: &SymMat) -> Vec<f64> {
    let m = mat.order();
    let mut v = Vec::with_capacity(svec_len(m));
    for i in 0..m {
        v.push(mat.get(i, i));
        for j in i + 1..m {
            v.push(SQRT_2 * mat.get(i, j));
        }
    }
    v
}

pub fn smat(v: &[f64], m: usize) -> Result<SymMat, LinalgError> {
    if v.len() != svec_len(m) {
        return Err(LinalgError::DimensionMismatch {
            expected: svec_len(m),
            got: v.len(),
        });
    }
    let mut out = SymMat::zeros(m);
    let mut k = 0;
    for i in 0..m {
        out.set(i, i, v[k]);
        k += 1;
        for j in i + 1..m {
            out.set(i, j, v[k] / SQRT_2);
            k += 1;
        }
    }
    out.check_finite()?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Dense helpers on row-major square buffers, shared with the cone solver.

/// In-place lower Cholesky factor. Returns `false` if the matrix is not
/// numerically positive definite.
pub(crate) fn cholesky_in_place(a: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return false;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
        for k in j + 1..n {
            a[j * n + k] = 0.0;
        }
    }
    true
}

/// Solve `L L^T x = b` given the factor from [`cholesky_in_place`].
pub(crate) fn cholesky_solve(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

/// Inverse of an SPD matrix from its Cholesky factor.
pub(crate) fn cholesky_inverse(l: &[f64], n: usize) -> Vec<f64> {
    let mut inv = vec![0.0; n * n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        col.iter_mut().for_each(|c| *c = 0.0);
        col[j] = 1.0;
        cholesky_solve(l, n, &mut col);
        for i in 0..n {
            inv[i * n + j] = col[i];
        }
    }
    // symmetrize away rounding
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (inv[i * n + j] + inv[j * n + i]);
            inv[i * n + j] = v;
            inv[j * n + i] = v;
        }
    }
    inv
}

/// Solve a general square system by LU with partial pivoting. Returns `None`
/// when a pivot falls below `rel_pivot_tol` times the largest entry.
pub fn lu_solve(a: &[f64], b: &[f64], n: usize, rel_pivot_tol: f64) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(f64::MIN_POSITIVE);
    for col in 0..n {
        let (piv, pval) = (col..n)
            .map(|r| (r, m[r * n + col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))?;
        if pval <= rel_pivot_tol * scale {
            return None;
        }
        if piv != col {
            for k in 0..n {
                m.swap(col * n + k, piv * n + k);
            }
            x.swap(col, piv);
        }
        let d = m[col * n + col];
        for r in col + 1..n {
            let f = m[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                m[r * n + k] -= f * m[col * n + k];
            }
            x[r] -= f * x[col];
        }
    }
    for r in (0..n).rev() {
        let mut s = x[r];
        for k in r + 1..n {
            s -= m[r * n + k] * x[k];
        }
        x[r] = s / m[r * n + r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// `C = A B` for square row-major matrices.
pub(crate) fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            let row_b = &b[k * n..(k + 1) * n];
            let row_c = &mut c[i * n..(i + 1) * n];
            for (cj, bj) in row_c.iter_mut().zip(row_b) {
                *cj += aik * bj;
            }
        }
    }
    c
}

pub(crate) fn symmetrize(a: &mut [f64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
}

/// Smallest eigenvalue of a dense symmetric buffer (destroys the input).
pub(crate) fn lambda_min_dense(a: &mut [f64], n: usize) -> f64 {
    let (vals, _) = jacobi_dense(a, n);
    vals.into_iter().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn random_sym(rng: &mut SplitMix64, m: usize) -> SymMat {
        SymMat::from_fn(m, |_, _| rng.uniform(-1.0, 1.0))
    }

    fn frob_dense(a: &[f64]) -> f64 {
        a.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn identity_eigenvalues() {
        let d = eig_sym(&SymMat::identity(3)).unwrap();
        assert_eq!(d.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_eigenpairs() {
        let d = eig_sym(&SymMat::from_diag(&[2.0, -1.0])).unwrap();
        assert_eq!(d.values, vec![2.0, -1.0]);
        assert_eq!(d.vector(0), vec![1.0, 0.0]);
        assert_eq!(d.vector(1), vec![0.0, 1.0]);
    }

    #[test]
    fn lambda_max_simple_cases() {
        assert_eq!(lambda_max(&SymMat::from_diag(&[-1.0, -2.0])).unwrap(), -1.0);
        let ones = SymMat::from_fn(2, |_, _| 1.0);
        assert!((lambda_max(&ones).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn non_finite_rejected() {
        let mut m = SymMat::identity(2);
        m.set(0, 1, f64::NAN);
        assert!(matches!(eig_sym(&m), Err(LinalgError::NonFinite { row: 0, col: 1 })));
    }

    #[test]
    fn sign_convention_first_component_nonnegative() {
        let mut rng = SplitMix64::new(3);
        let d = eig_sym(&random_sym(&mut rng, 6)).unwrap();
        for i in 0..6 {
            let v = d.vector(i);
            let first = v.iter().find(|x| x.abs() > 1e-12).unwrap();
            assert!(*first > 0.0);
        }
    }

    #[test]
    fn decomposition_invariants_on_random_matrices() {
        let mut rng = SplitMix64::new(11);
        for trial in 0..1000 {
            let m = 1 + trial % 20;
            let a = random_sym(&mut rng, m);
            let d = eig_sym(&a).unwrap();
            let scale = a.frobenius_norm().max(1.0);
            assert!(d.reconstruct().sub(&a).frobenius_norm() <= 1e-10 * scale);
            let mut vtv = vec![0.0; m * m];
            for i in 0..m {
                for j in 0..m {
                    let s: f64 = (0..m).map(|r| d.vectors[r * m + i] * d.vectors[r * m + j]).sum();
                    vtv[i * m + j] = s - if i == j { 1.0 } else { 0.0 };
                }
            }
            assert!(frob_dense(&vtv) <= 1e-10);
            assert!(d.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn projection_cases() {
        let neg = SymMat::identity(4).scaled(-1.0);
        assert!(project_psd(&neg).unwrap().frobenius_norm() < 1e-14);
        let p = project_psd(&SymMat::from_diag(&[3.0, -5.0])).unwrap();
        assert!(p.sub(&SymMat::from_diag(&[3.0, 0.0])).frobenius_norm() < 1e-14);
        let mut rng = SplitMix64::new(5);
        let g = random_sym(&mut rng, 5);
        let psd = SymMat::from_fn(5, |i, j| (0..5).map(|k| g.get(i, k) * g.get(j, k)).sum());
        assert!(project_psd(&psd).unwrap().sub(&psd).frobenius_norm() <= 1e-10);
    }

    #[test]
    fn projection_is_idempotent_and_psd() {
        let mut rng = SplitMix64::new(17);
        for m in 1..12 {
            let a = random_sym(&mut rng, m);
            let p = project_psd(&a).unwrap();
            let pp = project_psd(&p).unwrap();
            assert!(pp.sub(&p).frobenius_norm() <= 1e-10);
            assert!(eig_sym(&p).unwrap().values[m - 1] >= -1e-10);
            // optimality: residual A - P is NSD and orthogonal to P
            let r = a.sub(&p);
            assert!(r.inner(&p).abs() <= 1e-10);
            assert!(eig_sym(&r).unwrap().values[0] <= 1e-10);
        }
    }

    #[test]
    fn lambda_max_positive_homogeneity() {
        let mut rng = SplitMix64::new(23);
        for _ in 0..50 {
            let a = random_sym(&mut rng, 7);
            let alpha = rng.uniform(0.1, 10.0);
            let l1 = lambda_max(&a.scaled(alpha)).unwrap();
            let l2 = alpha * lambda_max(&a).unwrap();
            assert!((l1 - l2).abs() <= 1e-10 * (1.0 + l2.abs()));
        }
    }

    #[test]
    fn svec_identity_order_two() {
        assert_eq!(svec(&SymMat::identity(2)), vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn smat_rejects_bad_length() {
        assert!(matches!(
            smat(&[1.0, 2.0], 2),
            Err(LinalgError::DimensionMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn svec_index_roundtrip() {
        for m in 1..9 {
            for k in 0..svec_len(m) {
                let (i, j) = svec_entry(m, k);
                assert!(i <= j);
                assert_eq!(svec_index(m, i, j), k);
                assert_eq!(svec_index(m, j, i), k);
            }
            assert_eq!(svec_order(svec_len(m)), Some(m));
        }
        assert_eq!(svec_order(4), None);
    }

    #[test]
    fn congruence_matches_dense_product() {
        let mut rng = SplitMix64::new(8);
        let s = random_sym(&mut rng, 3);
        let mut a = Matrix::zeros(3, 5);
        for i in 0..3 {
            for j in 0..5 {
                a.set(i, j, rng.uniform(-1.0, 1.0));
            }
        }
        let ata = a.congruence_t(&s);
        for p in 0..5 {
            for q in 0..5 {
                let mut want = 0.0;
                for i in 0..3 {
                    for k in 0..3 {
                        want += a.get(i, p) * s.get(i, k) * a.get(k, q);
                    }
                }
                assert!((ata.get(p, q) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lu_detects_singular() {
        assert!(lu_solve(&[1.0, 2.0, 2.0, 4.0], &[1.0, 1.0], 2, 1e-12).is_none());
        let x = lu_solve(&[0.0, 1.0, 2.0, 0.0], &[3.0, 4.0], 2, 1e-12).unwrap();
        assert_eq!(x, vec![2.0, 3.0]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn sym_strategy(m: usize) -> impl Strategy<Value = SymMat> {
            proptest::collection::vec(-5.0f64..5.0, svec_len(m)).prop_map(move |v| {
                let mut it = v.into_iter();
                SymMat::from_fn(m, |_, _| it.next().unwrap())
            })
        }

        proptest! {
            #[test]
            fn svec_is_isometric_bijection(a in sym_strategy(5), b in sym_strategy(5)) {
                let back = smat(&svec(&a), 5).unwrap();
                prop_assert!(back.sub(&a).frobenius_norm() <= 1e-12);
                let dot: f64 = svec(&a).iter().zip(svec(&b)).map(|(x, y)| x * y).sum();
                let tr: f64 = {
                    let (da, db) = (a.to_dense(), b.to_dense());
                    let prod = matmul(&da, &db, 5);
                    (0..5).map(|i| prod[i * 5 + i]).sum()
                };
                prop_assert!((dot - tr).abs() <= 1e-10);
            }
        }
    }
}
