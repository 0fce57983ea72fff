use std::ops::Range;

use serde::Serialize;

use super::ConicError;
use crate::linalg::{self, svec_len};

/// Cone attached to a contiguous range of variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConeKind {
    Free,
    Nonneg,
    /// Variables fixed at zero.
    Zero,
    /// Positive semidefinite matrix of the given order, stored as `svec`.
    Psd(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeBlock {
    pub kind: ConeKind,
    pub range: Range<usize>,
}

/// Sparse equality row `sum_j coeffs[j].1 * x[coeffs[j].0] = rhs`. Repeated
/// indices are summed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearRow {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// `maximize objective . x  s.t.  rows,  x in K_1 x ... x K_b`.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ConeProgram {
    num_vars: usize,
    objective: Vec<f64>,
    rows: Vec<LinearRow>,
    blocks: Vec<ConeBlock>,
}

impl ConeProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assemble a program from raw parts, checking every invariant.
    pub fn from_parts(
        objective: Vec<f64>,
        rows: Vec<LinearRow>,
        blocks: Vec<ConeBlock>,
    ) -> Result<Self, ConicError> {
        let prog = ConeProgram {
            num_vars: objective.len(),
            objective,
            rows,
            blocks,
        };
        prog.validate()?;
        Ok(prog)
    }

    /// Append a block of `kind`, returning the variable range it occupies.
    /// `len` is ignored for PSD blocks, whose length is fixed by the order.
    pub fn add_block(&mut self, kind: ConeKind, len: usize) -> Range<usize> {
        let len = match kind {
            ConeKind::Psd(m) => svec_len(m),
            _ => len,
        };
        let range = self.num_vars..self.num_vars + len;
        self.num_vars += len;
        self.objective.resize(self.num_vars, 0.0);
        self.blocks.push(ConeBlock {
            kind,
            range: range.clone(),
        });
        range
    }

    pub fn set_objective(&mut self, var: usize, coeff: f64) {
        self.objective[var] = coeff;
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) {
        self.rows.push(LinearRow { coeffs, rhs });
    }

    /// Add a row given as a dense coefficient vector over all variables.
    pub fn add_dense_row(&mut self, dense: &[f64], rhs: f64) {
        let coeffs = dense
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(j, v)| (j, *v))
            .collect();
        self.add_row(coeffs, rhs);
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn rows(&self) -> &[LinearRow] {
        &self.rows
    }

    pub fn blocks(&self) -> &[ConeBlock] {
        &self.blocks
    }

    pub fn validate(&self) -> Result<(), ConicError> {
        let mut next = 0;
        for (b, block) in self.blocks.iter().enumerate() {
            if block.range.start != next || block.range.end < block.range.start {
                return Err(ConicError::InvalidProgram(format!(
                    "block {b} does not start where the previous one ended"
                )));
            }
            if let ConeKind::Psd(m) = block.kind {
                if m == 0 || block.range.len() != svec_len(m) {
                    return Err(ConicError::InvalidProgram(format!(
                        "PSD block {b} of order {m} has length {}",
                        block.range.len()
                    )));
                }
            }
            next = block.range.end;
        }
        if next != self.num_vars || self.objective.len() != self.num_vars {
            return Err(ConicError::InvalidProgram(
                "blocks do not cover all variables".into(),
            ));
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(ConicError::InvalidProgram("non-finite objective".into()));
        }
        for (r, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(ConicError::InvalidProgram(format!("row {r}: non-finite rhs")));
            }
            for &(j, v) in &row.coeffs {
                if j >= self.num_vars || !v.is_finite() {
                    return Err(ConicError::InvalidProgram(format!(
                        "row {r}: bad coefficient at variable {j}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn row_value(&self, row: &LinearRow, x: &[f64]) -> f64 {
        row.coeffs.iter().map(|&(j, v)| v * x[j]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolveStatus {
    Optimal,
    IterLimit,
    NumericalFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iter: usize,
    pub verbose: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tol: 1e-7,
            max_iter: 200_000,
            verbose: false,
        }
    }
}

impl SolverSettings {
    pub fn with_tol(tol: f64) -> Self {
        SolverSettings {
            tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConicError> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(ConicError::InvalidSettings(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(ConicError::InvalidSettings("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Relative residuals of a primal-dual pair.
///
/// The dual of `max c.x s.t. Ax = b, x in K` is `min b.w s.t. A^T w - c in K*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    /// `||Ax - b|| / (1 + ||b||)`
    pub primal: f64,
    /// `dist(A^T w - c, K*) / (1 + ||c||)`
    pub dual: f64,
    /// `|c.x - b.w| / (1 + |c.x| + |b.w|)`
    pub gap: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.primal.max(self.dual).max(self.gap)
    }
}

/// Residuals of `(x, w)` evaluated directly from the program data.
pub fn residuals(prog: &ConeProgram, x: &[f64], w: &[f64]) -> Result<Residuals, ConicError> {
    if x.len() != prog.num_vars() || w.len() != prog.rows().len() {
        return Err(ConicError::InvalidProgram(
            "primal or dual vector has the wrong length".into(),
        ));
    }
    let b_norm = prog.rows().iter().map(|r| r.rhs * r.rhs).sum::<f64>().sqrt();
    let c_norm = prog.objective().iter().map(|v| v * v).sum::<f64>().sqrt();

    let primal_sq: f64 = prog
        .rows()
        .iter()
        .map(|r| (prog.row_value(r, x) - r.rhs).powi(2))
        .sum();

    // slack = A^T w - c
    let mut slack: Vec<f64> = prog.objective().iter().map(|v| -v).collect();
    for (row, &wi) in prog.rows().iter().zip(w) {
        for &(j, v) in &row.coeffs {
            slack[j] += wi * v;
        }
    }
    let mut dual_sq = 0.0;
    for block in prog.blocks() {
        let s = &slack[block.range.clone()];
        match block.kind {
            ConeKind::Zero => {}
            ConeKind::Free => dual_sq += s.iter().map(|v| v * v).sum::<f64>(),
            ConeKind::Nonneg => dual_sq += s.iter().map(|v| v.min(0.0).powi(2)).sum::<f64>(),
            ConeKind::Psd(m) => {
                let mat = linalg::smat(s, m).map_err(|e| ConicError::Numerical(e.to_string()))?;
                let eig = linalg::eig_sym(&mat).map_err(|e| ConicError::Numerical(e.to_string()))?;
                dual_sq += eig.values.iter().map(|l| l.min(0.0).powi(2)).sum::<f64>();
            }
        }
    }

    let pobj: f64 = prog.objective().iter().zip(x).map(|(c, v)| c * v).sum();
    let dobj: f64 = prog.rows().iter().zip(w).map(|(r, wi)| r.rhs * wi).sum();
    Ok(Residuals {
        primal: primal_sq.sqrt() / (1.0 + b_norm),
        dual: dual_sq.sqrt() / (1.0 + c_norm),
        gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
        primal_objective: pobj,
        dual_objective: dobj,
    })
}

/// Largest violation of cone membership by `x`, with PSD blocks measured
/// relative to `1 + ||block||`.
pub fn cone_violation(prog: &ConeProgram, x: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for block in prog.blocks() {
        let v = &x[block.range.clone()];
        let viol = match block.kind {
            ConeKind::Free => 0.0,
            ConeKind::Zero => v.iter().fold(0.0f64, |a, x| a.max(x.abs())),
            ConeKind::Nonneg => v.iter().fold(0.0f64, |a, x| a.max(-x)),
            ConeKind::Psd(m) => match linalg::smat(v, m).and_then(|s| {
                let norm = s.frobenius_norm();
                linalg::eig_sym(&s).map(|e| (-e.values[m - 1]).max(0.0) / (1.0 + norm))
            }) {
                Ok(val) => val,
                Err(_) => f64::INFINITY,
            },
        };
        worst = worst.max(viol);
    }
    worst
}

/// Result of a solve, in the coordinates of the original program.
#[derive(Debug, Clone, Serialize)]
pub struct ConeSolution {
    pub status: SolveStatus,
    pub x: Vec<f64>,
    /// Multipliers of the equality rows (dual of the maximization).
    pub dual: Vec<f64>,
    pub objective: f64,
    pub dual_objective: f64,
    pub residual_primal: f64,
    pub residual_dual: f64,
    pub residual_gap: f64,
    pub iterations: usize,
}

impl ConeSolution {
    pub fn max_residual(&self) -> f64 {
        self.residual_primal.max(self.residual_dual).max(self.residual_gap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_partition_variables() {
        let mut p = ConeProgram::new();
        let a = p.add_block(ConeKind::Nonneg, 2);
        let b = p.add_block(ConeKind::Psd(3), 0);
        assert_eq!(a, 0..2);
        assert_eq!(b, 2..8);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn from_parts_rejects_gaps() {
        let blocks = vec![
            ConeBlock { kind: ConeKind::Nonneg, range: 0..1 },
            ConeBlock { kind: ConeKind::Nonneg, range: 2..3 },
        ];
        assert!(ConeProgram::from_parts(vec![0.0; 3], vec![], blocks).is_err());
    }

    #[test]
    fn from_parts_rejects_bad_psd_length() {
        let blocks = vec![ConeBlock { kind: ConeKind::Psd(2), range: 0..4 }];
        assert!(ConeProgram::from_parts(vec![0.0; 4], vec![], blocks).is_err());
    }

    #[test]
    fn rejects_non_finite_rows() {
        let mut p = ConeProgram::new();
        p.add_block(ConeKind::Nonneg, 1);
        p.add_row(vec![(0, f64::NAN)], 1.0);
        assert!(p.validate().is_err());
        let mut p = ConeProgram::new();
        p.add_block(ConeKind::Nonneg, 1);
        p.add_row(vec![(3, 1.0)], 1.0);
        assert!(p.validate().is_err());
    }

    #[test]
    fn settings_validation() {
        assert!(SolverSettings::default().validate().is_ok());
        assert!(SolverSettings::with_tol(0.0).validate().is_err());
        let s = SolverSettings { max_iter: 0, ..Default::default() };
        assert!(s.validate().is_err());
    }

    #[test]
    fn residuals_of_exact_lp_pair() {
        // max x0 + x1 s.t. x0 + x1 = 1, x >= 0; dual w = 1 gives zero slack
        let mut p = ConeProgram::new();
        p.add_block(ConeKind::Nonneg, 2);
        p.set_objective(0, 1.0);
        p.set_objective(1, 1.0);
        p.add_row(vec![(0, 1.0), (1, 1.0)], 1.0);
        let r = residuals(&p, &[0.5, 0.5], &[1.0]).unwrap();
        assert_eq!(r.max(), 0.0);
        let r = residuals(&p, &[0.5, 0.5], &[0.0]).unwrap();
        assert!(r.dual > 0.0 && r.gap > 0.0);
    }

    #[test]
    fn cone_violation_per_kind() {
        let mut p = ConeProgram::new();
        p.add_block(ConeKind::Zero, 1);
        p.add_block(ConeKind::Nonneg, 1);
        p.add_block(ConeKind::Psd(2), 0);
        assert_eq!(cone_violation(&p, &[0.0, 1.0, 1.0, 0.0, 1.0]), 0.0);
        assert!(cone_violation(&p, &[0.1, 0.0, 1.0, 0.0, 1.0]) > 0.09);
        assert!(cone_violation(&p, &[0.0, 0.0, 1.0, 0.0, -1.0]) > 0.1);
    }
}
