use std::f64::consts::SQRT_2;
use std::ops::Range;

use super::lift::lift_qtilde;
use super::{holder_factor, RelaxError, RelaxationKind};
use crate::conic::{ConeKind, ConeProgram};
use crate::linalg::{smat, svec, svec_index, svec_len, SymMat};

/// A relaxation in conic form together with where its matrix variable lives.
#[derive(Debug, Clone)]
pub struct BuiltRelaxation {
    pub kind: RelaxationKind,
    pub program: ConeProgram,
    /// Dimension of the original problem.
    pub n: usize,
    /// Variables holding `svec(Y)` (or `svec(X)` for `SdpX`).
    pub matrix_block: Range<usize>,
    pub matrix_order: usize,
}

impl BuiltRelaxation {
    /// Recover the matrix variable from a primal vector.
    pub fn decode(&self, x: &[f64]) -> Result<SymMat, RelaxError> {
        Ok(smat(&x[self.matrix_block.clone()], self.matrix_order)?)
    }
}

/// How the lifted constraints of a `Y`-formulation are combined.
struct LiftedSpec {
    objective_scale: f64,
    /// `e^T Y e = 1` when true, `<= 1` otherwise
    sum_equality: bool,
    complementarity: bool,
    trace_row: Option<TraceRow>,
}

enum TraceRow {
    /// `k tr(A^T A Y) = 1`
    SplitEq(f64),
    /// `k tr Y = 1`
    PlainEq(f64),
    /// `c tr Y <= 1`
    PlainLe(f64),
}

fn coeffs(range: &Range<usize>, dense: Vec<f64>) -> Vec<(usize, f64)> {
    dense
        .into_iter()
        .enumerate()
        .filter(|(_, v)| *v != 0.0)
        .map(|(j, v)| (range.start + j, v))
        .collect()
}

fn build_lifted(q: &SymMat, layout: LiftedSpec) -> (ConeProgram, Range<usize>) {
    let n = q.order();
    let d = 2 * n;
    let mut prog = ConeProgram::new();
    let y = prog.add_block(ConeKind::Psd(d), 0);

    let qt = lift_qtilde(q).scaled(layout.objective_scale);
    for (j, c) in svec(&qt).into_iter().enumerate() {
        prog.set_objective(y.start + j, c);
    }

    let is_comp_pair = |a: usize, b: usize| b == a + n && a < n;

    // elementwise nonnegativity of the off-diagonal (diagonal follows from psd)
    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|a| (a + 1..d).map(move |b| (a, b)))
        .filter(|&(a, b)| !(layout.complementarity && is_comp_pair(a, b)))
        .collect();
    let dup = prog.add_block(ConeKind::Nonneg, pairs.len());
    for (t, &(a, b)) in pairs.iter().enumerate() {
        prog.add_row(vec![(dup.start + t, 1.0), (y.start + svec_index(d, a, b), -1.0)], 0.0);
    }
    if layout.complementarity {
        let zeros = prog.add_block(ConeKind::Zero, n);
        for i in 0..n {
            prog.add_row(vec![(zeros.start + i, 1.0), (y.start + svec_index(d, i, n + i), -1.0)], 0.0);
        }
    }

    let ones = SymMat::from_fn(d, |_, _| 1.0);
    let mut sum_row = coeffs(&y, svec(&ones));
    if !layout.sum_equality {
        let s = prog.add_block(ConeKind::Nonneg, 1);
        sum_row.push((s.start, 1.0));
    }
    prog.add_row(sum_row, 1.0);

    if let Some(tr) = layout.trace_row {
        let (scale, split, equality) = match tr {
            TraceRow::SplitEq(k) => (k, true, true),
            TraceRow::PlainEq(k) => (k, false, true),
            TraceRow::PlainLe(c) => (c, false, false),
        };
        // tr(A^T A Y) = tr Y - 2 sum_i Y_{i,n+i}
        let mut row: Vec<(usize, f64)> = (0..d).map(|a| (y.start + svec_index(d, a, a), scale)).collect();
        if split {
            for i in 0..n {
                row.push((y.start + svec_index(d, i, n + i), -SQRT_2 * scale));
            }
        }
        if !equality {
            let s = prog.add_block(ConeKind::Nonneg, 1);
            row.push((s.start, 1.0));
        }
        prog.add_row(row, 1.0);
    }
    (prog, y)
}

fn build_sdp_x(q: &SymMat, k: f64) -> (ConeProgram, Range<usize>) {
    let n = q.order();
    let len = svec_len(n);
    let mut prog = ConeProgram::new();
    let x = prog.add_block(ConeKind::Psd(n), 0);
    for (j, c) in svec(q).into_iter().enumerate() {
        prog.set_objective(x.start + j, c);
    }
    // U >= |X| elementwise, stored entrywise (no svec scaling) on i <= j
    let u = prog.add_block(ConeKind::Nonneg, len);
    let upper = prog.add_block(ConeKind::Nonneg, len); // U - X
    let lower = prog.add_block(ConeKind::Nonneg, len); // U + X
    for i in 0..n {
        for j in i..n {
            let t = svec_index(n, i, j);
            // natural entry X_ij from its svec coordinate
            let xc = if i == j { 1.0 } else { 1.0 / SQRT_2 };
            prog.add_row(vec![(upper.start + t, 1.0), (u.start + t, -1.0), (x.start + t, xc)], 0.0);
            prog.add_row(vec![(lower.start + t, 1.0), (u.start + t, -1.0), (x.start + t, -xc)], 0.0);
        }
    }
    prog.add_row(coeffs(&x, svec(&SymMat::identity(n))), 1.0);
    let slack = prog.add_block(ConeKind::Nonneg, 1);
    let mut row: Vec<(usize, f64)> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .map(|(i, j)| (u.start + svec_index(n, i, j), if i == j { 1.0 } else { 2.0 }))
        .collect();
    row.push((slack.start, 1.0));
    prog.add_row(row, k);
    (prog, x)
}

/// Translate a relaxation of `Q` into a [`ConeProgram`].
pub fn build(kind: RelaxationKind, q: &SymMat) -> Result<BuiltRelaxation, RelaxError> {
    let n = q.order();
    if n == 0 {
        return Err(RelaxError::Precondition("Q must have order at least 1".into()));
    }
    q.check_finite()?;
    kind.validate(n)?;
    let lifted = |layout| {
        let (program, y) = build_lifted(q, layout);
        (program, y, 2 * n)
    };
    let (program, matrix_block, matrix_order) = match kind {
        RelaxationKind::DnnL1 => lifted(LiftedSpec {
            objective_scale: 1.0,
            sum_equality: true,
            complementarity: false,
            trace_row: None,
        }),
        RelaxationKind::DnnL1New => lifted(LiftedSpec {
            objective_scale: 1.0,
            sum_equality: false,
            complementarity: true,
            trace_row: None,
        }),
        RelaxationKind::DnnL2L1 { k } => lifted(LiftedSpec {
            objective_scale: k,
            sum_equality: true,
            complementarity: false,
            trace_row: Some(TraceRow::SplitEq(k)),
        }),
        RelaxationKind::DnnL2L1NewLe { k } => lifted(LiftedSpec {
            objective_scale: k,
            sum_equality: false,
            complementarity: true,
            trace_row: Some(TraceRow::SplitEq(k)),
        }),
        RelaxationKind::DnnL2L1NewEq { k } => lifted(LiftedSpec {
            objective_scale: k,
            sum_equality: true,
            complementarity: true,
            trace_row: Some(TraceRow::PlainEq(k)),
        }),
        RelaxationKind::DnnLp { p } => {
            let c = holder_factor(n, p);
            lifted(LiftedSpec {
                objective_scale: c,
                sum_equality: false,
                complementarity: true,
                trace_row: Some(TraceRow::PlainLe(c)),
            })
        }
        RelaxationKind::SdpX { k } => {
            let (program, x) = build_sdp_x(q, k);
            (program, x, n)
        }
    };
    debug_assert!(program.validate().is_ok());
    Ok(BuiltRelaxation {
        kind,
        program,
        n,
        matrix_block,
        matrix_order,
    })
}
