use super::*;
use crate::linalg::{self, svec, svec_len, SymMat};
use crate::rng::SplitMix64;

fn trace_program(q: &SymMat, equality: bool) -> ConeProgram {
    let m = q.order();
    let mut p = ConeProgram::new();
    let x = p.add_block(ConeKind::Psd(m), 0);
    for (j, c) in svec(q).into_iter().enumerate() {
        p.set_objective(x.start + j, c);
    }
    let mut row: Vec<(usize, f64)> = svec(&SymMat::identity(m))
        .into_iter()
        .enumerate()
        .filter(|(_, v)| *v != 0.0)
        .map(|(j, v)| (x.start + j, v))
        .collect();
    if !equality {
        let s = p.add_block(ConeKind::Nonneg, 1);
        row.push((s.start, 1.0));
    }
    p.add_row(row, 1.0);
    p
}

/// Residuals recomputed without touching the solver's bookkeeping.
fn recompute(prog: &ConeProgram, sol: &ConeSolution) -> (f64, f64, f64) {
    let n = prog.num_vars();
    let mut dense = vec![vec![0.0; n]; prog.rows().len()];
    for (i, row) in prog.rows().iter().enumerate() {
        for &(j, v) in &row.coeffs {
            dense[i][j] += v;
        }
    }
    let b: Vec<f64> = prog.rows().iter().map(|r| r.rhs).collect();
    let c = prog.objective();
    let ax: Vec<f64> = dense.iter().map(|r| r.iter().zip(&sol.x).map(|(a, x)| a * x).sum()).collect();
    let rp = ax.iter().zip(&b).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
        / (1.0 + b.iter().map(|v| v * v).sum::<f64>().sqrt());
    let mut slack: Vec<f64> = (0..n)
        .map(|j| dense.iter().zip(&sol.dual).map(|(r, w)| r[j] * w).sum::<f64>() - c[j])
        .collect();
    let mut viol = 0.0;
    for block in prog.blocks() {
        match block.kind {
            ConeKind::Zero => {}
            ConeKind::Free => viol += slack[block.range.clone()].iter().map(|v| v * v).sum::<f64>(),
            ConeKind::Nonneg => {
                viol += slack[block.range.clone()].iter().map(|v| v.min(0.0).powi(2)).sum::<f64>()
            }
            ConeKind::Psd(m) => {
                // unscale svec to a dense symmetric matrix and take its eigenvalues
                let s = linalg::smat(&slack[block.range.clone()], m).unwrap();
                let e = linalg::eig_sym(&s).unwrap();
                viol += e.values.iter().map(|l| l.min(0.0).powi(2)).sum::<f64>();
            }
        }
    }
    slack.clear();
    let rd = viol.sqrt() / (1.0 + c.iter().map(|v| v * v).sum::<f64>().sqrt());
    let pobj: f64 = c.iter().zip(&sol.x).map(|(a, b)| a * b).sum();
    let dobj: f64 = b.iter().zip(&sol.dual).map(|(a, b)| a * b).sum();
    let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
    (rp, rd, gap)
}

#[test]
fn trace_constraint_forces_value() {
    let p = trace_program(&SymMat::identity(3), true);
    let sol = solve(&p, &SolverSettings::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.objective - 1.0).abs() < 1e-6);
}

#[test]
fn trace_constrained_diagonal_gives_top_eigenvalue() {
    let p = trace_program(&SymMat::from_diag(&[1.0, 2.0, 3.0]), true);
    let sol = solve(&p, &SolverSettings::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.objective - 3.0).abs() < 1e-5, "{}", sol.objective);
    assert!(cone_violation(&p, &sol.x) <= 1e-7);
}

#[test]
fn inequality_trace_gives_clamped_eigenvalue() {
    let p = trace_program(&SymMat::from_diag(&[-1.0, -2.0]), false);
    let sol = solve(&p, &SolverSettings::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!(sol.objective.abs() < 1e-6);
}

#[test]
fn small_lp_with_free_and_zero_blocks() {
    // max  x0 + 2 x1 - f   s.t.  x0 + x1 + z = 1,  f - x0 = 0.5,  x >= 0, f free, z = 0
    let mut p = ConeProgram::new();
    let x = p.add_block(ConeKind::Nonneg, 2);
    let f = p.add_block(ConeKind::Free, 1);
    let z = p.add_block(ConeKind::Zero, 1);
    p.set_objective(x.start, 1.0);
    p.set_objective(x.start + 1, 2.0);
    p.set_objective(f.start, -1.0);
    p.add_row(vec![(x.start, 1.0), (x.start + 1, 1.0), (z.start, 1.0)], 1.0);
    p.add_row(vec![(f.start, 1.0), (x.start, -1.0)], 0.5);
    let sol = solve(&p, &SolverSettings::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    // x = (0, 1), f = 0.5 -> 1.5
    assert!((sol.objective - 1.5).abs() < 1e-5, "{}", sol.objective);
    assert_eq!(sol.x[z.start], 0.0);
    assert!((sol.x[f.start] - 0.5).abs() < 1e-5);
}

#[test]
fn repeated_indices_are_summed() {
    let mut p = ConeProgram::new();
    let x = p.add_block(ConeKind::Nonneg, 1);
    p.set_objective(x.start, 1.0);
    p.add_row(vec![(x.start, 1.0), (x.start, 1.0)], 1.0);
    let sol = solve(&p, &SolverSettings::default()).unwrap();
    assert!((sol.x[0] - 0.5).abs() < 1e-6);
}

#[test]
fn invalid_program_is_an_error() {
    let mut p = ConeProgram::new();
    p.add_block(ConeKind::Nonneg, 1);
    p.add_row(vec![(5, 1.0)], 1.0);
    assert!(matches!(solve(&p, &SolverSettings::default()), Err(ConicError::InvalidProgram(_))));
}

#[test]
fn iteration_cap_reports_iter_limit() {
    let p = trace_program(&SymMat::from_diag(&[1.0, 2.0, 3.0]), true);
    let s = SolverSettings { max_iter: 2, ..Default::default() };
    let sol = solve(&p, &s).unwrap();
    assert_eq!(sol.status, SolveStatus::IterLimit);
    assert!(sol.max_residual() > s.tol);
}

#[test]
fn reported_residuals_match_recomputation() {
    let mut rng = SplitMix64::new(99);
    for trial in 0..40 {
        let m = 1 + trial % 8;
        let q = SymMat::from_fn(m, |_, _| rng.uniform(-1.0, 1.0));
        let p = trace_program(&q, trial % 2 == 0);
        let settings = SolverSettings::default();
        let sol = solve(&p, &settings).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        let (rp, rd, gap) = recompute(&p, &sol);
        assert!((rp - sol.residual_primal).abs() <= 10.0 * settings.tol);
        assert!((rd - sol.residual_dual).abs() <= 10.0 * settings.tol);
        assert!((gap - sol.residual_gap).abs() <= 10.0 * settings.tol);
    }
}

#[test]
fn objective_scaling_scales_value() {
    let mut rng = SplitMix64::new(5);
    let q = SymMat::from_fn(4, |_, _| rng.uniform(-1.0, 1.0));
    let base = solve(&trace_program(&q, true), &SolverSettings::default()).unwrap();
    for alpha in [0.1, 3.0, 25.0] {
        let s = solve(&trace_program(&q.scaled(alpha), true), &SolverSettings::default()).unwrap();
        assert!((s.objective - alpha * base.objective).abs() <= 1e-6 * (1.0 + alpha));
    }
}

#[test]
fn random_trace_programs_match_eigenvalue() {
    let mut rng = SplitMix64::new(1234);
    for trial in 0..100 {
        let m = rng.range_inclusive(1, 8);
        let q = SymMat::from_fn(m, |_, _| rng.uniform(-1.0, 1.0));
        let eq = trial % 2 == 0;
        let sol = solve(&trace_program(&q, eq), &SolverSettings::default()).unwrap();
        let lmax = linalg::lambda_max(&q).unwrap();
        let want = if eq { lmax } else { lmax.max(0.0) };
        assert!((sol.objective - want).abs() <= 1e-5, "m={m} got {} want {want}", sol.objective);
        assert_eq!(sol.x.len(), svec_len(m) + usize::from(!eq));
    }
}
