//! Infeasible primal-dual path-following method (HKM direction with a
//! Mehrotra predictor-corrector) for programs over nonnegative orthants and
//! PSD cones.
//!
//! The user program is first rewritten in the standard form
//!
//! ```text
//!     minimize  <C, X>   s.t.  <A_i, X> = b_i,   X in R+^l x S+^{m_1} x ...
//! ```
//!
//! where free variables are split into two nonnegative parts, zero-cone
//! variables are dropped, and each row is scaled to unit norm.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use super::program::{residuals, ConeKind, ConeProgram, ConeSolution, Residuals, SolveStatus, SolverSettings};
use super::ConicError;
use crate::linalg::{cholesky_in_place, cholesky_inverse, cholesky_solve, lambda_min_dense, matmul, svec_entry, symmetrize};

/// Entry of a symmetric coefficient matrix: `A[a][b] = A[b][a] = v`, `a <= b`.
#[derive(Debug, Clone, Copy)]
struct Entry {
    a: usize,
    b: usize,
    v: f64,
}

#[derive(Debug, Clone)]
struct StdRow {
    lp: Vec<(usize, f64)>,
    /// (block, entries) with blocks in increasing order
    psd: Vec<(usize, Vec<Entry>)>,
    rhs: f64,
    /// original row index and the factor the row was multiplied by
    orig: usize,
    scale: f64,
}

#[derive(Debug, Clone, Copy)]
enum VarMap {
    Lp(usize),
    Split(usize, usize),
    Psd { block: usize, a: usize, b: usize },
    Fixed,
}

struct StdForm {
    n_lp: usize,
    orders: Vec<usize>,
    rows: Vec<StdRow>,
    c_lp: Vec<f64>,
    c_psd: Vec<Vec<f64>>,
    var_map: Vec<VarMap>,
    num_orig_rows: usize,
    /// rows touching each PSD block: (row, index into row.psd)
    block_rows: Vec<Vec<(usize, usize)>>,
    /// LP columns: (row, coeff)
    lp_cols: Vec<Vec<(usize, f64)>>,
}

#[derive(Hash, PartialEq, Eq, PartialOrd, Ord, Clone, Copy)]
enum Target {
    Lp(usize),
    Psd(usize, usize, usize),
}

impl StdForm {
    fn new(prog: &ConeProgram) -> Self {
        let mut n_lp = 0;
        let mut orders = Vec::new();
        let mut var_map = vec![VarMap::Fixed; prog.num_vars()];
        for block in prog.blocks() {
            match block.kind {
                ConeKind::Zero => {}
                ConeKind::Nonneg => {
                    for j in block.range.clone() {
                        var_map[j] = VarMap::Lp(n_lp);
                        n_lp += 1;
                    }
                }
                ConeKind::Free => {
                    for j in block.range.clone() {
                        var_map[j] = VarMap::Split(n_lp, n_lp + 1);
                        n_lp += 2;
                    }
                }
                ConeKind::Psd(m) => {
                    let k = orders.len();
                    orders.push(m);
                    for (t, j) in block.range.clone().enumerate() {
                        let (a, b) = svec_entry(m, t);
                        var_map[j] = VarMap::Psd { block: k, a, b };
                    }
                }
            }
        }

        // Accumulates a coefficient on an svec / LP variable into standard-form terms.
        let push = |acc: &mut BTreeMap<Target, f64>, j: usize, c: f64| match var_map[j] {
            VarMap::Lp(i) => *acc.entry(Target::Lp(i)).or_insert(0.0) += c,
            VarMap::Split(p, q) => {
                *acc.entry(Target::Lp(p)).or_insert(0.0) += c;
                *acc.entry(Target::Lp(q)).or_insert(0.0) -= c;
            }
            VarMap::Psd { block, a, b } => {
                let v = if a == b { c } else { c / SQRT_2 };
                *acc.entry(Target::Psd(block, a, b)).or_insert(0.0) += v;
            }
            VarMap::Fixed => {}
        };

        let mut rows = Vec::new();
        for (r, row) in prog.rows().iter().enumerate() {
            let mut acc = BTreeMap::new();
            for &(j, c) in &row.coeffs {
                push(&mut acc, j, c);
            }
            let norm_sq: f64 = acc
                .iter()
                .map(|(t, v)| match t {
                    Target::Psd(_, a, b) if a != b => 2.0 * v * v,
                    _ => v * v,
                })
                .sum();
            if norm_sq == 0.0 {
                // nothing left after removing fixed variables
                continue;
            }
            let scale = 1.0 / norm_sq.sqrt();
            let mut lp = Vec::new();
            let mut psd: Vec<(usize, Vec<Entry>)> = Vec::new();
            for (t, v) in acc {
                if v == 0.0 {
                    continue;
                }
                match t {
                    Target::Lp(i) => lp.push((i, v * scale)),
                    Target::Psd(k, a, b) => {
                        let e = Entry { a, b, v: v * scale };
                        match psd.last_mut() {
                            Some((kk, list)) if *kk == k => list.push(e),
                            _ => psd.push((k, vec![e])),
                        }
                    }
                }
            }
            rows.push(StdRow {
                lp,
                psd,
                rhs: row.rhs * scale,
                orig: r,
                scale,
            });
        }

        let mut c_lp = vec![0.0; n_lp];
        let mut c_psd: Vec<Vec<f64>> = orders.iter().map(|&m| vec![0.0; m * m]).collect();
        let mut acc = BTreeMap::new();
        for (j, &c) in prog.objective().iter().enumerate() {
            if c != 0.0 {
                // minimize the negated objective
                push(&mut acc, j, -c);
            }
        }
        for (t, v) in acc {
            match t {
                Target::Lp(i) => c_lp[i] += v,
                Target::Psd(k, a, b) => {
                    let m = orders[k];
                    c_psd[k][a * m + b] += v;
                    if a != b {
                        c_psd[k][b * m + a] += v;
                    }
                }
            }
        }

        let mut block_rows = vec![Vec::new(); orders.len()];
        let mut lp_cols = vec![Vec::new(); n_lp];
        for (i, row) in rows.iter().enumerate() {
            for (pos, (k, _)) in row.psd.iter().enumerate() {
                block_rows[*k].push((i, pos));
            }
            for &(l, v) in &row.lp {
                lp_cols[l].push((i, v));
            }
        }

        StdForm {
            n_lp,
            orders,
            rows,
            c_lp,
            c_psd,
            var_map,
            num_orig_rows: prog.rows().len(),
            block_rows,
            lp_cols,
        }
    }

    fn barrier_degree(&self) -> usize {
        self.n_lp + self.orders.iter().sum::<usize>()
    }

    /// `A(X)` for possibly unsymmetric block matrices.
    fn apply(&self, x_lp: &[f64], xs: &[Vec<f64>]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| {
                let mut s: f64 = row.lp.iter().map(|&(l, v)| v * x_lp[l]).sum();
                for (k, entries) in &row.psd {
                    let m = self.orders[*k];
                    let x = &xs[*k];
                    for e in entries {
                        s += if e.a == e.b {
                            e.v * x[e.a * m + e.a]
                        } else {
                            e.v * (x[e.a * m + e.b] + x[e.b * m + e.a])
                        };
                    }
                }
                s
            })
            .collect()
    }

    /// `A^T y`.
    fn apply_t(&self, y: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let mut lp = vec![0.0; self.n_lp];
        let mut mats: Vec<Vec<f64>> = self.orders.iter().map(|&m| vec![0.0; m * m]).collect();
        for (row, &yi) in self.rows.iter().zip(y) {
            for &(l, v) in &row.lp {
                lp[l] += yi * v;
            }
            for (k, entries) in &row.psd {
                let m = self.orders[*k];
                for e in entries {
                    mats[*k][e.a * m + e.b] += yi * e.v;
                    if e.a != e.b {
                        mats[*k][e.b * m + e.a] += yi * e.v;
                    }
                }
            }
        }
        (lp, mats)
    }

    /// Schur complement `M_ij = <A_i, X A_j S^-1> + sum_l a_il a_jl x_l / s_l`.
    fn schur(&self, x_lp: &[f64], s_lp: &[f64], xs: &[Vec<f64>], s_invs: &[Vec<f64>]) -> Vec<f64> {
        let nr = self.rows.len();
        let mut mat = vec![0.0; nr * nr];
        for (k, &m) in self.orders.iter().enumerate() {
            let x = &xs[k];
            let si = &s_invs[k];
            let mut bmat = vec![0.0; m * m];
            let mut touched = vec![false; m];
            let mut g = vec![0.0; m * m];
            for &(j, pos_j) in &self.block_rows[k] {
                // B = A_j S^-1, nonzero only on the rows A_j touches
                let entries = &self.rows[j].psd[pos_j].1;
                let mut rows_used = Vec::new();
                for e in entries {
                    for (r, src) in [(e.a, e.b), (e.b, e.a)] {
                        if !touched[r] {
                            touched[r] = true;
                            rows_used.push(r);
                        }
                        let dst = &mut bmat[r * m..(r + 1) * m];
                        let s_row = &si[src * m..(src + 1) * m];
                        for (d, s) in dst.iter_mut().zip(s_row) {
                            *d += e.v * s;
                        }
                        if e.a == e.b {
                            break;
                        }
                    }
                }
                // G = X B
                g.iter_mut().for_each(|v| *v = 0.0);
                for &r in &rows_used {
                    let b_row = &bmat[r * m..(r + 1) * m];
                    for p in 0..m {
                        let xpr = x[p * m + r];
                        if xpr == 0.0 {
                            continue;
                        }
                        let g_row = &mut g[p * m..(p + 1) * m];
                        for (gv, bv) in g_row.iter_mut().zip(b_row) {
                            *gv += xpr * bv;
                        }
                    }
                }
                for &r in &rows_used {
                    touched[r] = false;
                    bmat[r * m..(r + 1) * m].iter_mut().for_each(|v| *v = 0.0);
                }
                for &(i, pos_i) in &self.block_rows[k] {
                    let mut s = 0.0;
                    for e in &self.rows[i].psd[pos_i].1 {
                        s += if e.a == e.b {
                            e.v * g[e.a * m + e.a]
                        } else {
                            e.v * (g[e.a * m + e.b] + g[e.b * m + e.a])
                        };
                    }
                    mat[i * nr + j] += s;
                }
            }
        }
        for (l, col) in self.lp_cols.iter().enumerate() {
            let d = x_lp[l] / s_lp[l];
            for &(i, vi) in col {
                for &(j, vj) in col {
                    mat[i * nr + j] += d * vi * vj;
                }
            }
        }
        symmetrize(&mut mat, nr);
        mat
    }
}

#[derive(Clone)]
struct Iterate {
    x_lp: Vec<f64>,
    s_lp: Vec<f64>,
    xs: Vec<Vec<f64>>,
    ss: Vec<Vec<f64>>,
    y: Vec<f64>,
}

struct Direction {
    dy: Vec<f64>,
    dx_lp: Vec<f64>,
    ds_lp: Vec<f64>,
    dxs: Vec<Vec<f64>>,
    dss: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Largest `alpha` with `X + alpha dX` PSD, given the Cholesky factor of `X`.
fn max_step_psd(l: &[f64], dx: &[f64], m: usize) -> f64 {
    // W = L^-1 dX L^-T
    let mut t = dx.to_vec();
    // solve L T = dX column by column
    for col in 0..m {
        for i in 0..m {
            let mut s = t[i * m + col];
            for k in 0..i {
                s -= l[i * m + k] * t[k * m + col];
            }
            t[i * m + col] = s / l[i * m + i];
        }
    }
    // W = L^-1 T^T
    let mut w = vec![0.0; m * m];
    for col in 0..m {
        for i in 0..m {
            let mut s = t[col * m + i];
            for k in 0..i {
                s -= l[i * m + k] * w[k * m + col];
            }
            w[i * m + col] = s / l[i * m + i];
        }
    }
    symmetrize(&mut w, m);
    let lmin = lambda_min_dense(&mut w, m);
    if lmin < 0.0 {
        -1.0 / lmin
    } else {
        f64::INFINITY
    }
}

fn max_step_lp(x: &[f64], dx: &[f64]) -> f64 {
    x.iter()
        .zip(dx)
        .filter(|(_, d)| **d < 0.0)
        .map(|(v, d)| -v / d)
        .fold(f64::INFINITY, f64::min)
}

struct Factors {
    lx: Vec<Vec<f64>>,
    ls: Vec<Vec<f64>>,
    s_inv: Vec<Vec<f64>>,
    schur: Vec<f64>,
}

pub(crate) fn solve(prog: &ConeProgram, settings: &SolverSettings) -> Result<ConeSolution, ConicError> {
    prog.validate()?;
    settings.validate()?;
    let sf = StdForm::new(prog);
    let nr = sf.rows.len();
    let nu = sf.barrier_degree();

    let to_original = |it: &Iterate| -> (Vec<f64>, Vec<f64>) {
        let x = sf
            .var_map
            .iter()
            .map(|vm| match *vm {
                VarMap::Lp(i) => it.x_lp[i],
                VarMap::Split(p, q) => it.x_lp[p] - it.x_lp[q],
                VarMap::Psd { block, a, b } => {
                    let m = sf.orders[block];
                    let v = it.xs[block][a * m + b];
                    if a == b {
                        v
                    } else {
                        SQRT_2 * v
                    }
                }
                VarMap::Fixed => 0.0,
            })
            .collect();
        let mut w = vec![0.0; sf.num_orig_rows];
        for (row, yi) in sf.rows.iter().zip(&it.y) {
            w[row.orig] = -yi * row.scale;
        }
        (x, w)
    };
    let finish = |it: &Iterate, status: SolveStatus, res: Residuals, iterations: usize| {
        let (x, dual) = to_original(it);
        ConeSolution {
            status,
            x,
            dual,
            objective: res.primal_objective,
            dual_objective: res.dual_objective,
            residual_primal: res.primal,
            residual_dual: res.dual,
            residual_gap: res.gap,
            iterations,
        }
    };

    // starting point
    let b: Vec<f64> = sf.rows.iter().map(|r| r.rhs).collect();
    let mut it = {
        let start_scale = |n: usize, block_norm: &dyn Fn(&StdRow) -> f64, c_norm: f64| {
            let nf = n as f64;
            let mut xi: f64 = 10.0f64.max(nf.sqrt());
            let mut eta: f64 = 10.0f64.max(nf.sqrt()).max(c_norm);
            for row in &sf.rows {
                let an = block_norm(row);
                xi = xi.max(nf * (1.0 + row.rhs.abs()) / (1.0 + an));
                eta = eta.max(an);
            }
            (xi, eta)
        };
        let lp_norm = |row: &StdRow| norm(&row.lp.iter().map(|p| p.1).collect::<Vec<_>>());
        let (xi_lp, eta_lp) = start_scale(sf.n_lp, &lp_norm, norm(&sf.c_lp));
        let mut xs = Vec::new();
        let mut ss = Vec::new();
        for (k, &m) in sf.orders.iter().enumerate() {
            let blk_norm = |row: &StdRow| {
                row.psd
                    .iter()
                    .filter(|(kk, _)| *kk == k)
                    .flat_map(|(_, es)| es.iter())
                    .map(|e| if e.a == e.b { e.v * e.v } else { 2.0 * e.v * e.v })
                    .sum::<f64>()
                    .sqrt()
            };
            let (xi, eta) = start_scale(m, &blk_norm, norm(&sf.c_psd[k]));
            let mut x = vec![0.0; m * m];
            let mut s = vec![0.0; m * m];
            for i in 0..m {
                x[i * m + i] = xi;
                s[i * m + i] = eta;
            }
            xs.push(x);
            ss.push(s);
        }
        Iterate {
            x_lp: vec![xi_lp; sf.n_lp],
            s_lp: vec![eta_lp; sf.n_lp],
            xs,
            ss,
            y: vec![0.0; nr],
        }
    };

    let orig_residuals = |it: &Iterate| -> Result<Residuals, ConicError> {
        let (x, w) = to_original(it);
        residuals(prog, &x, &w)
    };

    if nu == 0 {
        let res = orig_residuals(&it)?;
        let status = if res.max() <= settings.tol {
            SolveStatus::Optimal
        } else {
            SolveStatus::IterLimit
        };
        return Ok(finish(&it, status, res, 0));
    }

    let mut best: Option<(Iterate, Residuals)> = None;
    let mut prev_alpha: f64 = 1.0;
    let mut stalls = 0;
    let mut iter = 0;
    while iter < settings.max_iter {
        let res = match orig_residuals(&it) {
            Ok(r) => r,
            Err(_) => break,
        };
        if !res.max().is_finite() {
            let (bi, br) = best.unwrap_or((it.clone(), res));
            return Ok(finish(&bi, SolveStatus::NumericalFailure, br, iter));
        }
        if best.as_ref().map_or(true, |(_, br)| res.max() < br.max()) {
            best = Some((it.clone(), res));
        }
        if settings.verbose {
            eprintln!(
                "ipm {iter:4}  pobj {:+.9e}  dobj {:+.9e}  rp {:.2e}  rd {:.2e}  gap {:.2e}",
                res.primal_objective, res.dual_objective, res.primal, res.dual, res.gap
            );
        }
        if res.max() <= settings.tol {
            return Ok(finish(&it, SolveStatus::Optimal, res, iter));
        }

        // residuals of the standard form
        let ax = sf.apply(&it.x_lp, &it.xs);
        let r_p: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let (aty_lp, aty) = sf.apply_t(&it.y);
        let r_d_lp: Vec<f64> = (0..sf.n_lp).map(|l| sf.c_lp[l] - aty_lp[l] - it.s_lp[l]).collect();
        let r_d: Vec<Vec<f64>> = (0..sf.orders.len())
            .map(|k| {
                sf.c_psd[k]
                    .iter()
                    .zip(&aty[k])
                    .zip(&it.ss[k])
                    .map(|((c, a), s)| c - a - s)
                    .collect()
            })
            .collect();
        let mu = (dot(&it.x_lp, &it.s_lp)
            + it.xs.iter().zip(&it.ss).map(|(x, s)| dot(x, s)).sum::<f64>())
            / nu as f64;

        let factors = match factorize(&sf, &it) {
            Some(f) => f,
            None => break,
        };

        let direction = |h_lp: &[f64], h: &[Vec<f64>]| -> Direction {
            // G = H - X R_d S^-1 ; g = h - (x/s) r_d
            let g: Vec<Vec<f64>> = (0..sf.orders.len())
                .map(|k| {
                    let m = sf.orders[k];
                    let xr = matmul(&it.xs[k], &r_d[k], m);
                    let xrs = matmul(&xr, &factors.s_inv[k], m);
                    h[k].iter().zip(&xrs).map(|(a, b)| a - b).collect()
                })
                .collect();
            let g_lp: Vec<f64> = (0..sf.n_lp)
                .map(|l| h_lp[l] - it.x_lp[l] / it.s_lp[l] * r_d_lp[l])
                .collect();
            let ag = sf.apply(&g_lp, &g);
            let mut dy: Vec<f64> = r_p.iter().zip(&ag).map(|(a, b)| a - b).collect();
            cholesky_solve(&factors.schur, nr, &mut dy);
            let (at_lp, at) = sf.apply_t(&dy);
            let ds_lp: Vec<f64> = r_d_lp.iter().zip(&at_lp).map(|(a, b)| a - b).collect();
            let dx_lp: Vec<f64> = (0..sf.n_lp)
                .map(|l| h_lp[l] - it.x_lp[l] / it.s_lp[l] * ds_lp[l])
                .collect();
            let mut dss = Vec::new();
            let mut dxs = Vec::new();
            for k in 0..sf.orders.len() {
                let m = sf.orders[k];
                let ds: Vec<f64> = r_d[k].iter().zip(&at[k]).map(|(a, b)| a - b).collect();
                let xds = matmul(&it.xs[k], &ds, m);
                let xdss = matmul(&xds, &factors.s_inv[k], m);
                let mut dx: Vec<f64> = h[k].iter().zip(&xdss).map(|(a, b)| a - b).collect();
                symmetrize(&mut dx, m);
                dxs.push(dx);
                dss.push(ds);
            }
            Direction { dy, dx_lp, ds_lp, dxs, dss }
        };

        let steps = |d: &Direction| -> (f64, f64) {
            let mut ap = max_step_lp(&it.x_lp, &d.dx_lp);
            let mut ad = max_step_lp(&it.s_lp, &d.ds_lp);
            for k in 0..sf.orders.len() {
                let m = sf.orders[k];
                ap = ap.min(max_step_psd(&factors.lx[k], &d.dxs[k], m));
                ad = ad.min(max_step_psd(&factors.ls[k], &d.dss[k], m));
            }
            (ap, ad)
        };

        // predictor
        let h_lp: Vec<f64> = it.x_lp.iter().map(|v| -v).collect();
        let h: Vec<Vec<f64>> = it.xs.iter().map(|x| x.iter().map(|v| -v).collect()).collect();
        let aff = direction(&h_lp, &h);
        let (ap, ad) = steps(&aff);
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let mut mu_aff = 0.0;
        for l in 0..sf.n_lp {
            mu_aff += (it.x_lp[l] + ap * aff.dx_lp[l]) * (it.s_lp[l] + ad * aff.ds_lp[l]);
        }
        for k in 0..sf.orders.len() {
            for (idx, (x, s)) in it.xs[k].iter().zip(&it.ss[k]).enumerate() {
                mu_aff += (x + ap * aff.dxs[k][idx]) * (s + ad * aff.dss[k][idx]);
            }
        }
        mu_aff /= nu as f64;
        let expon = if mu > 1e-6 { (3.0 * ap.min(ad).powi(2)).max(1.0) } else { 3.0 };
        let sigma = (mu_aff / mu).max(0.0).powf(expon).min(1.0);

        // corrector
        let h_lp: Vec<f64> = (0..sf.n_lp)
            .map(|l| sigma * mu / it.s_lp[l] - it.x_lp[l] - aff.dx_lp[l] * aff.ds_lp[l] / it.s_lp[l])
            .collect();
        let h: Vec<Vec<f64>> = (0..sf.orders.len())
            .map(|k| {
                let m = sf.orders[k];
                let dxds = matmul(&aff.dxs[k], &aff.dss[k], m);
                let second = matmul(&dxds, &factors.s_inv[k], m);
                (0..m * m)
                    .map(|idx| sigma * mu * factors.s_inv[k][idx] - it.xs[k][idx] - second[idx])
                    .collect()
            })
            .collect();
        let dir = direction(&h_lp, &h);
        let (ap_max, ad_max) = steps(&dir);
        let gamma = 0.9 + 0.09 * prev_alpha;
        let ap = (gamma * ap_max).min(1.0);
        let ad = (gamma * ad_max).min(1.0);
        prev_alpha = ap.min(ad);

        for l in 0..sf.n_lp {
            it.x_lp[l] += ap * dir.dx_lp[l];
            it.s_lp[l] += ad * dir.ds_lp[l];
        }
        for k in 0..sf.orders.len() {
            for idx in 0..it.xs[k].len() {
                it.xs[k][idx] += ap * dir.dxs[k][idx];
                it.ss[k][idx] += ad * dir.dss[k][idx];
            }
        }
        for (yi, d) in it.y.iter_mut().zip(&dir.dy) {
            *yi += ad * d;
        }
        iter += 1;
        if ap.max(ad) < 1e-10 {
            stalls += 1;
            if stalls >= 3 {
                break;
            }
        } else {
            stalls = 0;
        }
    }
    let (bi, br) = match best {
        Some(pair) => pair,
        None => {
            let r = orig_residuals(&it)?;
            (it, r)
        }
    };
    let status = if br.max() <= settings.tol {
        SolveStatus::Optimal
    } else {
        SolveStatus::IterLimit
    };
    Ok(finish(&bi, status, br, iter))
}

fn factorize(sf: &StdForm, it: &Iterate) -> Option<Factors> {
    let mut lx = Vec::new();
    let mut ls = Vec::new();
    let mut s_inv = Vec::new();
    for (k, &m) in sf.orders.iter().enumerate() {
        let mut l = it.xs[k].clone();
        if !cholesky_in_place(&mut l, m) {
            return None;
        }
        lx.push(l);
        let mut l = it.ss[k].clone();
        if !cholesky_in_place(&mut l, m) {
            return None;
        }
        s_inv.push(cholesky_inverse(&l, m));
        ls.push(l);
    }
    if it.x_lp.iter().chain(&it.s_lp).any(|v| !(*v > 0.0)) {
        return None;
    }
    let nr = sf.rows.len();
    let base = sf.schur(&it.x_lp, &it.s_lp, &it.xs, &s_inv);
    let max_diag = (0..nr).map(|i| base[i * nr + i]).fold(0.0f64, f64::max);
    let mut reg = 0.0;
    for _ in 0..8 {
        let mut m = base.clone();
        for i in 0..nr {
            m[i * nr + i] += reg;
        }
        if cholesky_in_place(&mut m, nr) {
            return Some(Factors { lx, ls, s_inv, schur: m });
        }
        reg = if reg == 0.0 { 1e-14 * max_diag.max(1e-300) } else { reg * 100.0 };
    }
    None
}
