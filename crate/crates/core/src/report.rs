//! Bound comparison reports, the reference-example table and the p sweep.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::conic::{SolveStatus, SolverSettings};
use crate::instances::{example_q, random_unit_symmetrized};
use crate::linalg::{lambda_max, SymMat};
use crate::oracle::{qpl1_exact_small, qpl2l1_heuristic, qplp_lower_bound, OracleError, MAX_EXACT_ORDER};
use crate::relax::{
    bound_b1_from, bound_b2, certify_new_eq, solve_relaxation, NewEqCertificate, RelaxError, RelaxationKind,
    RelaxationSolution,
};
use crate::rng::SplitMix64;

/// Restarts used for the sphere/l1 heuristic inside reports.
pub const HEURISTIC_RESTARTS: usize = 100;
/// Largest order accepted by [`sweep_p`].
pub const MAX_SWEEP_ORDER: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReportError {
    #[error(transparent)]
    Relax(#[from] RelaxError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid size: {0}")]
    Size(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundStatus {
    Optimal,
    IterLimit,
    /// Closed form, no solver involved.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundEntry {
    pub name: String,
    pub value: f64,
    pub status: BoundStatus,
    pub iterations: usize,
    pub residual_primal: f64,
    pub residual_dual: f64,
    pub residual_gap: f64,
    pub seconds: f64,
}

impl BoundEntry {
    pub fn from_solution(sol: &RelaxationSolution) -> Self {
        let s = &sol.solution;
        BoundEntry {
            name: sol.kind.name().to_string(),
            value: sol.value,
            status: match s.status {
                SolveStatus::Optimal => BoundStatus::Optimal,
                _ => BoundStatus::IterLimit,
            },
            iterations: s.iterations,
            residual_primal: s.residual_primal,
            residual_dual: s.residual_dual,
            residual_gap: s.residual_gap,
            seconds: sol.elapsed.as_secs_f64(),
        }
    }

    fn closed_form(name: &str, value: f64, started: Instant) -> Self {
        BoundEntry {
            name: name.to_string(),
            value,
            status: BoundStatus::Exact,
            iterations: 0,
            residual_primal: 0.0,
            residual_dual: 0.0,
            residual_gap: 0.0,
            seconds: started.elapsed().as_secs_f64(),
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.residual_primal.max(self.residual_dual).max(self.residual_gap)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundEntry {
    pub name: String,
    pub value: f64,
    pub witness: Vec<f64>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingCheck {
    /// e.g. `dnn-l2l1 <= lambda-max`
    pub relation: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub instance: String,
    pub n: usize,
    pub k: Option<f64>,
    pub p: Option<f64>,
    pub lambda_max: f64,
    pub bounds: Vec<BoundEntry>,
    pub lower_bounds: Vec<LowerBoundEntry>,
    /// Present when `k` is given: whether the equality-form bound is valid.
    pub new_eq_certificate: Option<NewEqCertificate>,
    /// Slack allowed in the ordering checks.
    pub check_tol: f64,
    pub orderings: Vec<OrderingCheck>,
}

impl BoundReport {
    pub fn bound(&self, name: &str) -> Option<f64> {
        self.bounds.iter().find(|b| b.name == name).map(|b| b.value)
    }

    pub fn lower_bound(&self, name: &str) -> Option<f64> {
        self.lower_bounds.iter().find(|b| b.name == name).map(|b| b.value)
    }

    pub fn all_orderings_hold(&self) -> bool {
        self.orderings.iter().all(|o| o.holds)
    }

    pub fn all_optimal(&self) -> bool {
        self.bounds.iter().all(|b| b.status != BoundStatus::IterLimit)
    }
}

/// Tolerance for comparing solved values: twice the worst reported
/// residual, never below 1e-5.
pub fn ordering_tol<'a>(entries: impl IntoIterator<Item = &'a BoundEntry>) -> f64 {
    entries.into_iter().fold(1e-5f64, |acc, b| acc.max(2.0 * b.max_residual()))
}

/// Options for [`compare`].
#[derive(Debug, Clone)]
pub struct CompareOptions {
    pub k: Option<f64>,
    pub p: Option<f64>,
    pub settings: SolverSettings,
    pub seed: u64,
}

/// Compute every bound that applies to `q` given the optional `k` and `p`.
pub fn compare(instance: &str, q: &SymMat, opts: &CompareOptions) -> Result<BoundReport, ReportError> {
    let n = q.order();
    // validate parameters before any solve
    if let Some(k) = opts.k {
        RelaxationKind::DnnL2L1 { k }.validate(n)?;
    }
    if let Some(p) = opts.p {
        RelaxationKind::DnnLp { p }.validate(n)?;
    }
    if n == 0 {
        return Err(RelaxError::Precondition("Q must have order at least 1".into()).into());
    }
    q.check_finite().map_err(RelaxError::from)?;

    let settings = &opts.settings;
    let lmax = lambda_max(q).map_err(RelaxError::from)?;
    let mut bounds = Vec::new();
    let mut lower = Vec::new();
    let mut certificate = None;
    // (lhs name, rhs name) pairs checked as lhs <= rhs
    let mut relations: Vec<(String, String)> = Vec::new();

    let solve = |kind| solve_relaxation(kind, q, settings);

    let dnn_l1 = solve(RelaxationKind::DnnL1)?;
    let dnn_l1_new = solve(RelaxationKind::DnnL1New)?;
    bounds.push(BoundEntry::from_solution(&dnn_l1));
    bounds.push(BoundEntry::from_solution(&dnn_l1_new));
    relations.push(("dnn-l1-new".into(), "dnn-l1".into()));
    if n <= MAX_EXACT_ORDER {
        let t = Instant::now();
        let exact = qpl1_exact_small(q)?;
        lower.push(LowerBoundEntry {
            name: "qpl1-exact".into(),
            value: exact.value,
            witness: exact.maximizer,
            seconds: t.elapsed().as_secs_f64(),
        });
        relations.push(("qpl1-exact".into(), "dnn-l1-new".into()));
    }

    if let Some(k) = opts.k {
        let sdp_x = solve(RelaxationKind::SdpX { k })?;
        let l2l1 = solve(RelaxationKind::DnnL2L1 { k })?;
        let le = solve(RelaxationKind::DnnL2L1NewLe { k })?;
        let eq = solve(RelaxationKind::DnnL2L1NewEq { k })?;
        for s in [&sdp_x, &l2l1, &le, &eq] {
            bounds.push(BoundEntry::from_solution(s));
        }
        let t = Instant::now();
        let h = qpl2l1_heuristic(q, k, HEURISTIC_RESTARTS, opts.seed)?;
        lower.push(LowerBoundEntry {
            name: "qpl2l1-heuristic".into(),
            value: h.value,
            witness: h.maximizer,
            seconds: t.elapsed().as_secs_f64(),
        });
        let tol = ordering_tol(&bounds);
        let cert = certify_new_eq(q, k, l2l1.value, tol * (1.0 + lmax.abs()))?;
        certificate = Some(cert);
        for (a, b) in [
            ("dnn-l2l1", "sdp-x"),
            ("dnn-l2l1", "lambda-max"),
            ("dnn-l2l1-new-le", "lambda-max"),
            ("dnn-l2l1-new-eq", "lambda-max"),
            ("qpl2l1-heuristic", "dnn-l2l1"),
            ("qpl2l1-heuristic", "dnn-l2l1-new-le"),
            ("qpl2l1-heuristic", "sdp-x"),
        ] {
            relations.push((a.into(), b.into()));
        }
        if cert.certified {
            relations.push(("qpl2l1-heuristic".into(), "dnn-l2l1-new-eq".into()));
        }
    }

    if let Some(p) = opts.p {
        let t = Instant::now();
        let b2 = bound_b2(q)?;
        bounds.push(BoundEntry::closed_form("b2", b2, t));
        let t = Instant::now();
        let b1 = bound_b1_from(dnn_l1.value, n, p);
        let mut b1_entry = BoundEntry::closed_form("b1", b1, t);
        // inherits the accuracy of the DNN_L1 solve it scales
        b1_entry.residual_primal = dnn_l1.solution.residual_primal;
        b1_entry.residual_dual = dnn_l1.solution.residual_dual;
        b1_entry.residual_gap = dnn_l1.solution.residual_gap;
        bounds.push(b1_entry);
        let lp = solve(RelaxationKind::DnnLp { p })?;
        bounds.push(BoundEntry::from_solution(&lp));
        let t = Instant::now();
        let r = qplp_lower_bound(q, p, &lp.matrix)?;
        lower.push(LowerBoundEntry {
            name: "qplp-rounding".into(),
            value: r.value,
            witness: r.maximizer,
            seconds: t.elapsed().as_secs_f64(),
        });
        for (a, b) in [("dnn-lp", "b1"), ("dnn-lp", "b2"), ("qplp-rounding", "dnn-lp")] {
            relations.push((a.into(), b.into()));
        }
    }

    let check_tol = ordering_tol(&bounds);
    let lookup = |name: &str| -> f64 {
        if name == "lambda-max" {
            return lmax;
        }
        bounds
            .iter()
            .find(|b| b.name == name)
            .map(|b| b.value)
            .or_else(|| lower.iter().find(|b| b.name == name).map(|b| b.value))
            .expect("relation refers to a computed value")
    };
    let orderings = relations
        .iter()
        .map(|(a, b)| {
            let (lhs, rhs) = (lookup(a), lookup(b));
            OrderingCheck {
                relation: format!("{a} <= {b}"),
                lhs,
                rhs,
                holds: lhs <= rhs + check_tol,
            }
        })
        .collect();

    Ok(BoundReport {
        instance: instance.to_string(),
        n,
        k: opts.k,
        p: opts.p,
        lambda_max: lmax,
        bounds,
        lower_bounds: lower,
        new_eq_certificate: certificate,
        check_tol,
        orderings,
    })
}

pub fn render_text(r: &BoundReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "instance: {}", r.instance);
    let _ = write!(out, "n = {}", r.n);
    if let Some(k) = r.k {
        let _ = write!(out, ", k = {k}");
    }
    if let Some(p) = r.p {
        let _ = write!(out, ", p = {p}");
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "lambda_max = {}", r.lambda_max);
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<18} {:>22} {:>10} {:>6} {:>10} {:>10} {:>10} {:>9}",
        "bound", "value", "status", "iter", "res_p", "res_d", "gap", "seconds"
    );
    for b in &r.bounds {
        let _ = writeln!(
            out,
            "{:<18} {:>22} {:>10} {:>6} {:>10.2e} {:>10.2e} {:>10.2e} {:>9.3}",
            b.name,
            b.value,
            format!("{:?}", b.status),
            b.iterations,
            b.residual_primal,
            b.residual_dual,
            b.residual_gap,
            b.seconds
        );
    }
    if !r.lower_bounds.is_empty() {
        let _ = writeln!(out);
        for l in &r.lower_bounds {
            let _ = writeln!(out, "lower {:<18} {:>22}  witness {:?}", l.name, l.value, l.witness);
        }
    }
    if let Some(c) = &r.new_eq_certificate {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "dnn-l2l1-new-eq certified: {} (dnn-l2l1 < lambda_max: {}, eigenvector l1 > sqrt(k): {})",
            if c.certified { "yes" } else { "NO" },
            c.dnn_l2l1_below_lambda,
            match c.eigenvector_condition {
                Some(b) => b.to_string(),
                None => "n/a (top eigenvalue not simple)".to_string(),
            }
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "orderings (tol {:e}):", r.check_tol);
    for o in &r.orderings {
        let _ = writeln!(
            out,
            "  [{}] {}  ({} vs {})",
            if o.holds { "ok" } else { "FAIL" },
            o.relation,
            o.lhs,
            o.rhs
        );
    }
    out
}

/// One `kind,name,value` row per bound, lower bound and `lambda_max`.
pub fn render_csv(r: &BoundReport) -> String {
    let mut out = String::from("kind,name,value\n");
    let _ = writeln!(out, "spectral,lambda-max,{:.15e}", r.lambda_max);
    for b in &r.bounds {
        let _ = writeln!(out, "upper,{},{:.15e}", b.name, b.value);
    }
    for l in &r.lower_bounds {
        let _ = writeln!(out, "lower,{},{:.15e}", l.name, l.value);
    }
    out
}

/// A row of the reference-example table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleRow {
    pub example: u8,
    pub quantity: String,
    pub computed: f64,
    pub reference: f64,
    pub abs_error: f64,
    pub status: BoundStatus,
    pub max_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExamplesReport {
    pub tol: f64,
    pub rows: Vec<ExampleRow>,
    /// `v(dnn-l2l1-new-eq, k=5) < lambda_max` on the reference matrix.
    pub strict_gap: f64,
    pub strict_gap_pass: bool,
    pub new_eq_certificate: NewEqCertificate,
}

impl ExamplesReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass) && self.strict_gap_pass
    }
}

/// Reference values on the 6 x 6 example matrix, printed to 4-5 digits.
pub const EXAMPLE_VALUES: [(u8, &str, f64); 6] = [
    (1, "dnn-l1", 2.0487),
    (1, "dnn-l1-new", 2.0186),
    (2, "sdp-x(k=3)", 6.3104),
    (2, "dnn-l2l1(k=3)", 6.0964),
    (2, "dnn-l2l1-new-le(k=3)", 5.9962),
    (3, "dnn-l2l1-new-eq(k=5)", 7.048),
];
pub const EXAMPLE_LAMBDA_MAX: f64 = 7.0857;

/// Solve the reference examples and compare against their printed values
/// at absolute tolerance `tol`.
pub fn run_examples(tol: f64, settings: &SolverSettings) -> Result<ExamplesReport, ReportError> {
    let q = example_q();
    let kinds = [
        RelaxationKind::DnnL1,
        RelaxationKind::DnnL1New,
        RelaxationKind::SdpX { k: 3.0 },
        RelaxationKind::DnnL2L1 { k: 3.0 },
        RelaxationKind::DnnL2L1NewLe { k: 3.0 },
        RelaxationKind::DnnL2L1NewEq { k: 5.0 },
    ];
    let mut rows = Vec::new();
    let mut new_eq_value = f64::NAN;
    for (kind, (example, quantity, reference)) in kinds.into_iter().zip(EXAMPLE_VALUES) {
        let sol = solve_relaxation(kind, &q, settings)?;
        let entry = BoundEntry::from_solution(&sol);
        let abs_error = (sol.value - reference).abs();
        if matches!(kind, RelaxationKind::DnnL2L1NewEq { .. }) {
            new_eq_value = sol.value;
        }
        rows.push(ExampleRow {
            example,
            quantity: quantity.to_string(),
            computed: sol.value,
            reference,
            abs_error,
            status: entry.status,
            max_residual: entry.max_residual(),
            pass: sol.is_optimal() && abs_error <= tol,
        });
    }
    let lmax = lambda_max(&q).map_err(RelaxError::from)?;
    let err = (lmax - EXAMPLE_LAMBDA_MAX).abs();
    rows.push(ExampleRow {
        example: 3,
        quantity: "lambda-max".into(),
        computed: lmax,
        reference: EXAMPLE_LAMBDA_MAX,
        abs_error: err,
        status: BoundStatus::Exact,
        max_residual: 0.0,
        pass: err <= tol,
    });
    let l2l1 = solve_relaxation(RelaxationKind::DnnL2L1 { k: 5.0 }, &q, settings)?;
    let margin = ordering_tol([&BoundEntry::from_solution(&l2l1)]) * (1.0 + lmax.abs());
    let cert = certify_new_eq(&q, 5.0, l2l1.value, margin)?;
    let strict_gap = lmax - new_eq_value;
    Ok(ExamplesReport {
        tol,
        rows,
        strict_gap,
        strict_gap_pass: strict_gap > 0.0,
        new_eq_certificate: cert,
    })
}

pub fn render_examples(r: &ExamplesReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<3} {:<22} {:>14} {:>10} {:>10} {:>10} {:>6}",
        "ex", "quantity", "computed", "reference", "abs_err", "status", "result"
    );
    for row in &r.rows {
        let _ = writeln!(
            out,
            "{:<3} {:<22} {:>14.6} {:>10} {:>10.2e} {:>10} {:>6}",
            row.example,
            row.quantity,
            row.computed,
            row.reference,
            row.abs_error,
            format!("{:?}", row.status),
            if row.pass { "PASS" } else { "FAIL" }
        );
        if row.status == BoundStatus::IterLimit {
            let _ = writeln!(out, "    iteration limit reached, max residual {:.2e}", row.max_residual);
        }
    }
    let _ = writeln!(
        out,
        "3   dnn-l2l1-new-eq(k=5) < lambda-max: gap {:.6} {:>6}",
        r.strict_gap,
        if r.strict_gap_pass { "PASS" } else { "FAIL" }
    );
    let _ = writeln!(
        out,
        "3   dnn-l2l1-new-eq(k=5) certified as an upper bound: {}",
        if r.new_eq_certificate.certified { "yes" } else { "no" }
    );
    let _ = writeln!(out, "tolerance {:e}: {}", r.tol, if r.all_pass() { "all pass" } else { "FAILURES" });
    out
}

/// Parse `START:STEP:END` into grid points, all strictly inside `(1, 2)`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, ReportError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(ReportError::Grid(format!("'{text}' is not START:STEP:END")));
    }
    let mut vals = [0.0; 3];
    for (v, (part, field)) in vals.iter_mut().zip(parts.iter().zip(["START", "STEP", "END"])) {
        *v = part
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| ReportError::Grid(format!("{field} '{part}' is not a number")))?;
    }
    let [start, step, end] = vals;
    if step <= 0.0 {
        return Err(ReportError::Grid(format!("STEP must be positive, got {step}")));
    }
    if end < start {
        return Err(ReportError::Grid(format!("END {end} is below START {start}")));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    let grid: Vec<f64> = (0..count)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect();
    if let Some(bad) = grid.iter().find(|&&p| !(p > 1.0 && p < 2.0)) {
        return Err(ReportError::Grid(format!("p = {bad} lies outside (1, 2)")));
    }
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub lower: f64,
    pub dnn_lp: f64,
    pub b1: f64,
    pub b2: f64,
    /// `lower <= dnn_lp <= min(b1, b2)` up to the ordering tolerance.
    pub sandwich: bool,
    pub optimal: bool,
}

/// For one seeded random matrix with entries in `[0, 1)`, compute the lp
/// bounds at every grid point.
pub fn sweep_p(n: usize, seed: u64, grid: &[f64], settings: &SolverSettings) -> Result<Vec<SweepRow>, ReportError> {
    if n == 0 || n > MAX_SWEEP_ORDER {
        return Err(ReportError::Size(format!("n must be in 1..={MAX_SWEEP_ORDER}, got {n}")));
    }
    let q = random_unit_symmetrized(&mut SplitMix64::new(seed), n);
    let dnn_l1 = solve_relaxation(RelaxationKind::DnnL1, &q, settings)?;
    let l1_entry = BoundEntry::from_solution(&dnn_l1);
    let b2 = bound_b2(&q)?;
    grid.iter()
        .map(|&p| {
            let lp = solve_relaxation(RelaxationKind::DnnLp { p }, &q, settings)?;
            let lower = qplp_lower_bound(&q, p, &lp.matrix)?.value;
            let b1 = bound_b1_from(dnn_l1.value, n, p);
            let tol = ordering_tol([&l1_entry, &BoundEntry::from_solution(&lp)]);
            Ok(SweepRow {
                p,
                lower,
                dnn_lp: lp.value,
                b1,
                b2,
                sandwich: lower <= lp.value + tol && lp.value <= b1.min(b2) + tol,
                optimal: lp.is_optimal() && dnn_l1.is_optimal(),
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("p,lower,dnn_lp,b1,b2\n");
    for r in rows {
        let _ = writeln!(out, "{},{:.15e},{:.15e},{:.15e},{:.15e}", r.p, r.lower, r.dnn_lp, r.b1, r.b2);
    }
    out
}
