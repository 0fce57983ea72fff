//! Ground truth and lower-bound witnesses: exact enumeration for small
//! l1-ball problems, a multi-start ascent for the sphere/l1 problem, and the
//! eigenvector rounding for lp balls.

use std::cmp::Ordering;

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{eig_sym, lu_solve, LinalgError, SymMat};
use crate::relax::{extract_x, lift_qtilde};
use crate::rng::SplitMix64;

/// Largest order accepted by [`qpl1_exact_small`].
pub const MAX_EXACT_ORDER: usize = 8;

const HEURISTIC_ITERS: usize = 500;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("exact enumeration supports n <= {max}, got n = {n}")]
    TooLarge { n: usize, max: usize },
    #[error("k = {k} is outside [1, n] = [1, {n}]")]
    KOutOfRange { k: f64, n: usize },
    #[error("p = {0} must satisfy 1 < p < 2")]
    POutOfRange(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("matrix error: {0}")]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OracleMethod {
    BruteForce,
    MultiStart,
    Rounding,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub value: f64,
    /// Feasible point in the original `n`-dimensional space.
    pub maximizer: Vec<f64>,
    pub method: OracleMethod,
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

/// Keeps the best `(value, x)`; near-equal values go to the lexicographically
/// smaller `x`.
struct Best {
    value: f64,
    x: Vec<f64>,
}

impl Best {
    fn new() -> Self {
        Best { value: f64::NEG_INFINITY, x: Vec::new() }
    }

    fn offer(&mut self, value: f64, x: Vec<f64>) {
        if self.x.is_empty() {
            self.value = value;
            self.x = x;
            return;
        }
        let tie = 1e-10 * (1.0 + value.abs().max(self.value.abs()));
        if value > self.value + tie || ((value - self.value).abs() <= tie && lex_cmp(&x, &self.x) == Ordering::Less) {
            self.value = value;
            self.x = x;
        }
    }
}

fn l1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

fn l2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn lp(x: &[f64], p: f64) -> f64 {
    x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Exact `max x^T Q x` over `||x||_1 <= 1` for `n <= 8`.
///
/// Works on the simplex form `max y^T Q~ y, e^T y = 1, y >= 0` and enumerates
/// every support: the stationarity system `2 Q~_SS y_S = lambda e`,
/// `e^T y_S = 1` is solved where nonsingular, vertices and `y = 0` are added,
/// and the best nonnegative candidate wins.
pub fn qpl1_exact_small(q: &SymMat) -> Result<OracleResult, OracleError> {
    let n = q.order();
    if n > MAX_EXACT_ORDER {
        return Err(OracleError::TooLarge { n, max: MAX_EXACT_ORDER });
    }
    q.check_finite()?;
    let d = 2 * n;
    let qt = lift_qtilde(q);
    let mut best = Best::new();
    best.offer(0.0, vec![0.0; n]);

    let to_x = |y: &[f64]| -> Vec<f64> { (0..n).map(|i| y[i] - y[n + i]).collect() };
    let mut consider = |y: Vec<f64>| {
        let x = to_x(&y);
        best.offer(q.quad_form(&x), x);
    };

    for j in 0..d {
        let mut y = vec![0.0; d];
        y[j] = 1.0;
        consider(y);
    }

    let mut support = Vec::with_capacity(d);
    for mask in 1u32..(1u32 << d) {
        support.clear();
        support.extend((0..d).filter(|&j| mask & (1 << j) != 0));
        let s = support.len();
        if s < 2 {
            continue;
        }
        // unknowns (y_S, lambda)
        let m = s + 1;
        let mut a = vec![0.0; m * m];
        let mut b = vec![0.0; m];
        for (r, &i) in support.iter().enumerate() {
            for (c, &j) in support.iter().enumerate() {
                a[r * m + c] = 2.0 * qt.get(i, j);
            }
            a[r * m + s] = -1.0;
            a[s * m + r] = 1.0;
        }
        b[s] = 1.0;
        let Some(sol) = lu_solve(&a, &b, m, 1e-12) else {
            continue;
        };
        if sol[..s].iter().any(|&v| v < -1e-12) {
            continue;
        }
        let mut y = vec![0.0; d];
        for (r, &j) in support.iter().enumerate() {
            y[j] = sol[r].max(0.0);
        }
        let total: f64 = y.iter().sum();
        if total > 1.0 {
            y.iter_mut().for_each(|v| *v /= total);
        }
        consider(y);
    }

    Ok(OracleResult {
        value: best.value,
        maximizer: best.x,
        method: OracleMethod::BruteForce,
    })
}

/// Unit-norm maximizer of `<g, x>` over `{||x||_2 <= 1, ||x||_1 <= sqrt(k)}`:
/// the soft-threshold `S_tau(g)`, normalized, at the smallest feasible `tau`.
fn l1_constrained_direction(g: &[f64], k: f64) -> Option<Vec<f64>> {
    let soft = |tau: f64| -> Vec<f64> { g.iter().map(|&v| v.signum() * (v.abs() - tau).max(0.0)).collect() };
    let feasible = |v: &[f64]| {
        let n2 = l2(v);
        n2 > 0.0 && l1(v) / n2 <= k.sqrt()
    };
    let top = g.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if top == 0.0 {
        return None;
    }
    let mut v = soft(0.0);
    if !feasible(&v) {
        let (mut lo, mut hi) = (0.0, top * (1.0 - 1e-12));
        v = soft(hi);
        if !feasible(&v) {
            return None;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let w = soft(mid);
            if feasible(&w) {
                hi = mid;
                v = w;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-15 * top {
                break;
            }
        }
    }
    let norm = l2(&v);
    Some(v.into_iter().map(|t| t / norm).collect())
}

fn feasible_l2l1(x: &[f64], k: f64) -> bool {
    (l2(x) - 1.0).abs() <= 1e-9 && l1(x).powi(2) <= k + 1e-9
}

/// A feasible point of `max x^T Q x, ||x||_2 = 1, ||x||_1^2 <= k` found by
/// multi-start ascent; its value is a lower bound on the optimum.
///
/// Each start is refined by linearize-and-maximize steps on the shifted,
/// convex objective `x^T (Q + sigma I) x`, which never decrease the value.
/// The coordinate vectors and, when feasible, the top eigenvector are always
/// included as candidates.
pub fn qpl2l1_heuristic(q: &SymMat, k: f64, restarts: usize, seed: u64) -> Result<OracleResult, OracleError> {
    let n = q.order();
    if n == 0 {
        return Err(OracleError::Precondition("Q must have order at least 1".into()));
    }
    q.check_finite()?;
    if !(k >= 1.0 && k <= n as f64) {
        return Err(OracleError::KOutOfRange { k, n });
    }
    let eig = eig_sym(q)?;
    let sigma = (-eig.values[n - 1]).max(0.0);
    let shifted = q.add(&SymMat::identity(n).scaled(sigma));

    let mut best = Best::new();
    let mut offer = |x: Vec<f64>| {
        if feasible_l2l1(&x, k) {
            best.offer(q.quad_form(&x), x);
        }
    };
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s;
            offer(e);
        }
    }
    offer(eig.vector(0));

    let mut rng = SplitMix64::new(seed);
    for _ in 0..restarts {
        let start = rng.unit_sphere(n);
        let Some(mut x) = l1_constrained_direction(&start, k) else {
            continue;
        };
        let mut f = shifted.quad_form(&x);
        for _ in 0..HEURISTIC_ITERS {
            let Some(next) = l1_constrained_direction(&shifted.mul_vec(&x), k) else {
                break;
            };
            let fnext = shifted.quad_form(&next);
            let stalled = fnext <= f + 1e-14 * (1.0 + f.abs());
            if fnext >= f {
                x = next;
                f = fnext;
            }
            if stalled {
                break;
            }
        }
        offer(x);
    }

    Ok(OracleResult {
        value: best.value,
        maximizer: best.x,
        method: OracleMethod::MultiStart,
    })
}

/// Lower bound on `max x^T Q x, ||x||_p <= 1` by rounding: the top
/// eigenvectors of `A Y* A^T` and of `Q`, each rescaled to the lp sphere.
pub fn qplp_lower_bound(q: &SymMat, p: f64, ystar: &SymMat) -> Result<OracleResult, OracleError> {
    let n = q.order();
    if n == 0 {
        return Err(OracleError::Precondition("Q must have order at least 1".into()));
    }
    if !(p > 1.0 && p < 2.0) {
        return Err(OracleError::POutOfRange(p));
    }
    if ystar.order() != 2 * n {
        return Err(OracleError::Precondition(format!(
            "Y* has order {} but Q has order {n}",
            ystar.order()
        )));
    }
    q.check_finite()?;
    ystar.check_finite()?;
    let x_lift = extract_x(ystar, 1.0).map_err(|e| OracleError::Precondition(e.to_string()))?;
    let y = eig_sym(&x_lift)?.vector(0);
    let z = eig_sym(q)?.vector(0);

    let mut best = Best::new();
    for v in [y, z] {
        let scale = lp(&v, p);
        let x: Vec<f64> = v.iter().map(|t| t / scale).collect();
        best.offer(q.quad_form(&x), x);
    }
    Ok(OracleResult {
        value: best.value,
        maximizer: best.x,
        method: OracleMethod::Rounding,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::SolverSettings;
    use crate::instances::{example_q, random_symmetric};
    use crate::linalg::lambda_max;
    use crate::relax::{solve_relaxation, RelaxationKind};
    use proptest::prelude::*;

    // plain double loop, no SymMat::quad_form
    fn eval(q: &SymMat, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..x.len() {
            for j in 0..x.len() {
                s += x[i] * q.get(i, j) * x[j];
            }
        }
        s
    }

    /// Max of `x^T Q x` on the l1 sphere sampled at step `h` along each facet
    /// of the cross-polytope (orders 2 and 3), plus the origin.
    fn grid_l1(q: &SymMat, h: f64) -> f64 {
        let n = q.order();
        let steps = (1.0 / h).round() as usize;
        let mut best: f64 = 0.0;
        let signs: Vec<Vec<f64>> = (0..1usize << n)
            .map(|m| (0..n).map(|i| if m & (1 << i) != 0 { -1.0 } else { 1.0 }).collect())
            .collect();
        let mut visit = |w: &[f64]| {
            for s in &signs {
                let x: Vec<f64> = w.iter().zip(s).map(|(a, b)| a * b).collect();
                best = best.max(eval(q, &x));
            }
        };
        match n {
            1 => visit(&[1.0]),
            2 => {
                for a in 0..=steps {
                    let t = a as f64 * h;
                    visit(&[t, 1.0 - t]);
                }
            }
            3 => {
                for a in 0..=steps {
                    for b in 0..=steps - a {
                        let (s, t) = (a as f64 * h, b as f64 * h);
                        visit(&[s, t, 1.0 - s - t]);
                    }
                }
            }
            _ => unreachable!(),
        }
        best
    }

    #[test]
    fn exact_small_diagonal_examples() {
        let r = qpl1_exact_small(&SymMat::from_diag(&[1.0, 2.0])).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert_eq!(r.maximizer, vec![0.0, -1.0]);
        assert_eq!(r.method, OracleMethod::BruteForce);

        let r = qpl1_exact_small(&SymMat::from_diag(&[-1.0, -2.0])).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.maximizer, vec![0.0, 0.0]);
    }

    #[test]
    fn exact_small_off_diagonal_example() {
        let q = SymMat::from_fn(2, |i, j| if i == j { 0.0 } else { 1.0 });
        let r = qpl1_exact_small(&q).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
        // (1/2, 1/2) and its negation tie; the smaller one is reported
        assert!(r.maximizer.iter().all(|v| (v.abs() - 0.5).abs() < 1e-12));
        assert!((grid_l1(&q, 1e-3) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn exact_small_refuses_large() {
        let q = SymMat::identity(9);
        assert_eq!(qpl1_exact_small(&q), Err(OracleError::TooLarge { n: 9, max: 8 }));
    }

    #[test]
    fn exact_small_matches_grid() {
        let mut rng = SplitMix64::new(11);
        for t in 0..20 {
            let n = 2 + t % 2;
            let q = random_symmetric(&mut rng, n, -1.0, 1.0);
            let exact = qpl1_exact_small(&q).unwrap();
            let grid = grid_l1(&q, 2e-3);
            assert!(exact.value >= grid - 1e-9, "{} vs grid {}", exact.value, grid);
            assert!((exact.value - grid).abs() < 5e-3);
        }
    }

    #[test]
    fn exact_small_below_relaxation() {
        let mut rng = SplitMix64::new(12);
        let settings = SolverSettings::default();
        for _ in 0..20 {
            let n = rng.range_inclusive(2, 4);
            let q = random_symmetric(&mut rng, n, -1.0, 1.0);
            let exact = qpl1_exact_small(&q).unwrap();
            let v = solve_relaxation(RelaxationKind::DnnL1New, &q, &settings).unwrap().value;
            assert!(v >= exact.value - 1e-5, "{v} < {}", exact.value);
            assert!(exact.value >= 0.0);
        }
    }

    #[test]
    fn heuristic_full_k_is_rayleigh() {
        let mut rng = SplitMix64::new(13);
        for n in 2..7 {
            let q = random_symmetric(&mut rng, n, -1.0, 1.0);
            let r = qpl2l1_heuristic(&q, n as f64, 20, 1).unwrap();
            assert!((r.value - lambda_max(&q).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn heuristic_identity_gives_one() {
        for k in [1.0, 2.5, 4.0] {
            let r = qpl2l1_heuristic(&SymMat::identity(4), k, 10, 3).unwrap();
            assert!((r.value - 1.0).abs() < 1e-12);
            assert!(feasible_l2l1(&r.maximizer, k));
        }
    }

    #[test]
    fn heuristic_on_example_matrix() {
        let q = example_q();
        let r = qpl2l1_heuristic(&q, 5.0, 100, 0).unwrap();
        let lmax = lambda_max(&q).unwrap();
        assert!(r.value <= lmax + 1e-6);
        assert!(r.value >= 7.048 - 0.05, "{}", r.value);
        assert_eq!(r.method, OracleMethod::MultiStart);
    }

    #[test]
    fn heuristic_is_deterministic() {
        let q = example_q();
        let a = qpl2l1_heuristic(&q, 2.0, 30, 9).unwrap();
        let b = qpl2l1_heuristic(&q, 2.0, 30, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn heuristic_rejects_bad_k() {
        let q = SymMat::identity(3);
        assert!(matches!(qpl2l1_heuristic(&q, 0.5, 1, 0), Err(OracleError::KOutOfRange { .. })));
        assert!(matches!(qpl2l1_heuristic(&q, 3.5, 1, 0), Err(OracleError::KOutOfRange { .. })));
    }

    #[test]
    fn heuristic_below_relaxations() {
        let mut rng = SplitMix64::new(14);
        let settings = SolverSettings::default();
        for _ in 0..10 {
            let n = rng.range_inclusive(2, 5);
            let k = rng.uniform(1.0, n as f64);
            let q = random_symmetric(&mut rng, n, -1.0, 1.0);
            let h = qpl2l1_heuristic(&q, k, 20, 0).unwrap();
            let sdp = solve_relaxation(RelaxationKind::SdpX { k }, &q, &settings).unwrap().value;
            let dnn = solve_relaxation(RelaxationKind::DnnL2L1 { k }, &q, &settings).unwrap().value;
            assert!(h.value <= sdp + 1e-5 && h.value <= dnn + 1e-5);
            assert!(h.value <= lambda_max(&q).unwrap() + 1e-9);
        }
    }

    #[test]
    fn rounding_order_one() {
        let q = SymMat::from_diag(&[3.0]);
        let y = SymMat::from_diag(&[1.0, 0.0]);
        let r = qplp_lower_bound(&q, 1.5, &y).unwrap();
        assert!((r.value - 3.0).abs() < 1e-12);
        assert!((r.maximizer[0].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rounding_identity_is_feasible() {
        let n = 4;
        let r = qplp_lower_bound(&SymMat::identity(n), 1.3, &SymMat::identity(2 * n).scaled(0.1)).unwrap();
        assert!(r.value > 0.0 && r.value <= 1.0 + 1e-12);
        assert!(lp(&r.maximizer, 1.3) <= 1.0 + 1e-9);
    }

    #[test]
    fn rounding_below_dnn_lp() {
        let mut rng = SplitMix64::new(15);
        let settings = SolverSettings::default();
        let q = random_symmetric(&mut rng, 10, 0.0, 1.0);
        let sol = solve_relaxation(RelaxationKind::DnnLp { p: 1.5 }, &q, &settings).unwrap();
        let r = qplp_lower_bound(&q, 1.5, &sol.matrix).unwrap();
        assert!(r.value <= sol.value + 1e-5, "{} > {}", r.value, sol.value);
        assert_eq!(r.method, OracleMethod::Rounding);
    }

    #[test]
    fn rounding_preconditions() {
        let q = SymMat::identity(2);
        assert_eq!(qplp_lower_bound(&q, 2.0, &SymMat::identity(4)), Err(OracleError::POutOfRange(2.0)));
        assert!(matches!(
            qplp_lower_bound(&q, 1.5, &SymMat::identity(3)),
            Err(OracleError::Precondition(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn maximizers_reevaluate(seed in any::<u64>(), n in 1usize..5, k_frac in 0.0f64..1.0, p in 1.05f64..1.95) {
            let mut rng = SplitMix64::new(seed);
            let q = random_symmetric(&mut rng, n, -1.0, 1.0);

            let e = qpl1_exact_small(&q).unwrap();
            prop_assert!((eval(&q, &e.maximizer) - e.value).abs() <= 1e-9);
            prop_assert!(l1(&e.maximizer) <= 1.0 + 1e-9);

            let k = 1.0 + k_frac * (n as f64 - 1.0);
            let h = qpl2l1_heuristic(&q, k, 5, seed).unwrap();
            prop_assert!((eval(&q, &h.maximizer) - h.value).abs() <= 1e-9);
            prop_assert!(feasible_l2l1(&h.maximizer, k));

            let y = SymMat::outer(&rng.unit_sphere(2 * n).iter().map(|v| v.abs()).collect::<Vec<_>>());
            let r = qplp_lower_bound(&q, p, &y).unwrap();
            prop_assert!((eval(&q, &r.maximizer) - r.value).abs() <= 1e-9);
            prop_assert!(lp(&r.maximizer, p) <= 1.0 + 1e-9);
        }
    }
}
