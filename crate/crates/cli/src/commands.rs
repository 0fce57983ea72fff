use std::error::Error;
use std::path::Path;

use qpball::conic::SolverSettings;
use qpball::matrix_file::read_matrix;
use qpball::relax::{solve_relaxation, RelaxationKind};
use qpball::report::{self, BoundEntry, BoundStatus, CompareOptions};
use serde_json::json;

use crate::Format;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_ITER_LIMIT: u8 = 2;
pub const EXIT_CHECK_FAILED: u8 = 3;

type CmdResult = Result<u8, Box<dyn Error>>;

fn settings(tol: f64, max_iter: usize) -> Result<SolverSettings, Box<dyn Error>> {
    let s = SolverSettings {
        tol,
        max_iter,
        ..SolverSettings::default()
    };
    s.validate().map_err(|e| format!("--tol/--max-iter: {e}"))?;
    Ok(s)
}

fn only_text_or_json(format: Format, command: &str) -> Result<(), Box<dyn Error>> {
    if format == Format::Csv {
        return Err(format!("--format csv is not available for {command}").into());
    }
    Ok(())
}

fn instance_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn bound(
    matrix: &Path,
    relaxation: &str,
    k: Option<f64>,
    p: Option<f64>,
    tol: f64,
    max_iter: usize,
    format: Format,
) -> CmdResult {
    only_text_or_json(format, "bound")?;
    let kind = RelaxationKind::from_name(relaxation, k, p)?;
    if k.is_some() && kind.k().is_none() {
        return Err(format!("--k is not a parameter of {}", kind.name()).into());
    }
    if p.is_some() && kind.p().is_none() {
        return Err(format!("--p is not a parameter of {}", kind.name()).into());
    }
    let settings = settings(tol, max_iter)?;
    let q = read_matrix(matrix)?;
    let sol = solve_relaxation(kind, &q, &settings)?;
    let entry = BoundEntry::from_solution(&sol);
    match format {
        Format::Json => {
            let out = json!({
                "instance": instance_name(matrix),
                "n": q.order(),
                "relaxation": kind,
                "bound": entry,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        _ => {
            println!("instance: {}", instance_name(matrix));
            println!("relaxation: {kind}");
            println!("value = {}", entry.value);
            println!("status = {:?}", entry.status);
            println!("iterations = {}", entry.iterations);
            println!(
                "residuals: primal {:e}, dual {:e}, gap {:e}",
                entry.residual_primal, entry.residual_dual, entry.residual_gap
            );
            println!("seconds = {:.3}", entry.seconds);
        }
    }
    if entry.status == BoundStatus::IterLimit {
        eprintln!("warning: iteration limit reached; the value is not certified");
        return Ok(EXIT_ITER_LIMIT);
    }
    Ok(EXIT_OK)
}

pub fn compare(matrix: &Path, k: Option<f64>, p: Option<f64>, tol: f64, seed: u64, format: Format) -> CmdResult {
    let settings = settings(tol, SolverSettings::default().max_iter)?;
    let q = read_matrix(matrix)?;
    let opts = CompareOptions { k, p, settings, seed };
    let r = report::compare(&instance_name(matrix), &q, &opts)?;
    match format {
        Format::Text => print!("{}", report::render_text(&r)),
        Format::Json => println!("{}", serde_json::to_string_pretty(&r)?),
        Format::Csv => print!("{}", report::render_csv(&r)),
    }
    if !r.all_optimal() {
        eprintln!("warning: iteration limit reached on at least one bound");
        return Ok(EXIT_ITER_LIMIT);
    }
    if !r.all_orderings_hold() {
        eprintln!("ordering check failed");
        return Ok(EXIT_CHECK_FAILED);
    }
    Ok(EXIT_OK)
}

pub fn examples(tol: f64, solver_tol: f64, format: Format) -> CmdResult {
    only_text_or_json(format, "examples")?;
    if !(tol >= 0.0) {
        return Err(format!("--tol must be nonnegative, got {tol}").into());
    }
    let settings = settings(solver_tol, SolverSettings::default().max_iter)?;
    let r = report::run_examples(tol, &settings)?;
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&r)?),
        _ => print!("{}", report::render_examples(&r)),
    }
    Ok(if r.all_pass() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

pub fn sweep_p(n: usize, seed: u64, grid: &str, out: Option<&Path>, tol: f64) -> CmdResult {
    let grid = report::parse_grid(grid)?;
    let settings = settings(tol, SolverSettings::default().max_iter)?;
    let rows = report::sweep_p(n, seed, &grid, &settings)?;
    let csv = report::sweep_csv(&rows);
    match out {
        Some(path) => std::fs::write(path, &csv).map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => print!("{csv}"),
    }
    for r in rows.iter().filter(|r| !r.sandwich) {
        eprintln!(
            "sandwich violated at p = {}: lower {} dnn_lp {} b1 {} b2 {}",
            r.p, r.lower, r.dnn_lp, r.b1, r.b2
        );
    }
    if rows.iter().any(|r| !r.optimal) {
        eprintln!("warning: iteration limit reached at some grid point");
        return Ok(EXIT_ITER_LIMIT);
    }
    Ok(if rows.iter().all(|r| r.sandwich) { EXIT_OK } else { EXIT_CHECK_FAILED })
}
