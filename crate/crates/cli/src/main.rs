use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

/// Upper and lower bounds for maximizing a quadratic form over l1-type balls.
#[derive(Debug, Parser)]
#[command(name = "qpball", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one relaxation.
    Bound {
        #[arg(long)]
        matrix: PathBuf,
        /// dnn-l1, dnn-l1-new, sdp-x, dnn-l2l1, dnn-l2l1-new-le, dnn-l2l1-new-eq or dnn-lp
        #[arg(long)]
        relaxation: String,
        /// l1 budget, required by sdp-x and the dnn-l2l1 family
        #[arg(long)]
        k: Option<f64>,
        /// norm exponent in (1, 2), required by dnn-lp
        #[arg(long)]
        p: Option<f64>,
        /// solver tolerance
        #[arg(long, default_value_t = 1e-7, allow_negative_numbers = true)]
        tol: f64,
        #[arg(long, default_value_t = 200_000)]
        max_iter: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compute every applicable bound and check their orderings.
    Compare {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 1e-7, allow_negative_numbers = true)]
        tol: f64,
        /// seed for the multi-start lower bound
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Reproduce the reference example values.
    Examples {
        /// absolute tolerance against the reference values
        #[arg(long, default_value_t = 1e-2, allow_negative_numbers = true)]
        tol: f64,
        #[arg(long, default_value_t = 1e-7)]
        solver_tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// lp bounds over a grid of p for one seeded random matrix, as CSV.
    SweepP {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// START:STEP:END, all points inside (1, 2)
        #[arg(long, default_value = "1.05:0.05:1.95")]
        grid: String,
        /// output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-7, allow_negative_numbers = true)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    // usage errors share the input-error exit code; 2 is reserved for iteration limits
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { commands::EXIT_INPUT } else { commands::EXIT_OK });
        }
    };
    let result = match cli.command {
        Command::Bound {
            matrix,
            relaxation,
            k,
            p,
            tol,
            max_iter,
            format,
        } => commands::bound(&matrix, &relaxation, k, p, tol, max_iter, format),
        Command::Compare {
            matrix,
            k,
            p,
            tol,
            seed,
            format,
        } => commands::compare(&matrix, k, p, tol, seed, format),
        Command::Examples { tol, solver_tol, format } => commands::examples(tol, solver_tol, format),
        Command::SweepP { n, seed, grid, out, tol } => commands::sweep_p(n, seed, &grid, out.as_deref(), tol),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::EXIT_INPUT)
        }
    }
}
