//! Command-line front end for the `kaucher` solvers.
//!
//! [`run`] executes one invocation and returns the exit code together with
//! everything destined for standard output and standard error, so the binary
//! is a thin wrapper and commands can be tested in-process.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numerical failure
//! (non-convergence, unsatisfied criterion, residual above tolerance).

pub mod problem;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use kaucher::immersion::absolute_regularity;
use kaucher::newton::{newton_solve, NewtonOptions};
use kaucher::real::PIVOT_TOL;
use kaucher::split::{
    arm_convergence_criterion, arm_solve, arm_split, trn_convergence_criterion, trn_solve,
    trn_split, IterOptions, SolveReport, SolveStatus, SplitVariant,
};
use kaucher::{Error, IntervalVector};

pub use problem::{
    format_interval, format_problem, parse_interval_vector, parse_problem, ParseError, ProblemFile,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "kaucher", version, about = "Formal solutions of interval linear systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute a formal solution.
    Solve(SolveArgs),
    /// Evaluate a sufficient convergence or regularity criterion.
    Check(CheckArgs),
    /// Substitute a candidate solution and report the residual.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct ProblemArgs {
    /// Problem file.
    #[arg(short = 'i', long)]
    input: PathBuf,
    /// Replace every matrix entry by its dual.
    #[arg(long)]
    dualize_matrix: bool,
    /// Replace every right-hand side entry by its dual.
    #[arg(long)]
    dualize_rhs: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Armsplit,
    ArmsplitSimple,
    Trnsplit,
    Newton,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(short = 'm', long, value_enum, default_value = "newton")]
    method: Method,
    /// Stopping tolerance (1e-10 for splittings, 1e-12 for newton).
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration budget (500 for splittings, 100 for newton).
    #[arg(long)]
    max_iter: Option<usize>,
    /// Newton damping factor in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, value_enum, default_value = "text")]
    report: ReportFormat,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Criterion {
    AbsRegular,
    Arm,
    ArmSimple,
    Trn,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, value_enum)]
    criterion: Criterion,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// File with one interval per component.
    #[arg(long)]
    solution: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

/// Result of one invocation.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn input_error(msg: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }

    fn numeric_error(msg: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_NUMERIC,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

/// Maps a library error to an exit outcome.
fn solver_error(e: Error) -> Outcome {
    match e {
        Error::ShapeMismatch { .. }
        | Error::NonFinite { .. }
        | Error::OddLength(_)
        | Error::InvalidParameter(_) => Outcome::input_error(e),
        _ => Outcome::numeric_error(e),
    }
}

/// Runs the command line given in `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion
                | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::Check(a) => cmd_check(&a),
        Command::Verify(a) => cmd_verify(&a),
    }
}

fn read(path: &Path) -> Result<String, Outcome> {
    std::fs::read_to_string(path)
        .map_err(|e| Outcome::input_error(format!("cannot read {}: {e}", path.display())))
}

fn load(args: &ProblemArgs) -> Result<ProblemFile, Outcome> {
    let text = read(&args.input)?;
    let mut p = parse_problem(&text)
        .map_err(|e| Outcome::input_error(format!("{}: {e}", args.input.display())))?;
    p.dualize_matrix = args.dualize_matrix;
    p.dualize_rhs = args.dualize_rhs;
    Ok(p)
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Armsplit => "armsplit",
        Method::ArmsplitSimple => "armsplit-simple",
        Method::Trnsplit => "trnsplit",
        Method::Newton => "newton",
    }
}

fn render_solution(x: &IntervalVector) -> String {
    x.iter().map(|&a| format_interval(a) + "\n").collect()
}

fn text_report(method: Method, r: &SolveReport) -> String {
    let mut s = format!(
        "method: {}\nstatus: {}\niterations: {}\nresidual: {:e}\n",
        method_name(method),
        r.status,
        r.iterations,
        r.residual
    );
    if let Some(rho) = r.rho_estimate {
        let _ = writeln!(s, "rho estimate: {rho}");
    }
    s
}

fn json_report(method: Method, r: &SolveReport) -> String {
    let finite = |v: f64| {
        if v.is_finite() {
            serde_json::Value::from(v)
        } else {
            serde_json::Value::Null
        }
    };
    let v = serde_json::json!({
        "method": method_name(method),
        "status": r.status.as_str(),
        "iterations": r.iterations,
        "residual": finite(r.residual),
        "rho_estimate": r.rho_estimate.map(finite),
    });
    v.to_string() + "\n"
}

fn cmd_solve(args: &SolveArgs) -> Outcome {
    let p = match load(&args.problem) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let (a, b) = p.system();
    let result = match args.method {
        Method::Newton => {
            let defaults = NewtonOptions::default();
            let opts = NewtonOptions {
                tau: args.tau,
                tol: args.tol.unwrap_or(defaults.tol),
                max_iter: args.max_iter.unwrap_or(defaults.max_iter),
                record_history: false,
            };
            newton_solve(&a, &b, &opts)
        }
        m => {
            let defaults = IterOptions::default();
            let opts = IterOptions {
                tol: args.tol.unwrap_or(defaults.tol),
                max_iter: args.max_iter.unwrap_or(defaults.max_iter),
                record_history: false,
            };
            if opts.tol.is_nan() || opts.tol < 0.0 {
                return Outcome::input_error("tolerance must be nonnegative");
            }
            match m {
                Method::Armsplit => arm_solve(&a, &b, SplitVariant::Markov, &opts),
                Method::ArmsplitSimple => arm_solve(&a, &b, SplitVariant::Simple, &opts),
                _ => trn_solve(&a, &b, &opts),
            }
        }
    };
    let (x, report) = match result {
        Ok(r) => r,
        Err(e) => return solver_error(e),
    };
    let mut stderr = String::new();
    let converged = report.status == SolveStatus::Converged;
    if !converged {
        let _ = writeln!(
            stderr,
            "warning: solver did not converge (status: {}); the vector below is not a formal solution",
            report.status
        );
    }
    stderr.push_str(&match args.report {
        ReportFormat::Text => text_report(args.method, &report),
        ReportFormat::Json => json_report(args.method, &report),
    });
    Outcome {
        code: if converged { EXIT_OK } else { EXIT_NUMERIC },
        stdout: render_solution(&x),
        stderr,
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "satisfied"
    } else {
        "not satisfied"
    }
}

fn cmd_check(args: &CheckArgs) -> Outcome {
    let p = match load(&args.problem) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let (a, _) = p.system();
    let mut out = String::new();
    let ok = match args.criterion {
        Criterion::AbsRegular => {
            let reg = match absolute_regularity(&a.mid(), PIVOT_TOL) {
                Ok(r) => r,
                Err(e) => return solver_error(e),
            };
            let _ = writeln!(out, "criterion: absolute regularity of mid(A)");
            let _ = writeln!(out, "pivot tolerance: {PIVOT_TOL:e}");
            let _ = writeln!(out, "mid(A) nonsingular: {}", reg.matrix_nonsingular);
            let _ = writeln!(out, "|mid(A)| nonsingular: {}", reg.abs_nonsingular);
            reg.is_regular()
        }
        Criterion::Arm | Criterion::ArmSimple => {
            let variant = if args.criterion == Criterion::Arm {
                SplitVariant::Markov
            } else {
                SplitVariant::Simple
            };
            let split = match arm_split(&a, variant) {
                Ok(s) => s,
                Err(e) => return solver_error(e),
            };
            let c = match arm_convergence_criterion(&split) {
                Ok(c) => c,
                Err(e) => return solver_error(e),
            };
            let name = match variant {
                SplitVariant::Markov => "markov",
                SplitVariant::Simple => "simple",
            };
            let _ = writeln!(out, "criterion: spectral radius of |V| |H|~ ({name} splitting)");
            let _ = writeln!(out, "rho: {}", c.rho);
            let _ = writeln!(out, "threshold: 1");
            let _ = writeln!(out, "estimate converged: {}", c.estimate_converged);
            c.satisfied
        }
        Criterion::Trn => {
            let split = match trn_split(&a) {
                Ok(s) => s,
                Err(e) => return solver_error(e),
            };
            let c = match trn_convergence_criterion(split.permuted_matrix()) {
                Ok(c) => c,
                Err(e) => return solver_error(e),
            };
            let s_max = c.s.iter().copied().fold(0.0, f64::max);
            let _ = writeln!(out, "criterion: spectral radius of Q (triangular splitting)");
            let _ = writeln!(out, "row order: {:?}", split.perm());
            let _ = writeln!(out, "rho: {}", c.rho_q);
            let _ = writeln!(out, "threshold: 1");
            let _ = writeln!(out, "estimate converged: {}", c.estimate_converged);
            let _ = writeln!(out, "max s_i: {s_max}");
            let _ = writeln!(out, "diagonally dominant: {}", c.diag_dominant);
            c.satisfied
        }
    };
    let _ = writeln!(out, "verdict: {}", verdict(ok));
    Outcome {
        code: if ok { EXIT_OK } else { EXIT_NUMERIC },
        stdout: out,
        stderr: String::new(),
    }
}

fn cmd_verify(args: &VerifyArgs) -> Outcome {
    let p = match load(&args.problem) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let text = match read(&args.solution) {
        Ok(t) => t,
        Err(o) => return o,
    };
    let x = match parse_interval_vector(&text) {
        Ok(x) => x,
        Err(e) => return Outcome::input_error(format!("{}: {e}", args.solution.display())),
    };
    if x.len() != p.n {
        return Outcome::input_error(format!(
            "dimension mismatch: solution has {} components, problem has {}",
            x.len(),
            p.n
        ));
    }
    let (a, b) = p.system();
    let residual = match a.residual_norm(&x, &b) {
        Ok(r) => r,
        Err(e) => return solver_error(e),
    };
    let ok = residual <= args.tol;
    Outcome {
        code: if ok { EXIT_OK } else { EXIT_NUMERIC },
        stdout: format!("residual: {residual:e}\nverdict: {}\n", if ok { "pass" } else { "fail" }),
        stderr: String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_with_one() {
        let o = run(["kaucher", "solve"]);
        assert_eq!(o.code, EXIT_INPUT);
        assert!(o.stderr.contains("--input"));
        let o = run(["kaucher", "solve", "-i", "x", "-m", "bogus"]);
        assert_eq!(o.code, EXIT_INPUT);
        let o = run(["kaucher", "frobnicate"]);
        assert_eq!(o.code, EXIT_INPUT);
    }

    #[test]
    fn help_and_version_exit_with_zero() {
        let o = run(["kaucher", "--help"]);
        assert_eq!(o.code, EXIT_OK);
        assert!(o.stdout.contains("solve"));
        assert_eq!(run(["kaucher", "--version"]).code, EXIT_OK);
    }

    #[test]
    fn missing_file_is_an_input_error() {
        let o = run(["kaucher", "solve", "-i", "/nonexistent/problem.txt"]);
        assert_eq!(o.code, EXIT_INPUT);
        assert!(o.stderr.contains("cannot read"));
    }

    #[test]
    fn errors_map_to_exit_codes() {
        assert_eq!(solver_error(Error::InvalidParameter("x".into())).code, EXIT_INPUT);
        assert_eq!(solver_error(Error::StartFailure).code, EXIT_NUMERIC);
        assert_eq!(solver_error(Error::NoValidDiagonal { column: 0 }).code, EXIT_NUMERIC);
    }
}
