//! `quatode`: solve quaternionic linear ODEs from the command line.
//!
//! Exit codes: 0 success, 1 input error, 2 numerical failure.

mod format;
mod input;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use quatode::jordan::{decompose, ChainEigenvalue};
use quatode::oracle::{integrate, stack, IntegratorConfig};
use quatode::parser::{format_ode, parse_operator};
use quatode::solver::{solve_with, ClosedFormSolution, OdeProblem};
use quatode::translation::op_to_real;
use quatode::Error;
use serde::Serialize;

use crate::format::Tags;
use crate::input::{parse_grid, usage, ProblemArgs};
use crate::report::*;

#[derive(Debug, Parser)]
#[command(name = "quatode", version, about = "Closed-form solutions of quaternionic linear ODEs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Output {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a problem and print the closed form.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Also evaluate the solution here; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        eval: Vec<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Eigenvalues and Jordan blocks of the companion matrix.
    Spectrum {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        out: Output,
    },
    /// The 4×4 real matrix of an operator such as "L_i - 2*R_j".
    Translate {
        #[arg(allow_hyphen_values = true)]
        operator: String,
        #[command(flatten)]
        out: Output,
    },
    /// Compare the closed form with RK4 on a grid.
    Verify {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Grid a:b:n (default x0:x0+1:11).
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// RK4 step.
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
        /// Largest deviation accepted.
        #[arg(long, default_value_t = 1e-6)]
        threshold: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Evaluate the solution and its derivatives.
    Eval {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Points to evaluate at; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        at: Vec<f64>,
        /// Grid a:b:n.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Also print φ', …, φ^(n−1).
        #[arg(long)]
        derivatives: bool,
        #[command(flatten)]
        out: Output,
    },
}

/// Stops with an error after something was already decided (e.g. a
/// failed verification).
struct Failure {
    error: Error,
    json: bool,
}

type CmdResult = Result<(), Failure>;

trait OrFail<T> {
    fn or_fail(self, json: bool) -> Result<T, Failure>;
}

impl<T> OrFail<T> for Result<T, Error> {
    fn or_fail(self, json: bool) -> Result<T, Failure> {
        self.map_err(|error| Failure { error, json })
    }
}

/// `writeln!` into the output buffer.
macro_rules! say {
    ($out:expr, $($arg:tt)*) => {{
        use std::fmt::Write as _;
        writeln!($out, $($arg)*).expect("writing to a String");
    }};
}

fn print_json<T: Serialize>(out: &mut String, value: &T) {
    say!(out, "{}", serde_json::to_string_pretty(value).expect("reports serialize"));
}

fn floor_for(sol: &ClosedFormSolution) -> f64 {
    sol.tolerances.prune
}

fn evaluations(sol: &ClosedFormSolution, xs: &[f64], derivatives: bool) -> Result<Vec<Evaluation>, Error> {
    xs.iter()
        .map(|&x| {
            let all = sol.evaluate_all(x)?;
            Ok(Evaluation {
                x,
                value: all[0],
                derivatives: if derivatives { all[1..].to_vec() } else { Vec::new() },
            })
        })
        .collect()
}

fn cmd_solve(out: &mut String, problem: &ProblemArgs, eval: &[f64], json: bool) -> CmdResult {
    let (p, tol) = problem.load(false).or_fail(json)?;
    let sol = solve_with(&p, &tol).or_fail(json)?;
    let evals = evaluations(&sol, eval, false).or_fail(json)?;
    let equation = format_ode(&p.coefficients);
    let floor = floor_for(&sol);
    let mut tags = Tags::default();
    let lines = format::solution(&sol.modal_components(), p.x0, floor, &mut tags);
    if json {
        print_json(out, &SolveReport {
            equation,
            order: p.order,
            x0: p.x0,
            linearity: p.linearity(),
            terms: sol.display_terms(),
            fitted_constants: sol.fitted_constants.clone(),
            evaluations: evals,
            comment: tags.into_vec(),
        });
        return Ok(());
    }
    say!(out, "equation: {equation}");
    say!(out, "linearity: {}", p.linearity());
    say!(out, "φ(x) =");
    for (i, line) in lines.iter().enumerate() {
        say!(out, "  {} {line}", if i == 0 { " " } else { "+" });
    }
    for e in &evals {
        say!(out, "φ({}) = {}", format::number(e.x), format::quaternion(e.value, floor));
    }
    let notes = tags.into_vec();
    if !notes.is_empty() {
        say!(out, "# {}", notes.join(", "));
    }
    Ok(())
}

fn cmd_spectrum(out: &mut String, problem: &ProblemArgs, json: bool) -> CmdResult {
    let (p, tol) = problem.load(true).or_fail(json)?;
    let m = quatode::solver::companion_real(&p);
    let jd = decompose(&m, &tol).or_fail(json)?;
    let blocks: Vec<Block> = jd.chains.iter().map(|c| Block { eigenvalue: c.eigenvalue, size: c.len }).collect();
    let nilpotent = blocks.iter().any(|b| b.size > 1);
    let mut tags = Tags::default();
    for e in &jd.spectrum.real {
        tags.note(e.value.abs());
    }
    for c in &jd.spectrum.complex {
        tags.note(c.re.abs());
        tags.note(c.im);
    }
    let report = SpectrumReport {
        equation: format_ode(&p.coefficients),
        dimension: jd.spectrum.dimension(),
        real: jd.spectrum.real.clone(),
        complex: jd.spectrum.complex.clone(),
        blocks,
        nilpotent,
        comment: tags.into_vec(),
    };
    if json {
        print_json(out, &report);
        return Ok(());
    }
    let floor = tol.prune;
    say!(out, "equation: {}", report.equation);
    say!(out, "dimension: {}", report.dimension);
    for e in &report.real {
        say!(out, "  {}  (x{})", format::number(format::clean(e.value, floor)), e.mult);
    }
    for c in &report.complex {
        let re = format::clean(c.re, floor);
        let im = format::number(c.im);
        if re == 0.0 {
            say!(out, "  ±{im}i  (x{})", c.mult);
        } else {
            say!(out, "  {} ± {im}i  (x{})", format::number(re), c.mult);
        }
    }
    let sizes: Vec<String> = report
        .blocks
        .iter()
        .map(|b| match b.eigenvalue {
            ChainEigenvalue::Real { value } => format!("{}:{}", format::number(format::clean(value, floor)), b.size),
            ChainEigenvalue::Pair { re, im } => {
                format!("{}+{}i:{}", format::number(format::clean(re, floor)), format::number(im), b.size)
            }
        })
        .collect();
    say!(out, "jordan blocks: {}", sizes.join(" "));
    if !report.comment.is_empty() {
        say!(out, "# {}", report.comment.join(", "));
    }
    Ok(())
}

fn cmd_translate(out: &mut String, operator: &str, json: bool) -> CmdResult {
    let op = parse_operator(operator).or_fail(json)?;
    let m = op_to_real(&op);
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    if json {
        print_json(out, &TranslateReport { operator: op.to_string(), linearity: op.classify(), matrix: rows });
        return Ok(());
    }
    say!(out, "operator: {op}");
    say!(out, "linearity: {}", op.classify());
    let cells: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|v| format::number(*v)).collect()).collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    for r in cells {
        let padded: Vec<String> = r.iter().map(|c| format!("{c:>width$}")).collect();
        say!(out, "[ {} ]", padded.join("  "));
    }
    Ok(())
}

fn grid_or_default(grid: &Option<String>, p: &OdeProblem) -> Result<Vec<f64>, Error> {
    match grid {
        Some(g) => parse_grid(g),
        None => Ok((0..=10).map(|i| p.x0 + i as f64 / 10.0).collect()),
    }
}

fn cmd_verify(out: &mut String, problem: &ProblemArgs, grid: &Option<String>, step: f64, threshold: f64, json: bool) -> CmdResult {
    let (p, tol) = problem.load(false).or_fail(json)?;
    let xs = grid_or_default(grid, &p).or_fail(json)?;
    let cfg = IntegratorConfig::with_step(step).or_fail(json)?;
    let sol = solve_with(&p, &tol).or_fail(json)?;
    let y0 = stack(&p.initial);
    let mut worst: f64 = 0.0;
    for &x in &xs {
        let y = integrate(&sol.matrix, &y0, p.x0, x, &cfg).or_fail(json)?;
        let exact = sol.state(x).or_fail(json)?;
        worst = worst.max((y - exact).amax());
    }
    let pass = worst < threshold;
    let report = VerifyReport { equation: format_ode(&p.coefficients), step, grid: xs, max_deviation: worst, threshold, pass };
    if json {
        print_json(out, &report);
    } else {
        say!(out, "equation: {}", report.equation);
        say!(out, "grid: {} points in [{}, {}]", report.grid.len(), format::number(report.grid[0]), format::number(*report.grid.last().expect("nonempty grid")));
        say!(out, "max |closed form - RK4|: {:e}", worst);
        say!(out, "{}", if pass { "ok" } else { "FAILED" });
    }
    if pass {
        Ok(())
    } else {
        Err(Failure {
            error: Error::Internal(format!("closed form and RK4 differ by {worst:e} (threshold {threshold:e})")),
            json,
        })
    }
}

fn cmd_eval(out: &mut String, problem: &ProblemArgs, at: &[f64], grid: &Option<String>, derivatives: bool, json: bool) -> CmdResult {
    let (p, tol) = problem.load(false).or_fail(json)?;
    let mut xs = at.to_vec();
    if let Some(g) = grid {
        xs.extend(parse_grid(g).or_fail(json)?);
    }
    if xs.is_empty() {
        return Err(Failure { error: usage("give --at or --grid"), json });
    }
    let sol = solve_with(&p, &tol).or_fail(json)?;
    let points = evaluations(&sol, &xs, derivatives).or_fail(json)?;
    if json {
        print_json(out, &EvalReport { equation: format_ode(&p.coefficients), points });
        return Ok(());
    }
    let floor = floor_for(&sol);
    for e in &points {
        let mut line = format!("{}\t{}", format::number(e.x), format::quaternion(e.value, floor));
        for d in &e.derivatives {
            line.push('\t');
            line.push_str(&format::quaternion(*d, floor));
        }
        say!(out, "{line}");
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    if e.is_input_error() {
        1
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let mut text = String::new();
    let buf = &mut text;
    let result = match &cli.command {
        Command::Solve { problem, eval, out } => cmd_solve(buf, problem, eval, out.json),
        Command::Spectrum { problem, out } => cmd_spectrum(buf, problem, out.json),
        Command::Translate { operator, out } => cmd_translate(buf, operator, out.json),
        Command::Verify { problem, grid, step, threshold, out } => {
            cmd_verify(buf, problem, grid, *step, *threshold, out.json)
        }
        Command::Eval { problem, at, grid, derivatives, out } => cmd_eval(buf, problem, at, grid, *derivatives, out.json),
    };
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: writing output: {e}");
            return ExitCode::from(2);
        }
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { error, json }) => {
            if json {
                eprintln!("{}", serde_json::to_string(&ErrorReport::new(&error)).expect("error serializes"));
            } else {
                eprintln!("error: {error}");
            }
            ExitCode::from(exit_code(&error))
        }
    }
}
