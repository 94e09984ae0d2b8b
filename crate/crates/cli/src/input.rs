//! Turning command-line arguments into a problem.

use std::fs;
use std::io::Read;

use clap::Args;
use quatode::io::ProblemFile;
use quatode::parser::{parse_ode, parse_quaternion};
use quatode::solver::OdeProblem;
use quatode::{Error, Quaternion, Tolerances};

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// Problem file (JSON); `-` reads standard input.
    #[arg(conflicts_with = "equation")]
    pub file: Option<String>,

    /// Equation instead of a file, e.g. "D^2 - L_j*R_i".
    #[arg(short, long)]
    pub equation: Option<String>,

    /// Initial values φ(x0), φ'(x0), … (comma separated or repeated).
    #[arg(short, long, value_delimiter = ',', allow_hyphen_values = true, requires = "equation")]
    pub initial: Vec<String>,

    /// Initial point.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true, requires = "equation")]
    pub x0: f64,

    /// Tolerance override `name=value`; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
}

/// Failure before any numerics: unreadable file or bad arguments.
pub fn usage(message: impl Into<String>) -> Error {
    Error::InvalidProblem(message.into())
}

fn read_source(path: &str) -> Result<String, Error> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| usage(format!("reading stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| usage(format!("reading {path}: {e}")))
    }
}

impl ProblemArgs {
    /// The problem and its tolerances: defaults, then `QUATODE_TOL_*`, then
    /// the file's `tolerances`, then `--tol`. Without `--initial`, an
    /// equation gets zero initial data when `allow_missing_initial` is set.
    pub fn load(&self, allow_missing_initial: bool) -> Result<(OdeProblem, Tolerances), Error> {
        let mut tol = Tolerances::from_env()?;
        let problem = match (&self.file, &self.equation) {
            (Some(path), None) => {
                let file = ProblemFile::from_json(&read_source(path)?)?;
                tol = file.tolerances_over(tol)?;
                file.to_problem()?
            }
            (None, Some(eq)) => {
                let expr = parse_ode(eq)?;
                let initial = if self.initial.is_empty() && allow_missing_initial {
                    vec![Quaternion::ZERO; expr.order]
                } else {
                    self.initial.iter().map(|s| parse_quaternion(s)).collect::<Result<Vec<_>, _>>()?
                };
                OdeProblem::from_expr(&expr, self.x0, initial)?
            }
            _ => return Err(usage("give a problem file or --equation")),
        };
        for assignment in &self.tol {
            tol.apply_assignment(assignment)?;
        }
        Ok((problem, tol))
    }
}

/// Grid `a:b:n`: `n` evenly spaced points from `a` to `b`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || usage(format!("grid must look like a:b:n, got `{spec}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}
