//! Fitting real constants to initial data.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::oracle::stack;
use crate::solver::terms::SolutionTerm;
use crate::solver::OdeProblem;

/// Solves the square system `a·x = rhs` and checks the residual against
/// `tol · max(1, ‖rhs‖)`.
pub(crate) fn solve_square(a: DMatrix<f64>, rhs: &DVector<f64>, tol: f64, what: &str) -> Result<DVector<f64>> {
    let x = a
        .clone()
        .lu()
        .solve(rhs)
        .ok_or_else(|| Error::Internal(format!("{what}: the initial-value system is singular")))?;
    let residual = (&a * &x - rhs).norm();
    if !(residual <= tol * rhs.norm().max(1.0)) {
        return Err(Error::Internal(format!(
            "{what}: initial-value system solved only to residual {residual:e}"
        )));
    }
    Ok(x)
}

/// The `4n` real constants making the terms match `φ(x₀), …, φ^{(n−1)}(x₀)`.
///
/// Row block `d` of the system holds the `d`-th derivative of every term at
/// `x₀`; column `s` collects the terms carrying constant `s`.
pub fn fit_constants(terms: &[SolutionTerm], problem: &OdeProblem, tol: f64) -> Result<Vec<f64>> {
    let n = problem.order;
    let dim = 4 * n;
    if let Some(t) = terms.iter().find(|t| t.slot >= dim) {
        return Err(Error::Internal(format!("term refers to constant {} of {dim}", t.slot)));
    }
    let mut a = DMatrix::zeros(dim, dim);
    for term in terms {
        for d in 0..n {
            let v = term.unit_derivative(0.0, d).to_array();
            for (c, val) in v.iter().enumerate() {
                a[(4 * d + c, term.slot)] += val;
            }
        }
    }
    let rhs = stack(&problem.initial);
    Ok(solve_square(a, &rhs, tol, "fit_constants")?.iter().cloned().collect())
}
