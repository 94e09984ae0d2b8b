//! Closed-form solutions of `φ^{(n)} = Σ_p a^{(p)} φ^{(p)}` with constant
//! ℝ-linear coefficients.
//!
//! The equation is rewritten as the first-order system `Φ' = M Φ` for the
//! companion operator matrix `M`, translated to a real `4n × 4n` matrix and
//! solved through its real Jordan form:
//! `Φ(x) = T exp(Dt) exp(At) exp(Nt) T⁻¹ Φ(x₀)` with `t = x − x₀`.

pub mod fit;
pub mod specialize;
pub mod terms;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jordan::{self, exp_jordan, ChainEigenvalue, JordanData};
use crate::operator::{LinearityClass, OperatorMatrix, RealLinearOperator};
use crate::oracle::{stack, unstack};
use crate::parser::OdeExpr;
use crate::quaternion::Quaternion;
use crate::tolerance::Tolerances;
use crate::translation::opmatrix_to_real;

pub use fit::fit_constants;
pub use specialize::{specialize, ExpTerm, SpecializedSolution};
pub use terms::SolutionTerm;

/// Highest order accepted (the real system has dimension `4n ≤ 64`).
pub const MAX_ORDER: usize = jordan::MAX_DIM / 4;

/// `φ^{(n)} = Σ_{p<n} a^{(p)} φ^{(p)}` with `φ^{(p)}(x₀) = initial[p]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeProblem {
    pub order: usize,
    /// `a^{(0)}, …, a^{(n−1)}`.
    pub coefficients: Vec<RealLinearOperator>,
    pub x0: f64,
    pub initial: Vec<Quaternion>,
}

impl OdeProblem {
    pub fn new(coefficients: Vec<RealLinearOperator>, x0: f64, initial: Vec<Quaternion>) -> Result<Self> {
        let p = OdeProblem { order: coefficients.len(), coefficients, x0, initial };
        p.validate()?;
        Ok(p)
    }

    pub fn from_expr(expr: &OdeExpr, x0: f64, initial: Vec<Quaternion>) -> Result<Self> {
        OdeProblem::new(expr.coefficients(), x0, initial)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.order;
        if n == 0 || n > MAX_ORDER {
            return Err(Error::InvalidProblem(format!("order must be between 1 and {MAX_ORDER}, got {n}")));
        }
        if self.coefficients.len() != n {
            return Err(Error::InvalidProblem(format!(
                "order {n} needs {n} coefficients, got {}",
                self.coefficients.len()
            )));
        }
        if self.initial.len() != n {
            return Err(Error::InvalidProblem(format!(
                "order {n} needs {n} initial values, got {}",
                self.initial.len()
            )));
        }
        if !self.x0.is_finite()
            || !self.coefficients.iter().all(RealLinearOperator::is_finite)
            || !self.initial.iter().all(|q| q.is_finite())
        {
            return Err(Error::InvalidProblem("problem contains non-finite numbers".into()));
        }
        Ok(())
    }

    /// Weakest linearity class among the coefficients.
    pub fn linearity(&self) -> LinearityClass {
        self.coefficients
            .iter()
            .map(RealLinearOperator::classify)
            .fold(LinearityClass::HLinear, LinearityClass::join)
    }
}

/// Identity operators on the superdiagonal, `a^{(0)} … a^{(n−1)}` in the
/// last row.
pub fn build_companion(p: &OdeProblem) -> OperatorMatrix {
    let n = p.order;
    let mut m = OperatorMatrix::zeros(n);
    for r in 0..n.saturating_sub(1) {
        m.set(r, r + 1, RealLinearOperator::identity());
    }
    for (c, a) in p.coefficients.iter().enumerate() {
        m.set(n - 1, c, *a);
    }
    m
}

/// Real `4n × 4n` matrix of the companion system.
pub fn companion_real(p: &OdeProblem) -> DMatrix<f64> {
    opmatrix_to_real(&build_companion(p))
}

/// Sum of the terms sharing one `(a, b, k)` envelope, constants included:
/// `(cos·cos bt − sin·sin bt)·t^k/k!·e^{at}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mode {
    pub a: f64,
    pub b: f64,
    pub k: usize,
    pub cos: Quaternion,
    pub sin: Quaternion,
}

/// Solution of an [`OdeProblem`].
#[derive(Debug, Clone)]
pub struct ClosedFormSolution {
    pub problem: OdeProblem,
    pub terms: Vec<SolutionTerm>,
    /// One real per column of `T`; `terms[i].slot` indexes this list.
    pub fitted_constants: Vec<f64>,
    pub matrix: DMatrix<f64>,
    pub jordan: JordanData,
    pub tolerances: Tolerances,
    /// `T⁻¹ Φ(x₀)`, the constants used by [`state`](Self::state).
    initial_coordinates: DVector<f64>,
}

/// Quaternion held in the first four rows of column `c`.
fn top(t: &DMatrix<f64>, c: usize) -> Quaternion {
    Quaternion::new(t[(0, c)], t[(1, c)], t[(2, c)], t[(3, c)])
}

/// Terms read off the chain layout of `T`, constants not yet fitted.
fn extract_terms(jd: &JordanData) -> Vec<SolutionTerm> {
    let mut out = Vec::new();
    for ch in &jd.chains {
        for l in 0..ch.len {
            for i in l..ch.len {
                let k = i - l;
                match (ch.eigenvalue, ch.partner) {
                    (ChainEigenvalue::Real { value }, _) => out.push(SolutionTerm {
                        a: value,
                        b: 0.0,
                        k,
                        coeff_cos: top(&jd.t, ch.start + i),
                        coeff_sin: Quaternion::ZERO,
                        constant: 0.0,
                        slot: ch.start + l,
                    }),
                    (ChainEigenvalue::Pair { re, im }, Some(partner)) => {
                        let (u1, u2) = (top(&jd.t, ch.start + i), top(&jd.t, partner + i));
                        out.push(SolutionTerm {
                            a: re,
                            b: im,
                            k,
                            coeff_cos: u1,
                            coeff_sin: -u2,
                            constant: 0.0,
                            slot: ch.start + l,
                        });
                        out.push(SolutionTerm {
                            a: re,
                            b: im,
                            k,
                            coeff_cos: u2,
                            coeff_sin: u1,
                            constant: 0.0,
                            slot: partner + l,
                        });
                    }
                    (ChainEigenvalue::Pair { .. }, None) => unreachable!("pair chains always have a partner"),
                }
            }
        }
    }
    out
}

/// Solves with default tolerances.
pub fn solve(p: &OdeProblem) -> Result<ClosedFormSolution> {
    solve_with(p, &Tolerances::default())
}

pub fn solve_with(p: &OdeProblem, tol: &Tolerances) -> Result<ClosedFormSolution> {
    p.validate()?;
    let matrix = companion_real(p);
    let jd = jordan::decompose(&matrix, tol)?;
    let mut terms = extract_terms(&jd);
    let constants = fit_constants(&terms, p, tol.fit_residual)?;
    for t in terms.iter_mut() {
        t.constant = constants[t.slot];
    }
    let initial_coordinates = &jd.t_inv * stack(&p.initial);
    let sol = ClosedFormSolution {
        problem: p.clone(),
        terms,
        fitted_constants: constants,
        matrix,
        jordan: jd,
        tolerances: *tol,
        initial_coordinates,
    };
    sol.check_terms()?;
    Ok(sol)
}

impl ClosedFormSolution {
    pub fn order(&self) -> usize {
        self.problem.order
    }

    pub fn x0(&self) -> f64 {
        self.problem.x0
    }

    /// `Φ(x) = T exp(J(x − x₀)) T⁻¹ Φ(x₀)`, all `4n` components.
    pub fn state(&self, x: f64) -> Result<DVector<f64>> {
        let jd = &self.jordan;
        let e = exp_jordan(&jd.d, &jd.a, &jd.n, x - self.x0(), self.tolerances.commute)?;
        Ok(&jd.t * (e * &self.initial_coordinates))
    }

    /// `φ(x)` through the factored exponential.
    pub fn evaluate(&self, x: f64) -> Quaternion {
        match self.state(x) {
            Ok(v) => Quaternion::new(v[0], v[1], v[2], v[3]),
            Err(_) => self.evaluate_terms(x),
        }
    }

    /// `φ(x), φ'(x), …, φ^{(n−1)}(x)` through the factored exponential.
    pub fn evaluate_all(&self, x: f64) -> Result<Vec<Quaternion>> {
        Ok(unstack(&self.state(x)?))
    }

    /// `φ(x)` as the sum of the term list.
    pub fn evaluate_terms(&self, x: f64) -> Quaternion {
        self.derivative(x, 0)
    }

    /// `φ^{(d)}(x)` by differentiating every term analytically.
    pub fn derivative(&self, x: f64, d: usize) -> Quaternion {
        let t = x - self.x0();
        self.terms.iter().map(|term| term.derivative(t, d)).sum()
    }

    /// `‖φ^{(n)} − Σ a^{(p)} φ^{(p)}‖` at `x`.
    pub fn residual(&self, x: f64) -> f64 {
        let n = self.order();
        let mut r = self.derivative(x, n);
        for (p, a) in self.problem.coefficients.iter().enumerate() {
            r -= a.apply(self.derivative(x, p));
        }
        r.norm()
    }

    /// Terms heavy enough to display (`‖coeff‖·|constant| ≥ prune`).
    pub fn display_terms(&self) -> Vec<SolutionTerm> {
        self.terms.iter().filter(|t| t.weight() >= self.tolerances.prune).cloned().collect()
    }

    /// Terms merged by envelope `(a, b, k)`, constants folded in. Modes
    /// appear in first-seen order.
    pub fn modal_components(&self) -> Vec<Mode> {
        let mut modes: Vec<Mode> = Vec::new();
        for t in &self.terms {
            let (c, s) = (t.coeff_cos * t.constant, t.coeff_sin * t.constant);
            match modes.iter_mut().find(|m| m.a == t.a && m.b == t.b && m.k == t.k) {
                Some(m) => {
                    m.cos += c;
                    m.sin += s;
                }
                None => modes.push(Mode { a: t.a, b: t.b, k: t.k, cos: c, sin: s }),
            }
        }
        modes
    }

    /// Linearity class of the equation.
    pub fn linearity(&self) -> LinearityClass {
        self.problem.linearity()
    }

    /// Compares the term list with the factored exponential at a few points.
    fn check_terms(&self) -> Result<()> {
        for t in [0.0, 0.25, 0.5, 1.0] {
            let x = self.x0() + t;
            let exact = self.state(x)?;
            let scale = exact.norm().max(1.0);
            for d in 0..self.order() {
                let q = self.derivative(x, d);
                let e = Quaternion::new(exact[4 * d], exact[4 * d + 1], exact[4 * d + 2], exact[4 * d + 3]);
                let diff = (q - e).norm();
                if !(diff <= self.tolerances.term_check * scale) {
                    return Err(Error::Internal(format!(
                        "term expansion of φ^({d}) deviates from the matrix exponential by {diff:e} at x = {x}"
                    )));
                }
            }
        }
        Ok(())
    }
}
