//! Solutions of ℂ- and ℍ-linear equations as exponentials with quaternionic
//! constants on the right.
//!
//! When every coefficient commutes with right multiplication by `i` (or by
//! all of `i, j, k`), the companion matrix is ℂ-linear (ℍ-linear) and each
//! generalized eigenvector `v` yields solutions `top(P^l v)·e^{zt}·t^l/l!·c`
//! with `c` complex (quaternionic). These are built here directly from
//! kernels of `M − a − s·b·R_i`, independently of the real Jordan chains.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jordan::chains::{canonical_basis, null_space, Span};
use crate::operator::{LinearityClass, RealLinearOperator};
use crate::oracle::stack;
use crate::quaternion::Quaternion;
use crate::solver::fit::solve_square;
use crate::solver::terms::{binomial, factorial};
use crate::solver::ClosedFormSolution;
use crate::translation::op_to_real;

/// `coeff · exp(exponent·t) · t^degree/degree! · constant`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpTerm {
    pub coeff: Quaternion,
    pub exponent: Quaternion,
    pub degree: usize,
    pub constant: Quaternion,
    #[serde(skip)]
    pub slot: usize,
}

fn qpow(q: Quaternion, k: usize) -> Quaternion {
    (0..k).fold(Quaternion::ONE, |acc, _| acc * q)
}

impl ExpTerm {
    /// `d`-th derivative with the constant replaced by `c`.
    fn derivative_with(&self, t: f64, d: usize, c: Quaternion) -> Quaternion {
        let e = (self.exponent * t).exp();
        let l = self.degree;
        let mut g = Quaternion::ZERO;
        for j in 0..=d.min(l) {
            let poly = t.powi((l - j) as i32) / factorial(l - j);
            g += qpow(self.exponent, d - j) * e * (binomial(d, j) * poly);
        }
        self.coeff * g * c
    }

    pub fn derivative(&self, t: f64, d: usize) -> Quaternion {
        self.derivative_with(t, d, self.constant)
    }

    pub fn value(&self, t: f64) -> Quaternion {
        self.derivative(t, 0)
    }
}

/// A specialized solution; `terms[i].slot` indexes `constants`.
#[derive(Debug, Clone, Serialize)]
pub struct SpecializedSolution {
    pub class: LinearityClass,
    pub x0: f64,
    pub order: usize,
    pub terms: Vec<ExpTerm>,
    pub constants: Vec<Quaternion>,
}

impl SpecializedSolution {
    pub fn derivative(&self, x: f64, d: usize) -> Quaternion {
        let t = x - self.x0;
        self.terms.iter().map(|term| term.derivative(t, d)).sum()
    }

    pub fn evaluate(&self, x: f64) -> Quaternion {
        self.derivative(x, 0)
    }
}

/// Real matrix of right multiplication by `e_u` on every component.
fn right_action(dim: usize, u: usize) -> DMatrix<f64> {
    let block = op_to_real(&RealLinearOperator::right(u));
    let mut r = DMatrix::zeros(dim, dim);
    for b in 0..dim / 4 {
        r.fixed_view_mut::<4, 4>(4 * b, 4 * b).copy_from(&block);
    }
    r
}

fn top(v: &DVector<f64>) -> Quaternion {
    Quaternion::new(v[0], v[1], v[2], v[3])
}

/// Generators of `null(P^m)` as a module over ℂ (`ops = [R_i]`) or ℍ
/// (`ops = [R_i, R_j, R_k]`).
fn module_basis(p: &DMatrix<f64>, m: usize, ops: &[DMatrix<f64>], rank_tol: f64) -> Result<(Vec<DVector<f64>>, usize)> {
    let power = (0..m).fold(DMatrix::identity(p.nrows(), p.ncols()), |acc, _| p * acc);
    let kernel = canonical_basis(&null_space(&power, rank_tol)?);
    let mut span = Span::new();
    let mut gens = Vec::new();
    for cand in kernel.column_iter() {
        let v = cand.into_owned();
        if span.push(&v, 1e-8) {
            for op in ops {
                span.push(&(op * &v), 1e-8);
            }
            gens.push(v);
        }
    }
    Ok((gens, kernel.ncols()))
}

enum SlotKind {
    Complex,
    Quaternion,
}

impl SlotKind {
    fn reals(&self) -> usize {
        match self {
            SlotKind::Complex => 2,
            SlotKind::Quaternion => 4,
        }
    }
}

/// Rewrites the solution of a ℂ-linear or ℍ-linear equation.
///
/// ℂ-linear: `Σ top(P^l v)·e^{zt}·t^l/l!·c` with complex `c` and complex
/// exponents `z = a ± bi`. ℍ-linear: the same with quaternionic constants,
/// then every term is conjugated by `u = top(v)` into
/// `(top(P^l v)·u⁻¹)·e^{q t}·t^l/l!·(u h)` with `q = u z u⁻¹`.
///
/// Asking for `R_linear`, or for a class stricter than the equation's,
/// is a domain error.
pub fn specialize(sol: &ClosedFormSolution, class: LinearityClass) -> Result<SpecializedSolution> {
    if class == LinearityClass::RLinear {
        return Err(Error::Domain("R_linear equations have no ℂ/ℍ specialization".into()));
    }
    let own = sol.linearity();
    if !own.is_within(class) {
        return Err(Error::Domain(format!("equation is {own}, cannot specialize as {class}")));
    }
    let m = &sol.matrix;
    let dim = m.nrows();
    let tol = &sol.tolerances;
    let rights: Vec<DMatrix<f64>> = (1..4).map(|u| right_action(dim, u)).collect();
    let ops: &[DMatrix<f64>] = match class {
        LinearityClass::CLinear => &rights[..1],
        _ => &rights[..],
    };
    for r in ops {
        let comm = (m * r - r * m).norm();
        if comm > tol.classify * (1.0 + m.norm()) {
            return Err(Error::Domain(format!(
                "companion matrix does not commute with right multiplication (‖[M, R]‖ = {comm:e})"
            )));
        }
    }
    let slot_kind = || match class {
        LinearityClass::CLinear => SlotKind::Complex,
        _ => SlotKind::Quaternion,
    };

    let mut terms = Vec::new();
    let mut slots: Vec<SlotKind> = Vec::new();
    let mut covered = 0;
    let identity = DMatrix::<f64>::identity(dim, dim);

    let emit = |p: &DMatrix<f64>, mult: usize, exponent: Quaternion, terms: &mut Vec<ExpTerm>, slots: &mut Vec<SlotKind>| -> Result<usize> {
        let (gens, kdim) = module_basis(p, mult, ops, tol.rank)?;
        let p_norm = p.norm();
        for v in gens {
            let slot = slots.len();
            slots.push(slot_kind());
            let u = top(&v);
            let conjugate = matches!(class, LinearityClass::HLinear) && u.norm() > 1e-8 * v.amax();
            let u_inv = if conjugate { u.inverse()? } else { Quaternion::ONE };
            let mut w = v.clone();
            for l in 0..mult {
                if l > 0 {
                    w = p * &w;
                    if w.norm() <= 1e-10 * (1.0 + p_norm).powi(l as i32) * v.norm() {
                        break;
                    }
                }
                let (coeff, exponent) = if conjugate {
                    (top(&w) * u_inv, u * exponent * u_inv)
                } else {
                    (top(&w), exponent)
                };
                terms.push(ExpTerm { coeff, exponent, degree: l, constant: Quaternion::ZERO, slot });
            }
        }
        Ok(kdim)
    };

    for e in &sol.jordan.spectrum.real {
        let p = m - &identity * e.value;
        covered += emit(&p, e.mult, Quaternion::real(e.value), &mut terms, &mut slots)?;
    }
    for pair in &sol.jordan.spectrum.complex {
        let signs: &[f64] = match class {
            LinearityClass::CLinear => &[1.0, -1.0],
            _ => &[1.0],
        };
        for &s in signs {
            let p = m - &identity * pair.re - &rights[0] * (s * pair.im);
            let kdim = emit(&p, pair.mult, Quaternion::complex(pair.re, s * pair.im), &mut terms, &mut slots)?;
            covered += if signs.len() == 1 { 2 * kdim } else { kdim };
        }
    }
    let reals: usize = slots.iter().map(SlotKind::reals).sum();
    if covered != dim || reals != dim {
        return Err(Error::Chain(format!(
            "specialized basis spans {reals} real dimensions (kernels {covered}), expected {dim}"
        )));
    }

    // Fit the constants: one column per real component of each slot.
    let n = sol.order();
    let mut a = DMatrix::zeros(dim, dim);
    let mut offsets = Vec::with_capacity(slots.len());
    let mut col = 0;
    for kind in &slots {
        offsets.push(col);
        col += kind.reals();
    }
    for term in &terms {
        for r in 0..slots[term.slot].reals() {
            for d in 0..n {
                let v = term.derivative_with(0.0, d, Quaternion::basis(r)).to_array();
                for (c, val) in v.iter().enumerate() {
                    a[(4 * d + c, offsets[term.slot] + r)] += val;
                }
            }
        }
    }
    let x = solve_square(a, &stack(&sol.problem.initial), tol.fit_residual, "specialize")?;
    let constants: Vec<Quaternion> = slots
        .iter()
        .zip(&offsets)
        .map(|(kind, &o)| {
            let mut c = [0.0; 4];
            c[..kind.reals()].copy_from_slice(&x.as_slice()[o..o + kind.reals()]);
            Quaternion::from_array(c)
        })
        .collect();
    for t in terms.iter_mut() {
        t.constant = constants[t.slot];
    }

    let out = SpecializedSolution { class, x0: sol.x0(), order: n, terms, constants };
    for t in [0.0, 0.5, 1.0] {
        let x = sol.x0() + t;
        let reference = sol.evaluate(x);
        let diff = (out.evaluate(x) - reference).norm();
        if !(diff <= tol.term_check * reference.norm().max(1.0)) {
            return Err(Error::Internal(format!(
                "specialized solution deviates from the general one by {diff:e} at x = {x}"
            )));
        }
    }
    Ok(out)
}
