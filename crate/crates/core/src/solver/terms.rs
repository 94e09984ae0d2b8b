//! Elementary solution terms `(c·cos bt − s·sin bt)·t^k/k!·e^{at}·constant`.

use num_complex::Complex64;
use serde::Serialize;

use crate::quaternion::Quaternion;

/// One term of a closed-form solution, in the shifted variable `t = x − x₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolutionTerm {
    pub a: f64,
    pub b: f64,
    pub k: usize,
    pub coeff_cos: Quaternion,
    pub coeff_sin: Quaternion,
    pub constant: f64,
    /// Which fitted constant this term carries.
    #[serde(skip)]
    pub slot: usize,
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `d^d/dt^d [e^{λt}·t^k/k!]`.
pub(crate) fn envelope_derivative(lambda: Complex64, k: usize, t: f64, d: usize) -> Complex64 {
    let e = (lambda * t).exp();
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..=d.min(k) {
        let poly = t.powi((k - j) as i32) / factorial(k - j);
        sum += lambda.powu((d - j) as u32) * (binomial(d, j) * poly);
    }
    sum * e
}

impl SolutionTerm {
    /// `d`-th derivative at `t` with the constant set to one.
    pub fn unit_derivative(&self, t: f64, d: usize) -> Quaternion {
        let g = envelope_derivative(Complex64::new(self.a, self.b), self.k, t, d);
        self.coeff_cos * g.re - self.coeff_sin * g.im
    }

    pub fn derivative(&self, t: f64, d: usize) -> Quaternion {
        self.unit_derivative(t, d) * self.constant
    }

    pub fn value(&self, t: f64) -> Quaternion {
        self.derivative(t, 0)
    }

    /// `‖coeff‖·|constant|`, the size used for display pruning.
    pub fn weight(&self) -> f64 {
        (self.coeff_cos.norm() + self.coeff_sin.norm()) * self.constant.abs()
    }
}
