//! The sixteen-dimensional real algebra spanned by `L_μ R_ν`.
//!
//! `L_μ` multiplies by the basis quaternion `e_μ` from the left and `R_ν` from
//! the right, so `L_μ R_ν q = e_μ q e_ν`. Left and right actions commute, and
//! every ℝ-linear map ℍ → ℍ is a unique real combination of the sixteen
//! products.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::quaternion::Quaternion;

/// `(sign, index)` of `e_a · e_b`.
pub(crate) const BASIS_PRODUCT: [[(i8, usize); 4]; 4] = [
    [(1, 0), (1, 1), (1, 2), (1, 3)],
    [(1, 1), (-1, 0), (1, 3), (-1, 2)],
    [(1, 2), (-1, 3), (-1, 0), (1, 1)],
    [(1, 3), (1, 2), (-1, 1), (-1, 0)],
];

const UNIT_NAMES: [&str; 4] = ["1", "i", "j", "k"];

/// Right linearity of an operator, from weakest to strictest requirement.
///
/// `H` operators only act from the left; `C` operators may also multiply by
/// `i` from the right; `R` operators are unrestricted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LinearityClass {
    #[serde(rename = "H_linear")]
    HLinear,
    #[serde(rename = "C_linear")]
    CLinear,
    #[serde(rename = "R_linear")]
    RLinear,
}

impl LinearityClass {
    /// Weakest class containing both.
    pub fn join(self, other: LinearityClass) -> LinearityClass {
        self.max(other)
    }

    /// True when every `self` operator is also an `other` operator.
    pub fn is_within(self, other: LinearityClass) -> bool {
        self <= other
    }
}

impl fmt::Display for LinearityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LinearityClass::HLinear => "H_linear",
            LinearityClass::CLinear => "C_linear",
            LinearityClass::RLinear => "R_linear",
        })
    }
}

/// `Σ coeffs[μ][ν] · L_μ R_ν`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RealLinearOperator {
    pub coeffs: [[f64; 4]; 4],
}

impl RealLinearOperator {
    pub const fn zero() -> Self {
        RealLinearOperator { coeffs: [[0.0; 4]; 4] }
    }

    pub fn identity() -> Self {
        Self::scalar(1.0)
    }

    pub fn scalar(r: f64) -> Self {
        let mut op = Self::zero();
        op.coeffs[0][0] = r;
        op
    }

    /// `L_μ R_ν`.
    pub fn basis(mu: usize, nu: usize) -> Self {
        let mut op = Self::zero();
        op.coeffs[mu][nu] = 1.0;
        op
    }

    /// `L_μ`.
    pub fn left(mu: usize) -> Self {
        Self::basis(mu, 0)
    }

    /// `R_ν`.
    pub fn right(nu: usize) -> Self {
        Self::basis(0, nu)
    }

    /// Left multiplication by an arbitrary quaternion.
    pub fn left_mul(q: Quaternion) -> Self {
        let mut op = Self::zero();
        for (mu, c) in q.to_array().into_iter().enumerate() {
            op.coeffs[mu][0] = c;
        }
        op
    }

    /// Right multiplication by an arbitrary quaternion.
    pub fn right_mul(q: Quaternion) -> Self {
        let mut op = Self::zero();
        for (nu, c) in q.to_array().into_iter().enumerate() {
            op.coeffs[0][nu] = c;
        }
        op
    }

    pub fn apply(&self, q: Quaternion) -> Quaternion {
        let mut out = Quaternion::ZERO;
        for mu in 0..4 {
            for nu in 0..4 {
                let a = self.coeffs[mu][nu];
                if a != 0.0 {
                    out += Quaternion::basis(mu) * q * Quaternion::basis(nu) * a;
                }
            }
        }
        out
    }

    /// `self ∘ other`, i.e. apply `other` first.
    ///
    /// `(L_μ R_ν)(L_μ' R_ν') = L_{e_μ e_μ'} R_{e_ν' e_ν}`: left factors
    /// multiply in order, right factors in reverse.
    pub fn compose(&self, other: &RealLinearOperator) -> RealLinearOperator {
        let mut out = Self::zero();
        for mu in 0..4 {
            for nu in 0..4 {
                let a = self.coeffs[mu][nu];
                if a == 0.0 {
                    continue;
                }
                for mu2 in 0..4 {
                    for nu2 in 0..4 {
                        let b = other.coeffs[mu2][nu2];
                        if b == 0.0 {
                            continue;
                        }
                        let (sl, l) = BASIS_PRODUCT[mu][mu2];
                        let (sr, r) = BASIS_PRODUCT[nu2][nu];
                        out.coeffs[l][r] += (sl * sr) as f64 * a * b;
                    }
                }
            }
        }
        out
    }

    /// Strictest class whose coefficient support holds exactly.
    pub fn classify(&self) -> LinearityClass {
        self.classify_with_tol(0.0)
    }

    /// Like [`classify`](Self::classify), treating `|a_μν| ≤ tol` as zero.
    pub fn classify_with_tol(&self, tol: f64) -> LinearityClass {
        let nonzero = |nu: usize| (0..4).any(|mu| self.coeffs[mu][nu].abs() > tol);
        if nonzero(2) || nonzero(3) {
            LinearityClass::RLinear
        } else if nonzero(1) {
            LinearityClass::CLinear
        } else {
            LinearityClass::HLinear
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(|&c| c == 0.0)
    }

    pub fn max_abs_diff(&self, other: &RealLinearOperator) -> f64 {
        let mut m = 0.0_f64;
        for mu in 0..4 {
            for nu in 0..4 {
                m = m.max((self.coeffs[mu][nu] - other.coeffs[mu][nu]).abs());
            }
        }
        m
    }

    /// Euclidean norm of the coefficient array.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().flatten().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().flatten().all(|c| c.is_finite())
    }
}

impl Add for RealLinearOperator {
    type Output = RealLinearOperator;
    fn add(mut self, o: RealLinearOperator) -> RealLinearOperator {
        self += o;
        self
    }
}

impl AddAssign for RealLinearOperator {
    fn add_assign(&mut self, o: RealLinearOperator) {
        for mu in 0..4 {
            for nu in 0..4 {
                self.coeffs[mu][nu] += o.coeffs[mu][nu];
            }
        }
    }
}

impl Sub for RealLinearOperator {
    type Output = RealLinearOperator;
    fn sub(self, o: RealLinearOperator) -> RealLinearOperator {
        self + (-o)
    }
}

impl Neg for RealLinearOperator {
    type Output = RealLinearOperator;
    fn neg(self) -> RealLinearOperator {
        self * -1.0
    }
}

impl Mul<f64> for RealLinearOperator {
    type Output = RealLinearOperator;
    fn mul(mut self, r: f64) -> RealLinearOperator {
        for row in self.coeffs.iter_mut() {
            for c in row.iter_mut() {
                *c *= r;
            }
        }
        self
    }
}

/// Composition.
impl Mul for RealLinearOperator {
    type Output = RealLinearOperator;
    fn mul(self, o: RealLinearOperator) -> RealLinearOperator {
        self.compose(&o)
    }
}

/// Canonical text form, e.g. `L_i - 2*R_j - 3*L_i*R_k`. Terms appear in
/// `(μ, ν)` row-major order and the output parses back to the same operator.
impl fmt::Display for RealLinearOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for mu in 0..4 {
            for nu in 0..4 {
                let c = self.coeffs[mu][nu];
                if c == 0.0 {
                    continue;
                }
                match (first, c < 0.0) {
                    (true, true) => f.write_str("-")?,
                    (true, false) => {}
                    (false, true) => f.write_str(" - ")?,
                    (false, false) => f.write_str(" + ")?,
                }
                first = false;
                let mag = c.abs();
                let symbol = match (mu, nu) {
                    (0, 0) => String::new(),
                    (m, 0) => format!("L_{}", UNIT_NAMES[m]),
                    (0, n) => format!("R_{}", UNIT_NAMES[n]),
                    (m, n) => format!("L_{}*R_{}", UNIT_NAMES[m], UNIT_NAMES[n]),
                };
                if symbol.is_empty() {
                    write!(f, "{mag}")?;
                } else if mag == 1.0 {
                    f.write_str(&symbol)?;
                } else {
                    write!(f, "{mag}*{symbol}")?;
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Square array of operators acting on quaternionic column vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    n: usize,
    entries: Vec<RealLinearOperator>,
}

impl OperatorMatrix {
    pub fn zeros(n: usize) -> Self {
        OperatorMatrix { n, entries: vec![RealLinearOperator::zero(); n * n] }
    }

    pub fn from_rows(rows: Vec<Vec<RealLinearOperator>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "operator matrix must be square");
        OperatorMatrix { n, entries: rows.into_iter().flatten().collect() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> &RealLinearOperator {
        &self.entries[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, op: RealLinearOperator) {
        self.entries[r * self.n + c] = op;
    }

    pub fn apply(&self, v: &[Quaternion]) -> Vec<Quaternion> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|r| (0..self.n).map(|c| self.get(r, c).apply(v[c])).sum())
            .collect()
    }

    /// Weakest linearity class among all entries.
    pub fn classify(&self) -> LinearityClass {
        self.entries
            .iter()
            .map(RealLinearOperator::classify)
            .fold(LinearityClass::HLinear, LinearityClass::join)
    }

    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> f64 {
        assert_eq!(self.n, other.n);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}
