//! Closed-form solutions of homogeneous quaternionic linear differential
//! equations with constant coefficients,
//!
//! ```text
//! φ^(n)(x) = a^(n−1) φ^(n−1)(x) + … + a^(0) φ(x),
//! ```
//!
//! where every coefficient `a^(p)` is a real-linear operator on ℍ, written as
//! a real combination of `L_μ R_ν` (left multiplication by `e_μ`, right
//! multiplication by `e_ν`).
//!
//! The companion system is translated to a real `4n × 4n` matrix, put in
//! real Jordan form `M = T (D + A + N) T⁻¹`, and the solution is read off as
//! a sum of quaternion-valued terms `(c·cos bx − s·sin bx)·x^k/k!·e^{ax}`
//! with real constants fitted to the initial data.
//!
//! ```
//! use quatode::parser::parse_ode;
//! use quatode::solver::{solve, OdeProblem};
//! use quatode::Quaternion;
//!
//! let eq = parse_ode("D^2 - L_j*R_i").unwrap();
//! let problem = OdeProblem::from_expr(&eq, 0.0, vec![Quaternion::J, Quaternion::K]).unwrap();
//! let sol = solve(&problem).unwrap();
//! assert!(sol.evaluate(0.0).max_abs_diff(Quaternion::J) < 1e-12);
//! assert!(sol.residual(0.7) < 1e-9);
//! ```
//!
//! Modules, bottom up: [`quaternion`] and [`operator`] hold the algebra,
//! [`translation`] maps operators to 4×4 real matrices, [`jordan`] computes
//! spectra and real Jordan forms, [`solver`] builds and fits solutions,
//! [`oracle`] integrates the same system numerically, [`parser`] reads the
//! text formats and [`io`] the JSON problem files.

pub mod error;
pub mod io;
pub mod jordan;
pub mod operator;
pub mod oracle;
pub mod parser;
pub mod quaternion;
pub mod solver;
pub mod tolerance;
pub mod translation;

pub use error::{Error, Result};
pub use operator::{LinearityClass, OperatorMatrix, RealLinearOperator};
pub use quaternion::Quaternion;
pub use tolerance::Tolerances;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/quickstart.md")]
    mod quickstart {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/solving.md")]
    mod solving {}
    #[doc = include_str!("../../../book/src/specialization.md")]
    mod specialization {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
