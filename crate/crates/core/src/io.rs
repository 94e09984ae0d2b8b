//! JSON problem files.
//!
//! ```json
//! {"order": 2, "coefficients": ["L_j*R_i", "L_i*R_j"], "x0": 0, "initial": ["j", "k"]}
//! ```
//!
//! `coefficients` lists `a^(0) … a^(n−1)`. Instead of `order` and
//! `coefficients` a file may give the whole equation as
//! `"equation": "D^2 - L_i*R_j*D - L_j*R_i"`. Quaternions are strings,
//! numbers or `{"q0": …, "q1": …, "q2": …, "q3": …}` objects. An optional
//! `tolerances` object overrides individual entries of [`Tolerances`].
//! The accepted shape is published as [`SCHEMA`].

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::parser::{parse_ode, parse_operator};
use crate::quaternion::Quaternion;
use crate::solver::OdeProblem;
use crate::tolerance::Tolerances;

/// JSON Schema of problem files.
pub const SCHEMA: &str = include_str!("../schema/problem.schema.json");

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default)]
    pub order: Option<usize>,
    #[serde(default)]
    pub coefficients: Option<Vec<String>>,
    #[serde(default)]
    pub equation: Option<String>,
    #[serde(default)]
    pub x0: f64,
    pub initial: Vec<Quaternion>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

/// Byte offset of a 1-based `(line, column)` position.
fn byte_offset(src: &str, line: usize, column: usize) -> usize {
    let start: usize = src.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (start + column.saturating_sub(1)).min(src.len())
}

/// Maps an error inside the string field `field` to a message naming it.
fn in_field(field: &str, e: Error) -> Error {
    match e {
        Error::Syntax { offset, message } => Error::Syntax { offset, message: format!("{field}: {message}") },
        Error::UnknownSymbol { offset, symbol } => Error::Syntax {
            offset,
            message: format!("{field}: unknown symbol `{symbol}`"),
        },
        Error::InvalidProblem(m) => Error::InvalidProblem(format!("{field}: {m}")),
        other => other,
    }
}

impl ProblemFile {
    /// Parses a problem file. JSON errors carry the byte offset of the
    /// offending token.
    pub fn from_json(src: &str) -> Result<Self> {
        serde_json::from_str(src).map_err(|e| Error::Syntax {
            offset: byte_offset(src, e.line(), e.column()),
            message: e.to_string(),
        })
    }

    /// Checks the file and builds the problem it describes. Errors inside
    /// operator strings report offsets within that string.
    pub fn to_problem(&self) -> Result<OdeProblem> {
        let coefficients = match (&self.equation, &self.coefficients) {
            (Some(eq), None) => {
                let expr = parse_ode(eq).map_err(|e| in_field("equation", e))?;
                if let Some(order) = self.order {
                    if order != expr.order {
                        return Err(Error::InvalidProblem(format!(
                            "order is {order} but the equation has order {}",
                            expr.order
                        )));
                    }
                }
                expr.coefficients()
            }
            (None, Some(list)) => {
                let order = self
                    .order
                    .ok_or_else(|| Error::InvalidProblem("`coefficients` requires `order`".into()))?;
                if list.len() != order {
                    return Err(Error::InvalidProblem(format!(
                        "order {order} needs {order} coefficients, got {}",
                        list.len()
                    )));
                }
                list.iter()
                    .enumerate()
                    .map(|(i, s)| parse_operator(s).map_err(|e| in_field(&format!("coefficients[{i}]"), e)))
                    .collect::<Result<Vec<_>>>()?
            }
            (Some(_), Some(_)) => {
                return Err(Error::InvalidProblem("give either `equation` or `coefficients`, not both".into()))
            }
            (None, None) => return Err(Error::InvalidProblem("missing `equation` or `coefficients`".into())),
        };
        OdeProblem::new(coefficients, self.x0, self.initial.clone())
    }

    /// `base` with the file's overrides applied.
    pub fn tolerances_over(&self, base: Tolerances) -> Result<Tolerances> {
        let mut tol = base;
        for (name, value) in &self.tolerances {
            tol.set(name, *value)?;
        }
        Ok(tol)
    }
}

/// Reads a problem file into a problem and its tolerances, starting from
/// the defaults.
pub fn parse_problem(src: &str) -> Result<(OdeProblem, Tolerances)> {
    let file = ProblemFile::from_json(src)?;
    Ok((file.to_problem()?, file.tolerances_over(Tolerances::default())?))
}

/// Problem from an equation string and initial quaternions.
pub fn problem_from_parts(equation: &str, x0: f64, initial: Vec<Quaternion>) -> Result<OdeProblem> {
    OdeProblem::from_expr(&parse_ode(equation)?, x0, initial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::RealLinearOperator;

    #[test]
    fn coefficient_form() {
        let (p, tol) =
            parse_problem(r#"{"order":2, "coefficients":["L_j*R_i","L_i*R_j"], "x0":0, "initial":["j","k"]}"#).unwrap();
        assert_eq!(p.coefficients, vec![RealLinearOperator::basis(2, 1), RealLinearOperator::basis(1, 2)]);
        assert_eq!(p.initial, vec![Quaternion::J, Quaternion::K]);
        assert_eq!(tol, Tolerances::default());
    }

    #[test]
    fn equation_form_matches_coefficient_form() {
        let a = parse_problem(r#"{"equation":"D^2 - L_i*R_j*D - L_j*R_i", "initial":["j","k"]}"#).unwrap();
        let b = parse_problem(r#"{"order":2, "coefficients":["L_j*R_i","L_i*R_j"], "initial":["j","k"]}"#).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn quaternion_forms() {
        let (p, _) = parse_problem(r#"{"equation":"D - 1", "initial":[{"q0":1,"q1":0,"q2":2,"q3":0}]}"#).unwrap();
        assert_eq!(p.initial[0], Quaternion::new(1.0, 0.0, 2.0, 0.0));
        let (p, _) = parse_problem(r#"{"equation":"D - 1", "initial":[2.5]}"#).unwrap();
        assert_eq!(p.initial[0], Quaternion::real(2.5));
    }

    #[test]
    fn tolerance_overrides() {
        let (_, tol) = parse_problem(r#"{"equation":"D","initial":["1"],"tolerances":{"cluster":1e-6}}"#).unwrap();
        assert_eq!(tol.cluster, 1e-6);
        assert_eq!(tol.rank, Tolerances::default().rank);
        assert!(parse_problem(r#"{"equation":"D","initial":["1"],"tolerances":{"cluster":-1}}"#).is_err());
        assert!(parse_problem(r#"{"equation":"D","initial":["1"],"tolerances":{"bogus":1}}"#).is_err());
    }

    #[test]
    fn malformed_json_reports_offset() {
        let src = "{\"equation\": \"D\",\n \"initial\": [\"1\"] x}";
        match ProblemFile::from_json(src) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(&src[offset..offset + 1], "x"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_files() {
        let bad = [
            r#"{"initial":["1"]}"#,
            r#"{"equation":"D","coefficients":["1"],"order":1,"initial":["1"]}"#,
            r#"{"coefficients":["1"],"initial":["1"]}"#,
            r#"{"order":2,"coefficients":["1"],"initial":["1","1"]}"#,
            r#"{"equation":"D^2","order":1,"initial":["1","1"]}"#,
            r#"{"equation":"D^2","initial":["1"]}"#,
            r#"{"equation":"D","initial":["1"],"extra":3}"#,
        ];
        for src in bad {
            let err = parse_problem(src).unwrap_err();
            assert!(err.is_input_error(), "{src}: {err:?}");
        }
        match parse_problem(r#"{"order":1,"coefficients":["L_q"],"initial":["1"]}"#) {
            Err(Error::Syntax { offset: 0, message }) => assert!(message.starts_with("coefficients[0]")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schema_is_json() {
        let v: serde_json::Value = serde_json::from_str(SCHEMA).unwrap();
        assert_eq!(v["type"], "object");
        assert_eq!(v["additionalProperties"], false);
    }
}
