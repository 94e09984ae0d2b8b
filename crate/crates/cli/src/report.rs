//! JSON documents written by `--json`.

use serde::Serialize;

use quatode::jordan::{ChainEigenvalue, ComplexPair, RealEigenvalue};
use quatode::solver::SolutionTerm;
use quatode::{Error, LinearityClass, Quaternion};

#[derive(Debug, Serialize)]
pub struct Evaluation {
    pub x: f64,
    pub value: Quaternion,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub derivatives: Vec<Quaternion>,
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub equation: String,
    pub order: usize,
    pub x0: f64,
    pub linearity: LinearityClass,
    pub terms: Vec<SolutionTerm>,
    pub fitted_constants: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub evaluations: Vec<Evaluation>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub comment: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct Block {
    pub eigenvalue: ChainEigenvalue,
    pub size: usize,
}

#[derive(Debug, Serialize)]
pub struct SpectrumReport {
    pub equation: String,
    pub dimension: usize,
    pub real: Vec<RealEigenvalue>,
    pub complex: Vec<ComplexPair>,
    pub blocks: Vec<Block>,
    pub nilpotent: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub comment: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct TranslateReport {
    pub operator: String,
    pub linearity: LinearityClass,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub equation: String,
    pub step: f64,
    pub grid: Vec<f64>,
    pub max_deviation: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct EvalReport {
    pub equation: String,
    pub points: Vec<Evaluation>,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub error: ErrorBody,
}

impl ErrorReport {
    pub fn new(e: &Error) -> Self {
        let (kind, offset) = match e {
            Error::Syntax { offset, .. } => ("syntax", Some(*offset)),
            Error::UnknownSymbol { offset, .. } => ("unknown_symbol", Some(*offset)),
            Error::InvalidProblem(_) => ("invalid_problem", None),
            Error::Shape(_) => ("shape", None),
            Error::Domain(_) => ("domain", None),
            Error::NoConvergence { .. } => ("no_convergence", None),
            Error::Chain(_) => ("chain", None),
            Error::Pairing { .. } => ("pairing", None),
            Error::Structure(_) => ("structure", None),
            Error::Precondition(_) => ("precondition", None),
            Error::Overflow { .. } => ("overflow", None),
            Error::Internal(_) => ("internal", None),
        };
        ErrorReport { error: ErrorBody { kind, message: e.to_string(), offset } }
    }
}
