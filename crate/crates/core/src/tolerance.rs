//! Every numerical threshold used by the crate, in one place.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance record threaded through the solver pipeline.
///
/// Relative tolerances are scaled by the quantity named in their doc; the
/// rest are absolute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Agreement of the numerically realified Jordan form with its block
    /// structure, relative to `1 + max|J|`.
    pub unit: f64,
    /// Eigenvalue clustering, relative to `max(1, ‖M‖_F)`. Also the snap
    /// threshold for imaginary parts.
    pub cluster: f64,
    /// Rank decisions, relative to the largest singular value.
    pub rank: f64,
    /// Commutator test deciding whether the companion matrix is ℂ- or
    /// ℍ-linear, relative to `1 + ‖M‖_F`.
    pub classify: f64,
    /// Largest imaginary part allowed in the realified similarity, relative
    /// to its norm.
    pub realify: f64,
    /// Commutator bound for the D + A + N split, relative to `‖J‖ + 1`.
    pub commute: f64,
    /// Residual allowed when fitting constants to initial data.
    pub fit_residual: f64,
    /// Agreement between the term list and the factored exponential.
    pub term_check: f64,
    /// Display threshold for `‖coefficient‖·|constant|`.
    pub prune: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            unit: 1e-12,
            cluster: 1e-8,
            rank: 1e-10,
            classify: 1e-12,
            realify: 1e-9,
            commute: 1e-10,
            fit_residual: 1e-9,
            term_check: 1e-10,
            prune: 1e-12,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 9] = [
        "unit",
        "cluster",
        "rank",
        "classify",
        "realify",
        "commute",
        "fit_residual",
        "term_check",
        "prune",
    ];

    /// Sets a tolerance by name. Values must be finite and positive.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidProblem(format!(
                "tolerance `{name}` must be finite and positive, got {value}"
            )));
        }
        let slot = match name {
            "unit" => &mut self.unit,
            "cluster" => &mut self.cluster,
            "rank" => &mut self.rank,
            "classify" => &mut self.classify,
            "realify" => &mut self.realify,
            "commute" => &mut self.commute,
            "fit_residual" => &mut self.fit_residual,
            "term_check" => &mut self.term_check,
            "prune" => &mut self.prune,
            _ => {
                return Err(Error::InvalidProblem(format!(
                    "unknown tolerance `{name}` (expected one of {})",
                    Self::NAMES.join(", ")
                )))
            }
        };
        *slot = value;
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "unit" => self.unit,
            "cluster" => self.cluster,
            "rank" => self.rank,
            "classify" => self.classify,
            "realify" => self.realify,
            "commute" => self.commute,
            "fit_residual" => self.fit_residual,
            "term_check" => self.term_check,
            "prune" => self.prune,
            _ => return None,
        })
    }

    /// Parses a `name=value` assignment.
    pub fn apply_assignment(&mut self, assignment: &str) -> Result<()> {
        let (name, value) = assignment.split_once('=').ok_or_else(|| {
            Error::InvalidProblem(format!("expected name=value, got `{assignment}`"))
        })?;
        let value: f64 = value.trim().parse().map_err(|_| {
            Error::InvalidProblem(format!("tolerance value `{value}` is not a number"))
        })?;
        self.set(name.trim(), value)
    }

    /// Applies `QUATODE_TOL_<NAME>` overrides from an environment lookup.
    pub fn with_env_overrides<F>(mut self, lookup: F) -> Result<Self>
    where
        F: Fn(&str) -> Option<String>,
    {
        for name in Self::NAMES {
            let var = format!("QUATODE_TOL_{}", name.to_ascii_uppercase());
            if let Some(raw) = lookup(&var) {
                let value: f64 = raw.trim().parse().map_err(|_| {
                    Error::InvalidProblem(format!("{var}=`{raw}` is not a number"))
                })?;
                self.set(name, value)?;
            }
        }
        Ok(self)
    }

    /// Defaults plus overrides from the process environment.
    pub fn from_env() -> Result<Self> {
        Self::default().with_env_overrides(|k| std::env::var(k).ok())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_documented_values() {
        let t = Tolerances::default();
        assert_eq!(t.cluster, 1e-8);
        assert_eq!(t.rank, 1e-10);
        assert_eq!(t.unit, 1e-12);
    }

    #[test]
    fn assignment_and_env_overrides() {
        let mut t = Tolerances::default();
        t.apply_assignment("cluster=1e-6").unwrap();
        assert_eq!(t.cluster, 1e-6);
        assert!(t.apply_assignment("bogus=1").is_err());
        assert!(t.apply_assignment("rank=-1").is_err());
        assert!(t.apply_assignment("rank").is_err());

        let t = Tolerances::default()
            .with_env_overrides(|k| (k == "QUATODE_TOL_RANK").then(|| "1e-7".to_string()))
            .unwrap();
        assert_eq!(t.rank, 1e-7);
        assert_eq!(t.cluster, 1e-8);
    }
}
