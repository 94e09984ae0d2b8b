//! Fixed-step RK4 for `y' = M y`, used to cross-check closed forms.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;

/// Longest integration interval accepted.
pub const MAX_INTERVAL: f64 = 10.0;
/// Largest step accepted.
pub const MAX_STEP: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub step: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { step: 1e-4 }
    }
}

impl IntegratorConfig {
    pub fn with_step(step: f64) -> Result<Self> {
        let cfg = IntegratorConfig { step };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step <= MAX_STEP) {
            return Err(Error::Precondition(format!(
                "RK4 step must lie in (0, {MAX_STEP}], got {}",
                self.step
            )));
        }
        Ok(())
    }
}

/// Integrates from `x0` to `x1` (either direction). The step is shrunk so a
/// whole number of steps lands exactly on `x1`.
pub fn integrate(m: &DMatrix<f64>, y0: &DVector<f64>, x0: f64, x1: f64, cfg: &IntegratorConfig) -> Result<DVector<f64>> {
    cfg.validate()?;
    if !m.is_square() || m.nrows() != y0.len() {
        return Err(Error::Shape(format!(
            "matrix is {}×{} but the state has length {}",
            m.nrows(),
            m.ncols(),
            y0.len()
        )));
    }
    let span = x1 - x0;
    if !span.is_finite() || span.abs() > MAX_INTERVAL {
        return Err(Error::Precondition(format!(
            "integration interval [{x0}, {x1}] is longer than {MAX_INTERVAL}"
        )));
    }
    let steps = (span.abs() / cfg.step).ceil().max(0.0) as usize;
    if steps == 0 {
        return Ok(y0.clone());
    }
    let h = span / steps as f64;
    let mut y = y0.clone();
    for s in 0..steps {
        let k1 = m * &y;
        let k2 = m * (&y + &k1 * (h / 2.0));
        let k3 = m * (&y + &k2 * (h / 2.0));
        let k4 = m * (&y + &k3 * h);
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow { x: x0 + h * (s + 1) as f64 });
        }
    }
    Ok(y)
}

/// Stacks quaternions into a real column, component `r` at rows `4r..4r+3`.
pub fn stack(values: &[Quaternion]) -> DVector<f64> {
    DVector::from_iterator(4 * values.len(), values.iter().flat_map(|q| q.to_array()))
}

/// Inverse of [`stack`].
pub fn unstack(v: &DVector<f64>) -> Vec<Quaternion> {
    v.as_slice().chunks(4).map(|c| Quaternion::new(c[0], c[1], c[2], c[3])).collect()
}
