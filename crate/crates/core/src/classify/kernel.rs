use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kernel function of an SVM. `Rbs` is the radial basis function
/// `exp(-gamma * |a - b|^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KernelSpec {
    Linear,
    Rbs { gamma: f64 },
}

impl KernelSpec {
    pub fn rbs(gamma: f64) -> Result<Self> {
        if gamma.is_finite() && gamma > 0.0 {
            Ok(Self::Rbs { gamma })
        } else {
            Err(Error::Config(format!(
                "rbs gamma must be positive, got {gamma}"
            )))
        }
    }

    /// Unchecked evaluation; callers guarantee equal lengths.
    pub(crate) fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Self::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Self::Rbs { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d2).exp()
            }
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Linear => f.write_str("linear"),
            Self::Rbs { gamma } => write!(f, "rbs({gamma})"),
        }
    }
}

pub fn kernel_eval(spec: &KernelSpec, a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(spec.eval(a, b))
}
