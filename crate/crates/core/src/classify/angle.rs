//! The geometric spinor rule and complex-plane features.
//!
//! The angle classifier splits the plane with the diameter through the origin
//! at direction `theta_star`. Points on the side containing `(1, 0)` are "up"
//! (+1), points on the side containing `(-1, 0)` are "down" (-1). A point
//! exactly on the diameter is called up.

use std::f64::consts::{FRAC_PI_4, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::AnalyticSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleClassifier {
    theta_star: f64,
}

impl Default for AngleClassifier {
    fn default() -> Self {
        Self {
            theta_star: FRAC_PI_4,
        }
    }
}

impl AngleClassifier {
    pub fn new(theta_star: f64) -> Result<Self> {
        if (0.0..TAU).contains(&theta_star) {
            Ok(Self { theta_star })
        } else {
            Err(Error::Config(format!(
                "theta_star must lie in [0, 2π), got {theta_star}"
            )))
        }
    }

    pub fn theta_star(&self) -> f64 {
        self.theta_star
    }

    /// Signed side of `(re, im)` relative to the boundary diameter: negative
    /// on the up side.
    pub fn side(&self, re: f64, im: f64) -> f64 {
        self.theta_star.cos() * im - self.theta_star.sin() * re
    }
}

pub fn ssm_angle_predict(clf: &AngleClassifier, re: f64, im: f64) -> Result<i8> {
    if re == 0.0 && im == 0.0 {
        return Err(Error::Domain("angle of the origin is undefined".into()));
    }
    Ok(if clf.side(re, im) > 0.0 { -1 } else { 1 })
}

/// Interleaved unit-modulus `(re, im)` lags ending at sample `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinorFeatures {
    pub vector: Vec<f64>,
    /// Lag positions (0 = oldest) whose sample had zero modulus and was
    /// replaced by `(1, 0)`.
    pub zero_modulus_lags: Vec<usize>,
}

pub fn spinor_features(z: &AnalyticSeries, t: usize, m: usize) -> Result<SpinorFeatures> {
    if m == 0 || t + 1 < m || t >= z.len() {
        return Err(Error::Bounds(format!(
            "{m} lags ending at sample {t} do not fit an embedding of length {}",
            z.len()
        )));
    }
    let mut vector = Vec::with_capacity(2 * m);
    let mut zero_modulus_lags = Vec::new();
    for (lag, s) in (t + 1 - m..=t).enumerate() {
        let r = z.modulus(s);
        if r == 0.0 || !r.is_finite() {
            zero_modulus_lags.push(lag);
            vector.extend_from_slice(&[1.0, 0.0]);
        } else {
            vector.extend_from_slice(&[z.re[s] / r, z.im[s] / r]);
        }
    }
    Ok(SpinorFeatures {
        vector,
        zero_modulus_lags,
    })
}

/// Raw `(re, im)` lags ending at sample `t`, without normalization.
pub fn plane_features(z: &AnalyticSeries, t: usize, m: usize) -> Result<Vec<f64>> {
    if m == 0 || t + 1 < m || t >= z.len() {
        return Err(Error::Bounds(format!(
            "{m} lags ending at sample {t} do not fit an embedding of length {}",
            z.len()
        )));
    }
    Ok((t + 1 - m..=t).flat_map(|s| [z.re[s], z.im[s]]).collect())
}

/// `arccosh(-⟨w, x⟩)`; the inner product must be at most -1.
pub fn hyperbolic_distance(w: &[f64], x: &[f64]) -> Result<f64> {
    if w.len() != x.len() {
        return Err(Error::Dimension {
            expected: w.len(),
            got: x.len(),
        });
    }
    let arg = -w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
    if !(arg >= 1.0) {
        return Err(Error::Domain(format!(
            "arccosh needs -<w,x> >= 1, got {arg}"
        )));
    }
    Ok(arg.acosh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn up_and_down_axes() {
        let clf = AngleClassifier::default();
        assert_eq!(ssm_angle_predict(&clf, 1.0, 0.0).unwrap(), 1);
        assert_eq!(ssm_angle_predict(&clf, -1.0, 0.0).unwrap(), -1);
        assert_eq!(ssm_angle_predict(&clf, 2.0, 0.0).unwrap(), 1);
        assert!(ssm_angle_predict(&clf, 0.0, 0.0).is_err());
        assert!(AngleClassifier::new(TAU).is_err());
        assert!(AngleClassifier::new(-0.1).is_err());
    }

    #[test]
    fn boundary_is_up() {
        let clf = AngleClassifier::new(0.0).unwrap();
        // theta* = 0: the real axis is the boundary
        assert_eq!(clf.side(3.0, 0.0), 0.0);
        assert_eq!(ssm_angle_predict(&clf, 3.0, 0.0).unwrap(), 1);
        assert_eq!(ssm_angle_predict(&clf, -3.0, 0.0).unwrap(), 1);
    }

    fn tone_embedding(n: usize, w: f64) -> AnalyticSeries {
        AnalyticSeries {
            re: (0..n).map(|t| 3.0 * (w * t as f64).cos()).collect(),
            im: (0..n).map(|t| 3.0 * (w * t as f64).sin()).collect(),
        }
    }

    #[test]
    fn spinor_lags() {
        let w = 0.3;
        let z = tone_embedding(20, w);
        let f = spinor_features(&z, 7, 1).unwrap();
        assert!((f.vector[0] - (7.0 * w).cos()).abs() < 1e-12);
        assert!((f.vector[1] - (7.0 * w).sin()).abs() < 1e-12);

        let f = spinor_features(&z, 10, 2).unwrap();
        let (a, b) = ((f.vector[0], f.vector[1]), (f.vector[2], f.vector[3]));
        // b = a rotated by w
        let rot = (a.0 * w.cos() - a.1 * w.sin(), a.0 * w.sin() + a.1 * w.cos());
        assert!((rot.0 - b.0).abs() < 1e-12 && (rot.1 - b.1).abs() < 1e-12);
        assert!(spinor_features(&z, 0, 2).is_err());
        assert_eq!(plane_features(&z, 1, 2).unwrap().len(), 4);
    }

    #[test]
    fn zero_lag_flagged() {
        let z = AnalyticSeries {
            re: vec![0.0, 2.0],
            im: vec![0.0, 0.0],
        };
        let f = spinor_features(&z, 1, 2).unwrap();
        assert_eq!(f.vector, vec![1.0, 0.0, 1.0, 0.0]);
        assert_eq!(f.zero_modulus_lags, vec![0]);
    }

    #[test]
    fn hyperbolic() {
        assert_eq!(hyperbolic_distance(&[1.0, 0.0], &[-1.0, 0.0]).unwrap(), 0.0);
        let c = 1.0f64.cosh();
        let d = hyperbolic_distance(&[c], &[-1.0]).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        assert!(matches!(
            hyperbolic_distance(&[0.5], &[1.0]),
            Err(Error::Domain(_))
        ));
    }

    proptest! {
        #[test]
        fn scaling_and_negation(theta in 0.0f64..TAU, phi in 0.0f64..TAU, c in 1e-3f64..1e3) {
            let clf = AngleClassifier::new(theta).unwrap();
            let (re, im) = (phi.cos(), phi.sin());
            prop_assume!(clf.side(re, im).abs() > 1e-9);
            let p = ssm_angle_predict(&clf, re, im).unwrap();
            prop_assert_eq!(ssm_angle_predict(&clf, c * re, c * im).unwrap(), p);
            prop_assert_eq!(ssm_angle_predict(&clf, -re, -im).unwrap(), -p);
        }
    }
}
