//! Analytic signals and instantaneous attributes.
//!
//! The Hilbert transform is built in the frequency domain: forward DFT, zero
//! the negative-frequency bins, double the positive ones, leave DC and
//! Nyquist alone, inverse DFT. Any length is accepted.
//!
//! The ICHAIN embedding of a close series is taken here to be the analytic
//! signal of the EMD-detrended closes (closes minus the EMD residual). This is
//! a reconstruction: the original construction is defined elsewhere and is
//! not reproduced verbatim.

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::emd::{decompose, EmdResult, SiftConfig};
use crate::error::{Error, Result};
use crate::ingest::PriceSeries;

/// Real and imaginary channels of an analytic signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSeries {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl AnalyticSeries {
    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    pub fn modulus(&self, t: usize) -> f64 {
        self.re[t].hypot(self.im[t])
    }

    /// `t,re,im` rows for scatter plots.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,re,im\n");
        for (t, (r, i)) in self.re.iter().zip(&self.im).enumerate() {
            out.push_str(&format!("{t},{r},{i}\n"));
        }
        out
    }
}

/// Instantaneous amplitude, unwrapped phase and frequency (radians/sample).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstAttr {
    pub amplitude: Vec<f64>,
    pub phase: Vec<f64>,
    pub frequency: Vec<f64>,
    /// Samples whose modulus was zero; their phase was carried forward.
    pub zero_modulus: Vec<usize>,
}

/// Hilbert transform of `x` via the DFT.
pub fn hilbert_transform(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if n < 4 {
        return Err(Error::InsufficientData { needed: 4, got: n });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite sample".into()));
    }
    let mut planner = FftPlanner::<f64>::new();
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);

    let half = n / 2;
    for (k, c) in buf.iter_mut().enumerate() {
        if k == 0 || (n.is_multiple_of(2) && k == half) {
            continue;
        } else if k <= (n - 1) / 2 {
            *c *= 2.0;
        } else {
            *c = Complex::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    Ok(buf.iter().map(|c| c.im * scale).collect())
}

/// Analytic signal of `x`; the real channel is `x` itself.
pub fn hilbert_analytic(x: &[f64]) -> Result<AnalyticSeries> {
    let im = hilbert_transform(x)?;
    Ok(AnalyticSeries { re: x.to_vec(), im })
}

/// Central differences in the interior, one-sided at the ends.
pub fn gradient(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    match n {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..n)
            .map(|t| {
                if t == 0 {
                    v[1] - v[0]
                } else if t == n - 1 {
                    v[n - 1] - v[n - 2]
                } else {
                    0.5 * (v[t + 1] - v[t - 1])
                }
            })
            .collect(),
    }
}

pub fn inst_attributes(z: &AnalyticSeries) -> InstAttr {
    let n = z.len();
    let mut amplitude = Vec::with_capacity(n);
    let mut phase = Vec::with_capacity(n);
    let mut zero_modulus = Vec::new();
    let mut prev_wrapped = 0.0;
    let mut offset = 0.0;
    for t in 0..n {
        let a = z.modulus(t);
        amplitude.push(a);
        let wrapped = if a == 0.0 {
            zero_modulus.push(t);
            prev_wrapped
        } else {
            z.im[t].atan2(z.re[t])
        };
        if t > 0 {
            let d = wrapped - prev_wrapped;
            if d > std::f64::consts::PI {
                offset -= 2.0 * std::f64::consts::PI;
            } else if d < -std::f64::consts::PI {
                offset += 2.0 * std::f64::consts::PI;
            }
        }
        phase.push(wrapped + offset);
        prev_wrapped = wrapped;
    }
    let frequency = gradient(&phase);
    InstAttr {
        amplitude,
        phase,
        frequency,
        zero_modulus,
    }
}

/// Complex-plane embedding of a close series, together with the
/// decomposition used to detrend it.
pub fn ichain_decompose(
    series: &PriceSeries,
    cfg: &SiftConfig,
) -> Result<(AnalyticSeries, EmdResult)> {
    ichain_of(&series.closes(), cfg)
}

pub fn ichain_embed(series: &PriceSeries, cfg: &SiftConfig) -> Result<AnalyticSeries> {
    ichain_decompose(series, cfg).map(|(z, _)| z)
}

/// Embedding of a raw sample vector: EMD-detrend, then analytic signal.
pub fn ichain_of(x: &[f64], cfg: &SiftConfig) -> Result<(AnalyticSeries, EmdResult)> {
    let emd = decompose(x, cfg)?;
    let detrended: Vec<f64> = x.iter().zip(&emd.residual).map(|(v, r)| v - r).collect();
    Ok((hilbert_analytic(&detrended)?, emd))
}
