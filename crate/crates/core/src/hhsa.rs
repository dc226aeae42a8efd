//! Holo-Hilbert layers: repeated amplitude-modulation extraction.
//!
//! Each AM layer takes the absolute value of its input, fits a natural spline
//! through the maxima, and embeds that envelope in the complex plane (EMD
//! detrend followed by the analytic signal). The next layer repeats the
//! procedure on the envelope. The FM branch runs the same recursion starting
//! from the instantaneous frequency of the input.
//!
//! Envelopes are not clamped to `|x|`; a natural spline may dip below `|x|`
//! between anchors, and each layer records how many samples do so.

use serde::{Deserialize, Serialize};

use crate::emd::{local_extrema, spline_envelope, SiftConfig};
use crate::error::{Error, Result};
use crate::spectral::{ichain_of, inst_attributes, AnalyticSeries, InstAttr};

pub const DEFAULT_LAYERS: usize = 4;

/// Relative range below which an envelope counts as constant.
const FLAT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoloLayer {
    /// 1-based depth.
    pub layer_index: usize,
    pub envelope: Vec<f64>,
    pub analytic: AnalyticSeries,
    pub attrs: InstAttr,
    /// Samples where the envelope sits below `|input|`.
    pub undershoot: usize,
}

impl HoloLayer {
    /// Mean instantaneous frequency over the central 80% of the layer
    /// (phase advance divided by elapsed samples), in radians per sample.
    pub fn dominant_frequency(&self) -> f64 {
        let n = self.attrs.phase.len();
        let (lo, hi) = (n / 10, n - 1 - n / 10);
        if hi <= lo {
            return 0.0;
        }
        (self.attrs.phase[hi] - self.attrs.phase[lo]) / (hi - lo) as f64
    }

    /// `t,envelope,frequency,amplitude` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,envelope,frequency,amplitude\n");
        for t in 0..self.envelope.len() {
            out.push_str(&format!(
                "{t},{},{},{}\n",
                self.envelope[t], self.attrs.frequency[t], self.attrs.amplitude[t]
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoloStack {
    pub source: Vec<f64>,
    pub am_layers: Vec<HoloLayer>,
    pub fm_layers: Vec<HoloLayer>,
}

impl HoloStack {
    pub fn am_depth(&self) -> usize {
        self.am_layers.len()
    }

    pub fn fm_depth(&self) -> usize {
        self.fm_layers.len()
    }
}

/// Natural spline through the maxima of `|x|`.
pub fn envelope_of_abs(x: &[f64]) -> Result<Vec<f64>> {
    let abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    let (lo, hi) = abs.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    if abs.len() < 3 || hi - lo <= FLAT_TOLERANCE * hi {
        return Err(Error::NotDecomposable { layer: 1 });
    }
    let (maxima, _) = local_extrema(&abs)?;
    if maxima.len() < 2 {
        return Err(Error::NotDecomposable { layer: 1 });
    }
    spline_envelope(&maxima, &abs)
}

fn build_layer(input: &[f64], layer_index: usize, cfg: &SiftConfig) -> Result<HoloLayer> {
    let envelope = envelope_of_abs(input).map_err(|e| match e {
        Error::NotDecomposable { .. } => Error::NotDecomposable { layer: layer_index },
        other => other,
    })?;
    if envelope.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotDecomposable { layer: layer_index });
    }
    let undershoot = envelope
        .iter()
        .zip(input)
        .filter(|(e, x)| **e < x.abs())
        .count();
    let (analytic, _) = ichain_of(&envelope, cfg)?;
    let attrs = inst_attributes(&analytic);
    Ok(HoloLayer {
        layer_index,
        envelope,
        analytic,
        attrs,
        undershoot,
    })
}

fn recurse(start: &[f64], layers: usize, cfg: &SiftConfig) -> Result<Vec<HoloLayer>> {
    let mut out: Vec<HoloLayer> = Vec::new();
    for k in 1..=layers {
        let input = out.last().map_or(start, |l| l.envelope.as_slice());
        match build_layer(input, k, cfg) {
            Ok(layer) => out.push(layer),
            Err(Error::NotDecomposable { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Builds up to `layers` AM and FM layers; each branch stops at the first
/// layer whose input has no usable maxima.
pub fn holo_decompose(x: &[f64], layers: usize, cfg: &SiftConfig) -> Result<HoloStack> {
    if layers == 0 {
        return Err(Error::Config("layer count must be at least 1".into()));
    }
    if x.len() < 16 {
        return Err(Error::InsufficientData {
            needed: 16,
            got: x.len(),
        });
    }
    cfg.validate()?;
    let am_layers = recurse(x, layers, cfg)?;
    let (z, _) = ichain_of(x, cfg)?;
    let frequency = inst_attributes(&z).frequency;
    let fm_layers = recurse(&frequency, layers, cfg)?;
    Ok(HoloStack {
        source: x.to_vec(),
        am_layers,
        fm_layers,
    })
}

/// End-point slope of the second AM layer at sample `t`: one-sided at the
/// last sample, central elsewhere.
pub fn am2_signal(stack: &HoloStack, t: usize) -> Result<f64> {
    if stack.am_depth() < 2 {
        return Err(Error::InsufficientDepth {
            needed: 2,
            got: stack.am_depth(),
        });
    }
    let env = &stack.am_layers[1].envelope;
    let n = env.len();
    if t >= n || n < 2 {
        return Err(Error::Bounds(format!(
            "sample {t} outside layer of length {n}"
        )));
    }
    Ok(if t == n - 1 {
        env[t] - env[t - 1]
    } else if t == 0 {
        env[1] - env[0]
    } else {
        0.5 * (env[t + 1] - env[t - 1])
    })
}
