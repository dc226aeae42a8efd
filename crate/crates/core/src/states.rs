//! Physiology states, hidden states and the nonstationarity gate.
//!
//! Physiology states are the four quadrants of the complex-plane embedding.
//! Hidden states pack the slope signs of the instantaneous amplitudes of the
//! first three IMFs into three bits, giving the eight combinations. Both
//! encodings are choices made by this crate; only the counts (4 and 8) are
//! fixed.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::emd::{EmdResult, SiftConfig};
use crate::error::{Error, Result};
use crate::hhsa::{holo_decompose, HoloStack};
use crate::spectral::{gradient, hilbert_analytic, ichain_of, inst_attributes, AnalyticSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhysiologyState {
    S1,
    S2,
    S3,
    S4,
}

impl PhysiologyState {
    pub const ALL: [PhysiologyState; 4] = [Self::S1, Self::S2, Self::S3, Self::S4];

    /// Quadrant of the angle `atan2(im, re)` taken in `[0, 2π)`.
    pub fn from_point(re: f64, im: f64) -> Self {
        let mut theta = im.atan2(re);
        if theta < 0.0 {
            theta += 2.0 * std::f64::consts::PI;
        }
        match (theta / std::f64::consts::FRAC_PI_2).floor() as i64 {
            i64::MIN..=0 => Self::S1,
            1 => Self::S2,
            2 => Self::S3,
            _ => Self::S4,
        }
    }
}

impl fmt::Display for PhysiologyState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::S1 => "s1",
            Self::S2 => "s2",
            Self::S3 => "s3",
            Self::S4 => "s4",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhysiologyReading {
    pub state: PhysiologyState,
    /// Set when the sample had zero modulus and the state was carried over
    /// from an earlier sample.
    pub carried_forward: bool,
}

pub fn physiology_of(z: &AnalyticSeries, t: usize) -> Result<PhysiologyReading> {
    if t >= z.len() {
        return Err(Error::Bounds(format!(
            "sample {t} outside embedding of length {}",
            z.len()
        )));
    }
    let carried_forward = z.modulus(t) == 0.0;
    let state = (0..=t)
        .rev()
        .find(|&s| z.modulus(s) != 0.0)
        .map_or(PhysiologyState::S1, |s| {
            PhysiologyState::from_point(z.re[s], z.im[s])
        });
    Ok(PhysiologyReading {
        state,
        carried_forward,
    })
}

/// Three-bit hidden state, `0..8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HiddenState(u8);

impl HiddenState {
    pub fn new(bits: u8) -> Result<Self> {
        if bits < 8 {
            Ok(Self(bits))
        } else {
            Err(Error::Domain(format!("hidden state {bits} is not below 8")))
        }
    }

    pub fn bits(self) -> u8 {
        self.0
    }
}

/// Relative slope below which an amplitude counts as flat.
const FLAT_SLOPE: f64 = 1e-9;

fn rising(slope: &[f64], amp: &[f64], t: usize) -> bool {
    let scale = amp.iter().fold(0.0f64, |m, a| m.max(*a));
    slope[t] > FLAT_SLOPE * scale
}

/// Bit `i` is set iff the instantaneous amplitude of IMF `i + 1` rises at
/// `t`. Missing IMFs contribute a zero bit.
pub fn hidden_of(emd: &EmdResult, t: usize) -> Result<HiddenState> {
    let mut bits = 0u8;
    for (i, imf) in emd.imfs.iter().take(3).enumerate() {
        if t >= imf.samples.len() {
            return Err(Error::Bounds(format!("sample {t} outside IMF")));
        }
        let amp = inst_attributes(&hilbert_analytic(&imf.samples)?).amplitude;
        if rising(&gradient(&amp), &amp, t) {
            bits |= 1 << i;
        }
    }
    HiddenState::new(bits)
}

pub const DEFAULT_GATE_TAU: f64 = 1.0;
pub const DEFAULT_GATE_WINDOW: usize = 20;
const GATE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateDecision {
    pub emit: bool,
    pub score: f64,
    /// The stack had fewer than two AM layers.
    pub insufficient_depth: bool,
}

/// Nonstationarity score of the second AM layer at `t`: the last step of the
/// envelope divided by its standard deviation over the trailing window.
pub fn gate(stack: &HoloStack, t: usize, window: usize, tau: f64) -> Result<GateDecision> {
    if window < 4 {
        return Err(Error::Config(format!(
            "gate window must be at least 4, got {window}"
        )));
    }
    if stack.am_depth() < 2 {
        return Ok(GateDecision {
            emit: false,
            score: 0.0,
            insufficient_depth: true,
        });
    }
    let env = &stack.am_layers[1].envelope;
    if t == 0 || t >= env.len() {
        return Err(Error::Bounds(format!(
            "gate needs 1 <= t < {}, got {t}",
            env.len()
        )));
    }
    let start = (t + 1).saturating_sub(window);
    let w = &env[start..=t];
    let mean = w.iter().sum::<f64>() / w.len() as f64;
    let sd = (w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / w.len() as f64).sqrt();
    let score = (env[t] - env[t - 1]).abs() / (sd + GATE_EPS);
    Ok(GateDecision {
        emit: score > tau,
        score,
        insufficient_depth: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimelineRow {
    pub t: usize,
    pub physiology: PhysiologyState,
    pub hidden: HiddenState,
    pub gate_score: f64,
    pub emit: bool,
}

/// Parameters for a state timeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimelineConfig {
    pub sift: SiftConfig,
    pub layers: usize,
    pub gate_window: usize,
    pub gate_tau: f64,
}

impl Default for TimelineConfig {
    fn default() -> Self {
        Self {
            sift: SiftConfig::default(),
            layers: crate::hhsa::DEFAULT_LAYERS,
            gate_window: DEFAULT_GATE_WINDOW,
            gate_tau: DEFAULT_GATE_TAU,
        }
    }
}

/// Whole-series state labels. Everything is computed once over the full
/// input, so rows near the end see the same data as rows near the start;
/// this is a diagnostic view, not a causal one.
pub fn state_timeline(
    x: &[f64],
    cfg: &TimelineConfig,
) -> Result<(AnalyticSeries, Vec<TimelineRow>)> {
    let (z, emd) = ichain_of(x, &cfg.sift)?;
    let stack = holo_decompose(&z.re, cfg.layers, &cfg.sift)?;
    let amps: Vec<(Vec<f64>, Vec<f64>)> = emd
        .imfs
        .iter()
        .take(3)
        .map(|imf| {
            hilbert_analytic(&imf.samples).map(|a| {
                let amp = inst_attributes(&a).amplitude;
                (gradient(&amp), amp)
            })
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(x.len());
    for t in 0..x.len() {
        let physiology = physiology_of(&z, t)?.state;
        let bits =
            amps.iter().enumerate().fold(
                0u8,
                |b, (i, (slope, amp))| {
                    if rising(slope, amp, t) {
                        b | 1 << i
                    } else {
                        b
                    }
                },
            );
        let (gate_score, emit) = if t == 0 {
            (0.0, false)
        } else {
            let g = gate(&stack, t, cfg.gate_window, cfg.gate_tau)?;
            (g.score, g.emit)
        };
        rows.push(TimelineRow {
            t,
            physiology,
            hidden: HiddenState::new(bits)?,
            gate_score,
            emit,
        });
    }
    Ok((z, rows))
}

pub fn timeline_to_csv(rows: &[TimelineRow]) -> String {
    let mut out = String::from("t,physiology,hidden,gate_score,emit\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.t,
            r.physiology,
            r.hidden.bits(),
            r.gate_score,
            u8::from(r.emit)
        ));
    }
    out
}
