//! Walk-forward directional backtests.
//!
//! A run trains once on the training range and then walks the out-of-sample
//! range one signal day at a time. Every feature for day `t` is computed from
//! closes up to and including `t`: the complex-plane strategies re-embed a
//! trailing window of log closes ending at `t` instead of slicing a
//! whole-series embedding, so later data cannot leak in through the EMD or
//! the FFT.

mod report;

pub use report::{compare_to_csv, CompareRow, ReportSummary};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classify::{
    plane_features, smo_train, spinor_features, ssm_angle_predict, svm_predict, AngleClassifier,
    KernelSpec, SmoParams, SvmModel,
};
use crate::emd::SiftConfig;
use crate::error::{Error, Result};
use crate::hhsa::{am2_signal, holo_decompose, DEFAULT_LAYERS};
use crate::ingest::{direction_label, log_returns_ending, PriceSeries, SplitSpec};
use crate::spectral::{ichain_of, AnalyticSeries};
use crate::states::{gate, physiology_of, PhysiologyState, DEFAULT_GATE_TAU, DEFAULT_GATE_WINDOW};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StrategyKind {
    /// Kernel SVM on lagged log-returns.
    Svm,
    /// Kernel SVM on raw complex-plane lags of the embedding.
    HtSvm,
    /// Fixed diameter rule on the last embedded point.
    SsmAngle,
    /// Kernel SVM on unit-modulus complex-plane lags.
    HtSsm,
    /// Slope of the second AM layer, gated, two days ahead.
    HhsaAm2,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] = [
        Self::Svm,
        Self::HtSvm,
        Self::SsmAngle,
        Self::HtSsm,
        Self::HhsaAm2,
    ];

    pub fn default_horizon(self) -> usize {
        match self {
            Self::HhsaAm2 => 2,
            _ => 1,
        }
    }

    fn uses_kernel(self) -> bool {
        matches!(self, Self::Svm | Self::HtSvm | Self::HtSsm)
    }

    fn uses_embedding(self) -> bool {
        !matches!(self, Self::Svm)
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Svm => "SVM",
            Self::HtSvm => "HT_SVM",
            Self::SsmAngle => "SSM_ANGLE",
            Self::HtSsm => "HT_SSM",
            Self::HhsaAm2 => "HHSA_AM2",
        })
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown strategy `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategySpec {
    pub kind: StrategyKind,
    /// Ignored by strategies without a trained model.
    pub kernel: KernelSpec,
    pub horizon: usize,
    pub feature_lags: usize,
}

impl StrategySpec {
    pub fn new(kind: StrategyKind, kernel: KernelSpec, feature_lags: usize) -> Self {
        Self {
            kind,
            kernel,
            horizon: kind.default_horizon(),
            feature_lags,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon != self.kind.default_horizon() {
            return Err(Error::Config(format!(
                "{} requires horizon {}, got {}",
                self.kind,
                self.kind.default_horizon(),
                self.horizon
            )));
        }
        if self.feature_lags == 0 {
            return Err(Error::Config("feature_lags must be at least 1".into()));
        }
        if let KernelSpec::Rbs { gamma } = self.kernel {
            KernelSpec::rbs(gamma)?;
        }
        Ok(())
    }

    /// Short name used in report files, e.g. `HT_SSM rbs(0.05)`.
    pub fn label(&self) -> String {
        if self.kind.uses_kernel() {
            format!("{} {}", self.kind, self.kernel)
        } else {
            self.kind.to_string()
        }
    }
}

/// Everything besides the strategy that shapes a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BacktestConfig {
    pub sift: SiftConfig,
    /// Trailing closes re-embedded for each signal day.
    pub embed_window: usize,
    /// Training days used, counted back from the end of the training range.
    pub train_samples: usize,
    pub smo: SmoParams,
    pub theta_star: f64,
    pub layers: usize,
    pub gate_window: usize,
    pub gate_tau: f64,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        Self {
            sift: SiftConfig::default(),
            embed_window: 128,
            train_samples: 200,
            smo: SmoParams::default(),
            theta_star: std::f64::consts::FRAC_PI_4,
            layers: DEFAULT_LAYERS,
            gate_window: DEFAULT_GATE_WINDOW,
            gate_tau: DEFAULT_GATE_TAU,
        }
    }
}

impl BacktestConfig {
    pub fn validate(&self) -> Result<()> {
        self.sift.validate()?;
        AngleClassifier::new(self.theta_star)?;
        if self.embed_window < 16 {
            return Err(Error::Config(format!(
                "embed_window must be at least 16, got {}",
                self.embed_window
            )));
        }
        if self.train_samples < 2 {
            return Err(Error::Config("train_samples must be at least 2".into()));
        }
        if self.layers == 0 {
            return Err(Error::Config(format!(
                "layers must be at least 1, got {}",
                self.layers
            )));
        }
        if self.gate_window < 4 {
            return Err(Error::Config("gate_window must be at least 4".into()));
        }
        if !(self.gate_tau.is_finite() && self.gate_tau >= 0.0) {
            return Err(Error::Config(
                "gate_tau must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub signal_ordinal: usize,
    pub target_ordinal: usize,
    /// +1 up, -1 down.
    pub direction: i8,
    /// False on days a gated strategy stays silent.
    pub emitted: bool,
}

impl Prediction {
    pub fn new(signal_ordinal: usize, horizon: usize, direction: i8, emitted: bool) -> Self {
        Self {
            signal_ordinal,
            target_ordinal: signal_ordinal + horizon,
            direction,
            emitted,
        }
    }

    pub fn flipped(self) -> Self {
        Self {
            direction: -self.direction,
            ..self
        }
    }
}

/// `direction · (close(target) − close(target − 1))`, zero when silent.
pub fn profit_of(prediction: &Prediction, series: &PriceSeries) -> Result<f64> {
    let to = series.close_at(prediction.target_ordinal)?;
    let from = series.close_at(prediction.target_ordinal - 1)?;
    if !prediction.emitted {
        return Ok(0.0);
    }
    Ok(f64::from(prediction.direction) * (to - from))
}

/// `100 · (new − base) / base`.
pub fn improved_performance(p_base: f64, p_new: f64) -> Result<f64> {
    if p_base == 0.0 || !p_base.is_finite() || !p_new.is_finite() {
        return Err(Error::Undefined(format!(
            "improvement over a base accuracy of {p_base}"
        )));
    }
    Ok(100.0 * (p_new - p_base) / p_base)
}

/// Percentage of emitted rows that were correct.
pub fn accuracy_of(rows: &[LedgerRow]) -> Result<f64> {
    let emitted = rows.iter().filter(|r| r.prediction.emitted).count();
    if emitted == 0 {
        return Err(Error::Undefined("accuracy with zero signals".into()));
    }
    let correct = rows.iter().filter(|r| r.correct == Some(true)).count();
    Ok(100.0 * correct as f64 / emitted as f64)
}

/// One out-of-sample day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub prediction: Prediction,
    /// Close on the signal day.
    pub close: f64,
    pub profit: f64,
    /// `None` for silent days.
    pub correct: Option<bool>,
    /// The realized move was zero.
    pub flat: bool,
    pub state: Option<PhysiologyState>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestReport {
    pub symbol: String,
    pub strategy: StrategySpec,
    /// Overrides the strategy label in report files, e.g. for replays.
    pub label: String,
    pub n_signals: usize,
    pub n_correct: usize,
    /// `None` when nothing was emitted.
    pub accuracy: Option<f64>,
    pub profit: f64,
    pub rows: Vec<LedgerRow>,
}

impl BacktestReport {
    pub fn days(&self) -> usize {
        self.rows.len()
    }

    /// The same days with every direction reversed. Flat days stay wrong.
    pub fn flipped(&self, series: &PriceSeries) -> Result<Self> {
        let preds: Vec<_> = self.rows.iter().map(|r| r.prediction.flipped()).collect();
        let states: Vec<_> = self.rows.iter().map(|r| r.state).collect();
        let mut out = score(&self.symbol, self.strategy, series, &preds, &states)?;
        out.label = self.label.clone();
        Ok(out)
    }
}

/// Scores predictions against realized moves. `states` is either empty or
/// parallel to `predictions`.
pub fn score(
    symbol: &str,
    strategy: StrategySpec,
    series: &PriceSeries,
    predictions: &[Prediction],
    states: &[Option<PhysiologyState>],
) -> Result<BacktestReport> {
    if !states.is_empty() && states.len() != predictions.len() {
        return Err(Error::Dimension {
            expected: predictions.len(),
            got: states.len(),
        });
    }
    let mut rows = Vec::with_capacity(predictions.len());
    for (i, p) in predictions.iter().enumerate() {
        let profit = profit_of(p, series)?;
        let to = series.close_at(p.target_ordinal)?;
        let from = series.close_at(p.target_ordinal - 1)?;
        let flat = to == from;
        let correct = p
            .emitted
            .then_some(!flat && (to > from) == (p.direction > 0));
        rows.push(LedgerRow {
            prediction: *p,
            close: series.close_at(p.signal_ordinal)?,
            profit,
            correct,
            flat,
            state: states.get(i).copied().flatten(),
        });
    }
    let n_signals = rows.iter().filter(|r| r.prediction.emitted).count();
    let n_correct = rows.iter().filter(|r| r.correct == Some(true)).count();
    let profit = rows.iter().map(|r| r.profit).sum();
    let accuracy = accuracy_of(&rows).ok();
    Ok(BacktestReport {
        symbol: symbol.to_string(),
        strategy,
        label: strategy.label(),
        n_signals,
        n_correct,
        accuracy,
        profit,
        rows,
    })
}

/// Parses a `date_number,close,signal` ledger where `signal` is `up`,
/// `down` or `none`. Ordinals may skip days.
pub fn parse_signal_ledger(
    symbol: &str,
    text: &str,
) -> Result<(PriceSeries, Vec<(usize, Option<i8>)>)> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "date_number,close,signal" => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: "expected header `date_number,close,signal`".into(),
            })
        }
    }
    let mut points = Vec::new();
    let mut signals = Vec::new();
    for (i, line) in lines {
        let no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let [ord, close, signal] = cols[..] else {
            return Err(Error::Parse {
                line: no,
                msg: format!("expected 3 columns, got {}", cols.len()),
            });
        };
        let bad = |msg: String| Error::Parse { line: no, msg };
        let ord: usize = ord
            .parse()
            .map_err(|_| bad(format!("bad date_number `{ord}`")))?;
        let close: f64 = close
            .parse()
            .map_err(|_| bad(format!("bad close `{close}`")))?;
        let dir = match signal {
            "up" => Some(1),
            "down" => Some(-1),
            "none" | "" => None,
            other => return Err(bad(format!("bad signal `{other}`"))),
        };
        points.push(crate::ingest::PricePoint {
            date: ord.to_string(),
            date_ordinal: ord,
            close,
        });
        signals.push((ord, dir));
    }
    Ok((PriceSeries::new(symbol, points)?, signals))
}

/// Replays externally supplied signals. Signals whose target or the day
/// before it is missing from the series are skipped.
pub fn replay(
    series: &PriceSeries,
    strategy: StrategySpec,
    signals: &[(usize, Option<i8>)],
) -> Result<BacktestReport> {
    strategy.validate()?;
    let preds: Vec<Prediction> = signals
        .iter()
        .map(|&(ord, dir)| Prediction::new(ord, strategy.horizon, dir.unwrap_or(1), dir.is_some()))
        .filter(|p| {
            series.index_of(p.target_ordinal).is_some()
                && series.index_of(p.target_ordinal - 1).is_some()
        })
        .collect();
    let mut report = score(&series.symbol, strategy, series, &preds, &[])?;
    report.label = format!("{} replay", strategy.kind);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
enum Model {
    Svm(SvmModel, Scaler),
    /// Training data held one class only.
    Constant(i8),
    Angle(AngleClassifier),
    Holo,
}

/// Per-feature z-scoring fitted on the training rows.
#[derive(Debug, Clone, PartialEq)]
struct Scaler {
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl Scaler {
    fn fit(x: &[Vec<f64>]) -> Self {
        let n = x.len() as f64;
        let d = x[0].len();
        let mean: Vec<f64> = (0..d)
            .map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n)
            .collect();
        let scale = (0..d)
            .map(|j| {
                let var = x.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n;
                if var > 0.0 {
                    var.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        Self { mean, scale }
    }

    fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

/// A strategy with its model fitted on the training range.
#[derive(Debug, Clone, PartialEq)]
pub struct Trained {
    pub strategy: StrategySpec,
    pub cfg: BacktestConfig,
    model: Model,
}

struct DayView {
    window: Vec<f64>,
    z: AnalyticSeries,
}

/// Trailing window of log closes ending at position `idx`, with its
/// embedding. `None` if the history is too short.
fn day_view(closes: &[f64], idx: usize, cfg: &BacktestConfig) -> Result<Option<DayView>> {
    if idx + 1 < cfg.embed_window {
        return Ok(None);
    }
    let window: Vec<f64> = closes[idx + 1 - cfg.embed_window..=idx]
        .iter()
        .map(|c| c.ln())
        .collect();
    let (z, emd) = ichain_of(&window, &cfg.sift)?;
    let detrended = window
        .iter()
        .zip(&emd.residual)
        .map(|(v, r)| v - r)
        .collect();
    Ok(Some(DayView {
        window: detrended,
        z,
    }))
}

fn features(
    strategy: &StrategySpec,
    closes: &[f64],
    idx: usize,
    view: Option<&DayView>,
) -> Result<Option<Vec<f64>>> {
    let m = strategy.feature_lags;
    match strategy.kind {
        StrategyKind::Svm => Ok(log_returns_ending(closes, idx, m)),
        StrategyKind::HtSvm => view
            .map(|v| plane_features(&v.z, v.z.len() - 1, m))
            .transpose(),
        StrategyKind::HtSsm => view
            .map(|v| spinor_features(&v.z, v.z.len() - 1, m).map(|f| f.vector))
            .transpose(),
        _ => Ok(None),
    }
}

/// Fits the strategy on the training range of `series`.
pub fn fit(
    strategy: StrategySpec,
    series: &PriceSeries,
    split: &SplitSpec,
    cfg: &BacktestConfig,
) -> Result<Trained> {
    strategy.validate()?;
    cfg.validate()?;
    crate::ingest::split(series, split)?;
    let model = match strategy.kind {
        StrategyKind::SsmAngle => Model::Angle(AngleClassifier::new(cfg.theta_star)?),
        StrategyKind::HhsaAm2 => Model::Holo,
        _ => {
            let closes = series.closes();
            let points = series.points();
            // positions whose next close is still inside the training range
            let usable: Vec<usize> = (0..points.len().saturating_sub(1))
                .filter(|&i| {
                    points[i].date_ordinal >= split.train.0
                        && points[i + 1].date_ordinal <= split.train.1
                })
                .collect();
            let mut x = Vec::new();
            let mut y = Vec::new();
            for &i in usable.iter().rev() {
                if x.len() == cfg.train_samples {
                    break;
                }
                let view = if strategy.kind.uses_embedding() {
                    match day_view(&closes, i, cfg)? {
                        Some(v) => Some(v),
                        None => continue,
                    }
                } else {
                    None
                };
                if let Some(f) = features(&strategy, &closes, i, view.as_ref())? {
                    x.push(f);
                    y.push(direction_label(closes[i], closes[i + 1]).0);
                }
            }
            if x.len() < 2 {
                return Err(Error::InsufficientData {
                    needed: 2,
                    got: x.len(),
                });
            }
            x.reverse();
            y.reverse();
            if y.iter().all(|&l| l == y[0]) {
                Model::Constant(y[0])
            } else {
                let scaler = Scaler::fit(&x);
                let x: Vec<Vec<f64>> = x.iter().map(|r| scaler.apply(r)).collect();
                Model::Svm(smo_train(&x, &y, strategy.kernel, &cfg.smo)?, scaler)
            }
        }
    };
    Ok(Trained {
        strategy,
        cfg: *cfg,
        model,
    })
}

impl Trained {
    /// Prediction emitted on `ordinal`, using closes up to and including it.
    /// Also returns the physiology state of the day when an embedding exists.
    pub fn predict(
        &self,
        series: &PriceSeries,
        ordinal: usize,
    ) -> Result<(Prediction, Option<PhysiologyState>)> {
        let idx = series
            .index_of(ordinal)
            .ok_or_else(|| Error::Bounds(format!("no close at ordinal {ordinal}")))?;
        let closes = &series.closes()[..=idx];
        let view = day_view(closes, idx, &self.cfg)?;
        if view.is_none() && self.strategy.kind.uses_embedding() {
            return Err(Error::InsufficientData {
                needed: self.cfg.embed_window,
                got: idx + 1,
            });
        }
        let state = view
            .as_ref()
            .map(|v| physiology_of(&v.z, v.z.len() - 1).map(|r| r.state))
            .transpose()?;
        let h = self.strategy.horizon;
        let pred = match &self.model {
            Model::Constant(d) => Prediction::new(ordinal, h, *d, true),
            Model::Svm(model, scaler) => {
                let f = features(&self.strategy, closes, idx, view.as_ref())?.ok_or(
                    Error::InsufficientData {
                        needed: self.strategy.feature_lags + 1,
                        got: idx + 1,
                    },
                )?;
                Prediction::new(ordinal, h, svm_predict(model, &scaler.apply(&f))?, true)
            }
            Model::Angle(clf) => {
                let v = view.as_ref().expect("checked above");
                let t = v.z.len() - 1;
                match ssm_angle_predict(clf, v.z.re[t], v.z.im[t]) {
                    Ok(d) => Prediction::new(ordinal, h, d, true),
                    // zero embedding, e.g. a flat window: no direction
                    Err(Error::Domain(_)) => Prediction::new(ordinal, h, 1, false),
                    Err(e) => return Err(e),
                }
            }
            Model::Holo => {
                let v = view.as_ref().expect("checked above");
                let t = v.window.len() - 1;
                match holo_decompose(&v.window, self.cfg.layers, &self.cfg.sift) {
                    Ok(stack) => {
                        let g = gate(&stack, t, self.cfg.gate_window, self.cfg.gate_tau)?;
                        if g.emit {
                            let slope = am2_signal(&stack, t)?;
                            Prediction::new(ordinal, h, if slope < 0.0 { -1 } else { 1 }, true)
                        } else {
                            Prediction::new(ordinal, h, 1, false)
                        }
                    }
                    Err(Error::NotSiftable) | Err(Error::NotDecomposable { .. }) => {
                        Prediction::new(ordinal, h, 1, false)
                    }
                    Err(e) => return Err(e),
                }
            }
        };
        Ok((pred, state))
    }
}

/// Trains on the training range, then predicts every test day whose target
/// close exists.
pub fn run(
    strategy: StrategySpec,
    series: &PriceSeries,
    split: &SplitSpec,
    cfg: &BacktestConfig,
) -> Result<BacktestReport> {
    let trained = fit(strategy, series, split, cfg)?;
    let mut preds = Vec::new();
    let mut states = Vec::new();
    for p in series.points() {
        let t = p.date_ordinal;
        if t < split.test.0 || t > split.test.1 {
            continue;
        }
        let target = t + strategy.horizon;
        if series.index_of(target).is_none() || series.index_of(target - 1).is_none() {
            continue;
        }
        let (pred, state) = trained.predict(series, t)?;
        preds.push(pred);
        states.push(state);
    }
    if preds.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    score(&series.symbol, strategy, series, &preds, &states)
}
