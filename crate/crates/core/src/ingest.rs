//! Close-price series: CSV loading, direction labels, train/test splits and
//! lagged log-return features.
//!
//! Ordinals are assigned by row position (1-based), so a series parsed from a
//! CSV always has `date_ordinal == row index`. Series built programmatically
//! may carry gaps in their ordinals as long as they stay strictly increasing.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One trading day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PricePoint {
    /// ISO date as it appeared in the input.
    pub date: String,
    /// 1-based trading-day index.
    pub date_ordinal: usize,
    /// Close in index points.
    pub close: f64,
}

/// An ordered close-price series for one symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    pub symbol: String,
    points: Vec<PricePoint>,
}

impl PriceSeries {
    /// Builds a series, checking that closes are positive and finite and that
    /// ordinals strictly increase.
    pub fn new(symbol: impl Into<String>, points: Vec<PricePoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        for (i, p) in points.iter().enumerate() {
            if !(p.close.is_finite() && p.close > 0.0) {
                return Err(Error::Validation {
                    line: i + 2,
                    msg: format!("close must be positive, got {}", p.close),
                });
            }
            if i > 0 && p.date_ordinal <= points[i - 1].date_ordinal {
                return Err(Error::Validation {
                    line: i + 2,
                    msg: format!("ordinal {} does not increase", p.date_ordinal),
                });
            }
        }
        Ok(Self {
            symbol: symbol.into(),
            points,
        })
    }

    /// Series with contiguous ordinals `1..=N` and synthetic dates, handy for
    /// generated data.
    pub fn from_closes(symbol: impl Into<String>, closes: &[f64]) -> Result<Self> {
        Self::from_closes_at(symbol, 1, closes)
    }

    /// Like [`from_closes`](Self::from_closes) but starting at `first_ordinal`.
    pub fn from_closes_at(
        symbol: impl Into<String>,
        first_ordinal: usize,
        closes: &[f64],
    ) -> Result<Self> {
        let base = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date");
        let points = closes
            .iter()
            .enumerate()
            .map(|(i, &close)| PricePoint {
                date: (base + chrono::Duration::days(i as i64))
                    .format("%Y-%m-%d")
                    .to_string(),
                date_ordinal: first_ordinal + i,
                close,
            })
            .collect();
        Self::new(symbol, points)
    }

    pub fn points(&self) -> &[PricePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn closes(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.close).collect()
    }

    pub fn first_ordinal(&self) -> usize {
        self.points[0].date_ordinal
    }

    pub fn last_ordinal(&self) -> usize {
        self.points[self.points.len() - 1].date_ordinal
    }

    /// Position of `ordinal` within the series.
    pub fn index_of(&self, ordinal: usize) -> Option<usize> {
        self.points
            .binary_search_by_key(&ordinal, |p| p.date_ordinal)
            .ok()
    }

    pub fn close_at(&self, ordinal: usize) -> Result<f64> {
        self.index_of(ordinal)
            .map(|i| self.points[i].close)
            .ok_or_else(|| Error::Bounds(format!("no close at ordinal {ordinal}")))
    }

    /// Writes the series back as `date,close` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,close\n");
        for p in &self.points {
            out.push_str(&format!("{},{}\n", p.date, p.close));
        }
        out
    }
}

/// Parses `date,close` CSV text. Lines are reported 1-based, header included.
pub fn parse_csv(text: &str) -> Result<PriceSeries> {
    parse_csv_named("series", text)
}

pub fn parse_csv_named(symbol: &str, text: &str) -> Result<PriceSeries> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "date,close" => {}
        Some((_, header)) => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header `date,close`, got `{header}`"),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                msg: "empty input".into(),
            })
        }
    }

    let mut points: Vec<PricePoint> = Vec::new();
    let mut last_date: Option<NaiveDate> = None;
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let (date, close) = raw.split_once(',').ok_or_else(|| Error::Parse {
            line,
            msg: "expected two comma-separated fields".into(),
        })?;
        let parsed_date =
            NaiveDate::parse_from_str(date.trim(), "%Y-%m-%d").map_err(|e| Error::Parse {
                line,
                msg: format!("bad date `{date}`: {e}"),
            })?;
        let close: f64 = close.trim().parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad close `{close}`"),
        })?;
        if !(close.is_finite() && close > 0.0) {
            return Err(Error::Validation {
                line,
                msg: format!("close must be positive, got {close}"),
            });
        }
        if let Some(prev) = last_date {
            if parsed_date <= prev {
                return Err(Error::Validation {
                    line,
                    msg: format!("date {parsed_date} is not after {prev}"),
                });
            }
        }
        last_date = Some(parsed_date);
        points.push(PricePoint {
            date: date.trim().to_string(),
            date_ordinal: points.len() + 1,
            close,
        });
    }
    if points.is_empty() {
        return Err(Error::Parse {
            line: 2,
            msg: "no data rows".into(),
        });
    }
    PriceSeries::new(symbol, points)
}

/// Next-day direction labels; `labels[i]` belongs to the i-th point and is
/// defined for every point except the last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelSeries {
    pub first_ordinal: usize,
    pub labels: Vec<i8>,
    /// Days with an unchanged next close; labeled +1.
    pub flat: Vec<bool>,
}

impl LabelSeries {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

pub fn direction_label(from: f64, to: f64) -> (i8, bool) {
    if to > from {
        (1, false)
    } else if to < from {
        (-1, false)
    } else {
        (1, true)
    }
}

pub fn make_labels(series: &PriceSeries) -> Result<LabelSeries> {
    if series.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: series.len(),
        });
    }
    let (labels, flat) = series
        .points()
        .windows(2)
        .map(|w| direction_label(w[0].close, w[1].close))
        .unzip();
    Ok(LabelSeries {
        first_ordinal: series.first_ordinal(),
        labels,
        flat,
    })
}

/// Inclusive ordinal ranges for training and out-of-sample testing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: (usize, usize),
    pub test: (usize, usize),
}

impl SplitSpec {
    pub fn new(train: (usize, usize), test: (usize, usize)) -> Result<Self> {
        let spec = Self { train, test };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.train.0 > self.train.1 || self.test.0 > self.test.1 {
            return Err(Error::Bounds("empty range".into()));
        }
        if self.test.0 <= self.train.1 {
            return Err(Error::Bounds(format!(
                "test range {:?} overlaps or precedes train range {:?}",
                self.test, self.train
            )));
        }
        Ok(())
    }
}

fn sub_series(series: &PriceSeries, lo: usize, hi: usize) -> PriceSeries {
    let points = series
        .points()
        .iter()
        .filter(|p| p.date_ordinal >= lo && p.date_ordinal <= hi)
        .cloned()
        .collect();
    PriceSeries {
        symbol: series.symbol.clone(),
        points,
    }
}

/// Splits into (train, test), keeping original ordinals.
pub fn split(series: &PriceSeries, spec: &SplitSpec) -> Result<(PriceSeries, PriceSeries)> {
    spec.validate()?;
    let (first, last) = (series.first_ordinal(), series.last_ordinal());
    for &(lo, hi) in &[spec.train, spec.test] {
        if lo < first || hi > last {
            return Err(Error::Bounds(format!(
                "range {lo}..={hi} outside series ordinals {first}..={last}"
            )));
        }
    }
    let train = sub_series(series, spec.train.0, spec.train.1);
    let test = sub_series(series, spec.test.0, spec.test.1);
    if train.is_empty() || test.is_empty() {
        return Err(Error::Bounds("split produced an empty side".into()));
    }
    Ok((train, test))
}

/// Log-returns of the `m` days ending at ordinal `t`, oldest first.
pub fn log_return_window(series: &PriceSeries, t: usize, m: usize) -> Result<Vec<f64>> {
    if m == 0 || t < m + 1 {
        return Err(Error::Bounds(format!(
            "window of {m} returns needs t - m >= 1, got t = {t}"
        )));
    }
    (0..m)
        .map(|k| {
            let a = series.close_at(t - m + k)?;
            let b = series.close_at(t - m + k + 1)?;
            Ok((b / a).ln())
        })
        .collect()
}

/// Log-returns of the `m` steps ending at position `idx` of a close slice.
pub(crate) fn log_returns_ending(closes: &[f64], idx: usize, m: usize) -> Option<Vec<f64>> {
    if idx < m || idx >= closes.len() {
        return None;
    }
    Some(
        (idx - m..idx)
            .map(|k| (closes[k + 1] / closes[k]).ln())
            .collect(),
    )
}
