//! CSV and JSON renderings of backtest reports.
//!
//! Numbers are written with Rust's shortest round-trip formatting so that a
//! rerun with identical inputs produces identical bytes.

use serde::Serialize;

use super::{improved_performance, BacktestReport, LedgerRow};

fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |p| p.to_string())
}

fn signal_text(row: &LedgerRow) -> String {
    let p = &row.prediction;
    if !p.emitted {
        return "no signal".into();
    }
    let word = if p.direction > 0 { "up" } else { "down" };
    format!("{word}(forecast {})", p.target_ordinal)
}

fn result_text(row: &LedgerRow) -> &'static str {
    match row.correct {
        Some(true) => "correct",
        Some(false) => "wrong",
        None => "",
    }
}

/// One summary row; `improved_pct` is only set by comparisons.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportSummary {
    pub symbol: String,
    pub kernel: String,
    pub days: usize,
    pub performance_pct: Option<f64>,
    pub profit: f64,
    pub improved_pct: Option<f64>,
}

#[derive(Serialize)]
struct JsonRow<'a> {
    date_number: usize,
    close: f64,
    signal: String,
    result: &'a str,
    profit: f64,
    state: Option<String>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    summary: ReportSummary,
    n_signals: usize,
    n_correct: usize,
    ledger: Vec<JsonRow<'a>>,
}

impl BacktestReport {
    pub fn summary(&self) -> ReportSummary {
        ReportSummary {
            symbol: self.symbol.clone(),
            kernel: self.label.clone(),
            days: self.days(),
            performance_pct: self.accuracy,
            profit: self.profit,
            improved_pct: None,
        }
    }

    /// `symbol,kernel,days,performance_pct,profit,improved_pct`
    pub fn summary_csv(&self) -> String {
        let s = self.summary();
        format!(
            "symbol,kernel,days,performance_pct,profit,improved_pct\n{},{},{},{},{},\n",
            s.symbol,
            s.kernel,
            s.days,
            pct(s.performance_pct),
            s.profit
        )
    }

    /// `date_number,close,signal,result,profit,state`, one row per day.
    pub fn ledger_csv(&self) -> String {
        let mut out = String::from("date_number,close,signal,result,profit,state\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.prediction.signal_ordinal,
                r.close,
                signal_text(r),
                result_text(r),
                r.profit,
                r.state.map_or(String::new(), |s| s.to_string())
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = JsonReport {
            summary: self.summary(),
            n_signals: self.n_signals,
            n_correct: self.n_correct,
            ledger: self
                .rows
                .iter()
                .map(|r| JsonRow {
                    date_number: r.prediction.signal_ordinal,
                    close: r.close,
                    signal: signal_text(r),
                    result: result_text(r),
                    profit: r.profit,
                    state: r.state.map(|s| s.to_string()),
                })
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
        text.push('\n');
        text
    }

    /// `accuracy=<pct> profit=<points> signals=<n>`
    pub fn summary_line(&self) -> String {
        let acc = self
            .accuracy
            .map_or_else(|| "undefined".to_string(), |a| format!("{a:.2}"));
        format!(
            "accuracy={acc} profit={:.2} signals={}",
            self.profit, self.n_signals
        )
    }
}

/// A base/new pair of reports on the same symbol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub base: ReportSummary,
    pub new: ReportSummary,
    /// `None` when the base accuracy is zero or undefined.
    pub improved_pct: Option<f64>,
}

impl CompareRow {
    pub fn new(base: &BacktestReport, new: &BacktestReport) -> Self {
        let improved_pct = match (base.accuracy, new.accuracy) {
            (Some(b), Some(n)) => improved_performance(b, n).ok(),
            _ => None,
        };
        Self {
            base: base.summary(),
            new: new.summary(),
            improved_pct,
        }
    }
}

/// Both strategies in the summary layout; the improvement sits on the new row.
pub fn compare_to_csv(row: &CompareRow) -> String {
    let mut out = String::from("symbol,kernel,days,performance_pct,profit,improved_pct\n");
    for (s, imp) in [
        (&row.base, String::new()),
        (&row.new, pct(row.improved_pct)),
    ] {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            s.symbol,
            s.kernel,
            s.days,
            pct(s.performance_pct),
            s.profit,
            imp
        ));
    }
    out
}
