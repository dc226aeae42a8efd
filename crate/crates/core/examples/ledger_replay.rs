//! Replays a published two-day-ahead signal ledger and recomputes its
//! profit and accuracy.
//!
//! cargo run --example ledger_replay

use ssm_core::backtest::{parse_signal_ledger, replay, StrategyKind, StrategySpec};
use ssm_core::classify::KernelSpec;

fn main() -> ssm_core::Result<()> {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/set_ledger.csv"))?;
    let (series, signals) = parse_signal_ledger("SET", &text)?;
    let spec = StrategySpec::new(StrategyKind::HhsaAm2, KernelSpec::Linear, 5);
    let report = replay(&series, spec, &signals)?;

    print!("{}", report.ledger_csv());
    // first block: signals emitted on 9529..=9547
    let block: Vec<_> = report
        .rows
        .iter()
        .filter(|r| r.prediction.signal_ordinal <= 9547 && r.prediction.emitted)
        .collect();
    let profit: f64 = block.iter().map(|r| r.profit).sum();
    let correct = block.iter().filter(|r| r.correct == Some(true)).count();
    println!(
        "first block: {correct}/{} correct, profit {profit:.2}",
        block.len()
    );
    println!("all rows: {}", report.summary_line());
    Ok(())
}
