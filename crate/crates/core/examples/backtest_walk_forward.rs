//! Runs every strategy over the bundled random walk and compares the
//! spinor machine with a plain SVM.
//!
//! cargo run --example backtest_walk_forward

use ssm_core::backtest::{
    compare_to_csv, run, BacktestConfig, CompareRow, StrategyKind, StrategySpec,
};
use ssm_core::classify::KernelSpec;
use ssm_core::ingest::{parse_csv_named, SplitSpec};

fn main() -> ssm_core::Result<()> {
    let text =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/random_walk.csv"))?;
    let series = parse_csv_named("RW", &text)?;
    let split = SplitSpec::new((1, 400), (401, 600))?;
    let cfg = BacktestConfig {
        gate_tau: 0.01,
        ..BacktestConfig::default()
    };

    let mut reports = Vec::new();
    for kind in StrategyKind::ALL {
        let spec = StrategySpec::new(kind, KernelSpec::rbs(0.05)?, 5);
        let r = run(spec, &series, &split, &cfg)?;
        println!("{:<22} {}", r.label, r.summary_line());
        reports.push(r);
    }
    // a martingale has no edge, so expect accuracies near 50%
    let row = CompareRow::new(&reports[0], &reports[3]);
    print!("{}", compare_to_csv(&row));
    Ok(())
}
