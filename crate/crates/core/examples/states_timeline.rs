//! Physiology states, hidden states and gate decisions over a price series.
//!
//! cargo run --example states_timeline

use std::collections::BTreeMap;

use ssm_core::ingest::parse_csv;
use ssm_core::states::{state_timeline, TimelineConfig};

fn main() -> ssm_core::Result<()> {
    let text =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/random_walk.csv"))?;
    let series = parse_csv(&text)?;

    for tau in [1.0, 0.05] {
        let cfg = TimelineConfig {
            gate_tau: tau,
            ..TimelineConfig::default()
        };
        let (_, rows) = state_timeline(&series.closes(), &cfg)?;
        let mut physiology = BTreeMap::new();
        let mut hidden = BTreeMap::new();
        for r in &rows {
            *physiology.entry(r.physiology.to_string()).or_insert(0) += 1;
            *hidden.entry(r.hidden.bits()).or_insert(0) += 1;
        }
        let emits = rows.iter().filter(|r| r.emit).count();
        println!("tau={tau}: gate open on {emits} of {} days", rows.len());
        println!("  physiology {physiology:?}");
        println!("  hidden     {hidden:?}");
    }
    Ok(())
}
