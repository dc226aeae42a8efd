//! Instantaneous frequency of a chirp, then the complex-plane embedding of
//! a price series.
//!
//! cargo run --example hilbert_analytic

use ssm_core::emd::SiftConfig;
use ssm_core::ingest::parse_csv;
use ssm_core::spectral::{hilbert_analytic, ichain_embed, inst_attributes};

fn main() -> ssm_core::Result<()> {
    let n = 2048;
    let alpha = 0.5 / n as f64;
    let x: Vec<f64> = (0..n)
        .map(|t| {
            let t = t as f64;
            (0.2 * t + 0.5 * alpha * t * t).cos()
        })
        .collect();
    let attrs = inst_attributes(&hilbert_analytic(&x)?);
    for t in [n / 4, n / 2, 3 * n / 4] {
        println!(
            "t={t:4}  frequency {:.4} rad/sample (true {:.4})",
            attrs.frequency[t],
            0.2 + alpha * t as f64
        );
    }

    let text =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/random_walk.csv"))?;
    let series = parse_csv(&text)?;
    let z = ichain_embed(&series, &SiftConfig::default())?;
    let last = z.len() - 1;
    println!(
        "embedding of {} closes ends at ({:.2}, {:.2}), angle {:.1} deg",
        series.len(),
        z.re[last],
        z.im[last],
        z.im[last].atan2(z.re[last]).to_degrees()
    );
    Ok(())
}
