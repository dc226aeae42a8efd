//! Splits two tones riding on a trend into IMFs and checks the sum.
//!
//! cargo run --example emd_decompose

use std::f64::consts::PI;

use ssm_core::emd::{decompose, local_extrema, zero_crossings, SiftConfig};

fn main() -> ssm_core::Result<()> {
    let n = 1024;
    let x: Vec<f64> = (0..n)
        .map(|t| {
            let t = t as f64;
            (2.0 * PI * t / 16.0).sin() + 0.6 * (2.0 * PI * t / 128.0).sin() + 0.002 * t
        })
        .collect();

    let r = decompose(&x, &SiftConfig::default())?;
    for (k, imf) in r.imfs.iter().enumerate() {
        let (max, min) = local_extrema(&imf.samples)?;
        println!(
            "imf{}: {} sifts, {} extrema, {} zero crossings",
            k + 1,
            imf.sift_iterations,
            max.len() + min.len(),
            zero_crossings(&imf.samples)
        );
    }
    let err = r
        .reconstruct()
        .iter()
        .zip(&x)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    println!(
        "residual runs {:.3} -> {:.3}",
        r.residual[0],
        r.residual[n - 1]
    );
    println!("max reconstruction error {err:.2e}");
    Ok(())
}
