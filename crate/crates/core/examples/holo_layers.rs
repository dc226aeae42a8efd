//! Peels two nested amplitude modulations off a carrier, one layer at a time.
//!
//! cargo run --example holo_layers

use std::f64::consts::PI;

use ssm_core::emd::SiftConfig;
use ssm_core::hhsa::{am2_signal, holo_decompose};

fn main() -> ssm_core::Result<()> {
    let n = 4096;
    let slow = 2.0 * PI * 4.0 / n as f64;
    let mid = 2.0 * PI * 64.0 / n as f64;
    let x: Vec<f64> = (0..n)
        .map(|t| {
            let t = t as f64;
            (1.0 + 0.5 * (mid * t).cos()) * (1.0 + 0.3 * (slow * t).cos()) * (PI / 2.0 * t).cos()
        })
        .collect();

    let stack = holo_decompose(&x, 4, &SiftConfig::default())?;
    let bin = 2.0 * PI / n as f64;
    println!(
        "AM depth {}, FM depth {}",
        stack.am_depth(),
        stack.fm_depth()
    );
    for (layer, truth) in stack.am_layers.iter().zip([mid, slow]) {
        let f = layer.dominant_frequency();
        println!(
            "AM layer {}: {:.5} rad/sample, modulator {:.5}, off by {:.2} bins",
            layer.layer_index,
            f,
            truth,
            (f - truth).abs() / bin
        );
    }
    // peaks and troughs of the slow modulator
    for t in [256, 768, 1280, 1792] {
        let truth = -1.5 * 0.3 * slow * (slow * t as f64).sin();
        println!(
            "am2 slope at {t}: {:+.3e} (expected {truth:+.3e})",
            am2_signal(&stack, t)?
        );
    }
    Ok(())
}
