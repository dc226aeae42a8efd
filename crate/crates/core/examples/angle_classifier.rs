//! The diameter rule at 45 degrees, spinor features and the hyperbolic
//! distance.
//!
//! cargo run --example angle_classifier

use ssm_core::classify::{
    hyperbolic_distance, spinor_features, ssm_angle_predict, AngleClassifier,
};
use ssm_core::spectral::AnalyticSeries;

fn main() -> ssm_core::Result<()> {
    let clf = AngleClassifier::default();
    for deg in (0..360).step_by(30) {
        let phi = (deg as f64 + 0.5).to_radians();
        let d = ssm_angle_predict(&clf, phi.cos(), phi.sin())?;
        println!(
            "{:5.1} deg -> {}",
            deg as f64 + 0.5,
            if d > 0 { "up" } else { "down" }
        );
    }
    println!("origin -> {:?}", ssm_angle_predict(&clf, 0.0, 0.0).err());

    let w = 0.3f64;
    let z = AnalyticSeries {
        re: (0..10).map(|t| 4.0 * (w * t as f64).cos()).collect(),
        im: (0..10).map(|t| 4.0 * (w * t as f64).sin()).collect(),
    };
    let f = spinor_features(&z, 9, 3)?;
    println!("spinor lags ending at t=9: {:.3?}", f.vector);

    let c = 2f64.cosh();
    println!(
        "hyperbolic distance {:.3}",
        hyperbolic_distance(&[c, 0.0], &[-1.0, 0.0])?
    );
    Ok(())
}
