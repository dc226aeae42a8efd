//! Trains kernel SVMs with SMO and round-trips a model through its text
//! format.
//!
//! cargo run --example svm_smo

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssm_core::classify::{read_model, smo_solve, svm_predict, write_model, KernelSpec, SmoParams};

fn main() -> ssm_core::Result<()> {
    let xor = vec![
        vec![0.0, 0.0],
        vec![1.0, 1.0],
        vec![0.0, 1.0],
        vec![1.0, 0.0],
    ];
    let labels = vec![-1, -1, 1, 1];
    let params = SmoParams {
        c: 10.0,
        ..SmoParams::default()
    };
    let sol = smo_solve(&xor, &labels, KernelSpec::rbs(1.0)?, &params)?;
    println!(
        "XOR: {} iterations, alphas {:?}, bias {:.4}",
        sol.iterations, sol.alphas, sol.model.bias
    );

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..80 {
        let label = if i % 2 == 0 { 1 } else { -1 };
        let c = f64::from(label);
        x.push(vec![
            c + rng.gen_range(-1.2..1.2),
            c + rng.gen_range(-1.2..1.2),
        ]);
        y.push(label);
    }
    for kernel in [KernelSpec::Linear, KernelSpec::rbs(0.5)?] {
        let sol = smo_solve(&x, &y, kernel, &SmoParams::default())?;
        let hits = x
            .iter()
            .zip(&y)
            .filter(|(xi, yi)| svm_predict(&sol.model, xi).ok() == Some(**yi))
            .count();
        println!(
            "blobs, {kernel}: {} support vectors, training accuracy {hits}/80, dual {:.4}",
            sol.model.support_vectors.len(),
            sol.model.dual_objective()
        );
        let text = write_model(&sol.model);
        assert_eq!(read_model(&text)?, sol.model);
    }
    println!("models survive a write/read round trip");
    Ok(())
}
