//! Independent oracles shared by the integration tests. None of these call
//! into the code paths they are used to check.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use ssm_core::classify::{kernel_eval, KernelSpec};

/// Optimal soft-margin dual objective by enumerating every assignment of
/// each multiplier to {0, C, free} and solving the KKT system of the free
/// ones. Only practical for a handful of points.
pub fn brute_force_dual(x: &[Vec<f64>], y: &[i8], kernel: KernelSpec, c: f64) -> f64 {
    let n = x.len();
    assert!(n <= 10);
    let yf: Vec<f64> = y.iter().map(|&l| f64::from(l)).collect();
    let q = DMatrix::from_fn(n, n, |i, j| {
        yf[i] * yf[j] * kernel_eval(&kernel, &x[i], &x[j]).unwrap()
    });
    let objective = |a: &[f64]| {
        let av = DVector::from_column_slice(a);
        av.sum() - 0.5 * (av.transpose() * &q * &av)[(0, 0)]
    };

    let mut best = f64::NEG_INFINITY;
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        // 0 -> alpha = 0, 1 -> alpha = C, 2 -> free
        let mut digits = vec![0u8; n];
        let mut rest = code;
        for d in digits.iter_mut() {
            *d = (rest % 3) as u8;
            rest /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&i| digits[i] == 2).collect();
        let mut alpha: Vec<f64> = digits
            .iter()
            .map(|&d| if d == 1 { c } else { 0.0 })
            .collect();

        if free.is_empty() {
            let balance: f64 = alpha.iter().zip(&yf).map(|(a, y)| a * y).sum();
            if balance.abs() < 1e-12 {
                best = best.max(objective(&alpha));
            }
            continue;
        }
        let k = free.len();
        let mut m = DMatrix::zeros(k + 1, k + 1);
        let mut rhs = DVector::zeros(k + 1);
        for (r, &i) in free.iter().enumerate() {
            for (s, &j) in free.iter().enumerate() {
                m[(r, s)] = q[(i, j)];
            }
            m[(r, k)] = yf[i];
            m[(k, r)] = yf[i];
            let bound: f64 = (0..n)
                .filter(|&j| digits[j] == 1)
                .map(|j| q[(i, j)] * c)
                .sum();
            rhs[r] = 1.0 - bound;
        }
        rhs[k] = -(0..n)
            .filter(|&j| digits[j] == 1)
            .map(|j| yf[j] * c)
            .sum::<f64>();
        let Some(sol) = m.clone().lu().solve(&rhs) else {
            continue;
        };
        if (&m * &sol - &rhs).amax() > 1e-9 {
            continue;
        }
        let mut feasible = true;
        for (r, &i) in free.iter().enumerate() {
            let a = sol[r];
            if a < -1e-12 || a > c + 1e-12 {
                feasible = false;
                break;
            }
            alpha[i] = a.clamp(0.0, c);
        }
        if feasible {
            best = best.max(objective(&alpha));
        }
    }
    best
}

/// Periodic discrete Hilbert transform by direct O(N²) convolution with the
/// kernel `h[n] = (2/N) Σ_{k=1}^{⌈N/2⌉-1} sin(2πkn/N)`, which is the
/// impulse response of the "-i sgn(k)" multiplier with DC and Nyquist
/// removed.
pub fn hilbert_by_convolution(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let kmax = n.div_ceil(2) - 1;
    let h: Vec<f64> = (0..n)
        .map(|m| {
            (1..=kmax)
                .map(|k| (2.0 * std::f64::consts::PI * (k * m) as f64 / n as f64).sin())
                .sum::<f64>()
                * 2.0
                / n as f64
        })
        .collect();
    (0..n)
        .map(|t| (0..n).map(|s| x[s] * h[(t + n - s) % n]).sum())
        .collect()
}

/// Normal-approximation 95% interval for the success percentage of `n`
/// fair coin flips.
pub fn binomial_interval_pct(n: usize) -> (f64, f64) {
    let half = 1.96 * (0.25 / n as f64).sqrt() * 100.0;
    (50.0 - half, 50.0 + half)
}

/// Geometric random walk with ±1% daily log steps, ordinals `1..=n`.
pub fn random_walk(seed: u64, n: usize) -> ssm_core::ingest::PriceSeries {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut log_p = 1000f64.ln();
    let closes: Vec<f64> = (0..n)
        .map(|_| {
            let c = log_p.exp();
            log_p += if rng.gen::<bool>() { 0.01 } else { -0.01 };
            c
        })
        .collect();
    ssm_core::ingest::PriceSeries::from_closes("RW", &closes).unwrap()
}

/// Seeded SMO instance `inst`: 3..=8 points in the plane with both labels,
/// plus the kernel and C it is solved with.
pub fn smo_instance(inst: u64) -> (Vec<Vec<f64>>, Vec<i8>, KernelSpec, f64) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1000 + inst);
    let n = rng.gen_range(3..=8);
    let (x, y) = loop {
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)])
            .collect();
        let y: Vec<i8> = (0..n)
            .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
            .collect();
        if y.contains(&1) && y.contains(&-1) {
            break (x, y);
        }
    };
    let c = [0.5, 1.0, 5.0, 20.0][inst as usize % 4];
    let gamma = [0.05, 0.5, 1.0, 3.0][(inst as usize / 4) % 4];
    (x, y, KernelSpec::rbs(gamma).unwrap(), c)
}

/// Largest KKT violation of unsigned multipliers `alpha` with bias `b`,
/// recomputing the decision values from scratch.
pub fn kkt_violation(
    x: &[Vec<f64>],
    y: &[i8],
    kernel: KernelSpec,
    c: f64,
    alpha: &[f64],
    b: f64,
) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..x.len() {
        let f: f64 = (0..x.len())
            .map(|j| alpha[j] * f64::from(y[j]) * kernel_eval(&kernel, &x[j], &x[i]).unwrap())
            .sum::<f64>()
            + b;
        let margin = f64::from(y[i]) * f;
        let v = if alpha[i] <= 0.0 {
            (1.0 - margin).max(0.0)
        } else if alpha[i] >= c {
            (margin - 1.0).max(0.0)
        } else {
            (margin - 1.0).abs()
        };
        worst = worst.max(v);
    }
    worst
}

/// Strategy with the kernels used throughout the backtest tests.
pub fn strategy(kind: ssm_core::backtest::StrategyKind) -> ssm_core::backtest::StrategySpec {
    use ssm_core::backtest::{StrategyKind, StrategySpec};
    let kernel = match kind {
        StrategyKind::Svm => KernelSpec::Linear,
        _ => KernelSpec::rbs(0.05).unwrap(),
    };
    StrategySpec::new(kind, kernel, 5)
}

/// Copy of `series` with the close at `ordinal` multiplied by `factor`.
pub fn mutate(
    series: &ssm_core::ingest::PriceSeries,
    ordinal: usize,
    factor: f64,
) -> ssm_core::ingest::PriceSeries {
    let points = series
        .points()
        .iter()
        .map(|p| {
            let mut p = p.clone();
            if p.date_ordinal == ordinal {
                p.close *= factor;
            }
            p
        })
        .collect();
    ssm_core::ingest::PriceSeries::new(series.symbol.clone(), points).unwrap()
}
