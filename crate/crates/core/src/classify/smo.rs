//! Soft-margin SVM trained by sequential minimal optimization.
//!
//! Each step picks the maximal violating pair: the index in the "can move up"
//! set with the largest `y - g` and the index in the "can move down" set with
//! the smallest, where `g_i = Σ_j α_j y_j K(x_j, x_i)`. The pair is updated
//! analytically inside the box `[0, C]`, keeping `Σ α_i y_i = 0`. Ties in the
//! selection are broken by a seeded permutation of the training indices, so
//! the result is a pure function of the inputs and the seed.
//!
//! A solve pass stops once the violation gap drops below `eps`.
//! The bias is then set from the free support vectors and every training
//! point is checked against the KKT conditions at `tol`; if one fails, the
//! threshold is divided by ten and solving resumes, up to `max_passes`
//! passes.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::kernel::KernelSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoParams {
    pub c: f64,
    /// KKT tolerance certified on return.
    pub tol: f64,
    /// Violation gap at which a solve pass stops; kept below `tol`.
    pub eps: f64,
    pub max_passes: usize,
    /// Cap on pair updates across all passes.
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SmoParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            tol: 1e-3,
            eps: 1e-5,
            max_passes: 10,
            max_iter: 200_000,
            seed: 0,
        }
    }
}

/// A trained kernel machine. `alphas` are signed (`α_i y_i`), one per
/// support vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub support_vectors: Vec<Vec<f64>>,
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub kernel: KernelSpec,
    pub c_param: f64,
}

impl SvmModel {
    pub fn dim(&self) -> usize {
        self.support_vectors.first().map_or(0, Vec::len)
    }

    /// `Σ alphas_i K(sv_i, x) + b`.
    pub fn decision_function(&self, x: &[f64]) -> Result<f64> {
        if !self.support_vectors.is_empty() && x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(self
            .support_vectors
            .iter()
            .zip(&self.alphas)
            .map(|(sv, a)| a * self.kernel.eval(sv, x))
            .sum::<f64>()
            + self.bias)
    }

    /// Dual objective `Σ α_i - ½ Σ_ij α_i α_j y_i y_j K_ij`.
    pub fn dual_objective(&self) -> f64 {
        let linear: f64 = self.alphas.iter().map(|a| a.abs()).sum();
        let mut quad = 0.0;
        for (i, si) in self.support_vectors.iter().enumerate() {
            for (j, sj) in self.support_vectors.iter().enumerate() {
                quad += self.alphas[i] * self.alphas[j] * self.kernel.eval(si, sj);
            }
        }
        linear - 0.5 * quad
    }
}

/// `+1` when the decision value is non-negative, `-1` otherwise.
pub fn svm_predict(model: &SvmModel, x: &[f64]) -> Result<i8> {
    Ok(if model.decision_function(x)? >= 0.0 {
        1
    } else {
        -1
    })
}

/// Full solver output, including the multiplier of every training point.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoSolution {
    pub model: SvmModel,
    /// Unsigned multipliers, one per training point.
    pub alphas: Vec<f64>,
    pub iterations: usize,
    /// Whether the final KKT check at `tol` succeeded.
    pub converged: bool,
}

pub fn smo_train(
    x: &[Vec<f64>],
    y: &[i8],
    kernel: KernelSpec,
    params: &SmoParams,
) -> Result<SvmModel> {
    smo_solve(x, y, kernel, params).map(|s| s.model)
}

fn validate(x: &[Vec<f64>], y: &[i8], params: &SmoParams) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: x.len(),
        });
    }
    let d = x[0].len();
    for row in x {
        if row.len() != d {
            return Err(Error::Dimension {
                expected: d,
                got: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite feature".into()));
        }
    }
    if y.iter().any(|&l| l != 1 && l != -1) {
        return Err(Error::Domain("labels must be +1 or -1".into()));
    }
    if !(y.contains(&1) && y.contains(&-1)) {
        return Err(Error::DegenerateTraining(
            "both classes must be present".into(),
        ));
    }
    if !(params.c.is_finite() && params.c > 0.0)
        || !(params.tol > 0.0)
        || !(params.eps > 0.0)
        || params.max_passes == 0
    {
        return Err(Error::Config(format!("invalid SMO parameters {params:?}")));
    }
    Ok(())
}

struct Solver<'a> {
    k: Vec<f64>,
    n: usize,
    y: Vec<f64>,
    c: f64,
    alpha: Vec<f64>,
    /// `g_i = Σ_j α_j y_j K_ij`
    g: Vec<f64>,
    order: &'a [usize],
}

impl Solver<'_> {
    fn kij(&self, i: usize, j: usize) -> f64 {
        self.k[i * self.n + j]
    }

    fn v(&self, i: usize) -> f64 {
        self.y[i] - self.g[i]
    }

    fn in_up(&self, i: usize) -> bool {
        (self.y[i] > 0.0 && self.alpha[i] < self.c) || (self.y[i] < 0.0 && self.alpha[i] > 0.0)
    }

    fn in_low(&self, i: usize) -> bool {
        (self.y[i] > 0.0 && self.alpha[i] > 0.0) || (self.y[i] < 0.0 && self.alpha[i] < self.c)
    }

    fn select(&self) -> Option<(usize, usize, f64)> {
        let mut best_up: Option<(usize, f64)> = None;
        let mut best_low: Option<(usize, f64)> = None;
        for &i in self.order {
            let v = self.v(i);
            if self.in_up(i) && best_up.is_none_or(|(_, b)| v > b) {
                best_up = Some((i, v));
            }
            if self.in_low(i) && best_low.is_none_or(|(_, b)| v < b) {
                best_low = Some((i, v));
            }
        }
        match (best_up, best_low) {
            (Some((i, vi)), Some((j, vj))) => Some((i, j, vi - vj)),
            _ => None,
        }
    }

    /// Analytic two-variable update. Returns false if the pair cannot move.
    fn step(&mut self, i: usize, j: usize) -> bool {
        if i == j {
            return false;
        }
        let (yi, yj) = (self.y[i], self.y[j]);
        let (ai, aj) = (self.alpha[i], self.alpha[j]);
        let (lo, hi) = if yi != yj {
            ((aj - ai).max(0.0), (self.c + aj - ai).min(self.c))
        } else {
            ((ai + aj - self.c).max(0.0), (ai + aj).min(self.c))
        };
        if hi - lo <= 0.0 {
            return false;
        }
        let eta = (self.kij(i, i) + self.kij(j, j) - 2.0 * self.kij(i, j)).max(1e-12);
        let mut aj_new = aj + yj * (self.v(j) - self.v(i)) / eta;
        aj_new = aj_new.clamp(lo, hi);
        let snap = 1e-12 * self.c;
        if aj_new < snap {
            aj_new = 0.0;
        } else if aj_new > self.c - snap {
            aj_new = self.c;
        }
        let mut ai_new = ai + yi * yj * (aj - aj_new);
        if ai_new < snap {
            ai_new = 0.0;
        } else if ai_new > self.c - snap {
            ai_new = self.c;
        }
        let (di, dj) = (ai_new - ai, aj_new - aj);
        if di == 0.0 && dj == 0.0 {
            return false;
        }
        self.alpha[i] = ai_new;
        self.alpha[j] = aj_new;
        for k in 0..self.n {
            self.g[k] += di * yi * self.kij(i, k) + dj * yj * self.kij(j, k);
        }
        true
    }

    fn bias(&self) -> f64 {
        let free: Vec<f64> = (0..self.n)
            .filter(|&i| self.alpha[i] > 0.0 && self.alpha[i] < self.c)
            .map(|i| self.v(i))
            .collect();
        if !free.is_empty() {
            return free.iter().sum::<f64>() / free.len() as f64;
        }
        // Any b between the largest lower bound and the smallest upper bound
        // satisfies KKT; take the midpoint.
        let lower = (0..self.n)
            .filter(|&i| self.in_up(i))
            .map(|i| self.v(i))
            .fold(f64::NEG_INFINITY, f64::max);
        let upper = (0..self.n)
            .filter(|&i| self.in_low(i))
            .map(|i| self.v(i))
            .fold(f64::INFINITY, f64::min);
        match (lower.is_finite(), upper.is_finite()) {
            (true, true) => 0.5 * (lower + upper),
            (true, false) => lower,
            (false, true) => upper,
            (false, false) => 0.0,
        }
    }

    fn kkt_holds(&self, b: f64, tol: f64) -> bool {
        (0..self.n).all(|i| {
            let m = self.y[i] * (self.g[i] + b);
            let a = self.alpha[i];
            if a <= 0.0 {
                m >= 1.0 - tol
            } else if a >= self.c {
                m <= 1.0 + tol
            } else {
                (m - 1.0).abs() <= tol
            }
        })
    }
}

pub fn smo_solve(
    x: &[Vec<f64>],
    y: &[i8],
    kernel: KernelSpec,
    params: &SmoParams,
) -> Result<SmoSolution> {
    validate(x, y, params)?;
    let n = x.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = kernel.eval(&x[i], &x[j]);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(params.seed));

    let mut s = Solver {
        k,
        n,
        y: y.iter().map(|&l| f64::from(l)).collect(),
        c: params.c,
        alpha: vec![0.0; n],
        g: vec![0.0; n],
        order: &order,
    };

    let mut threshold = params.eps.min(params.tol);
    let mut iterations = 0;
    let mut converged = false;
    let mut bias = 0.0;
    for _ in 0..params.max_passes {
        while iterations < params.max_iter {
            match s.select() {
                Some((i, j, gap)) if gap > threshold => {
                    iterations += 1;
                    if !s.step(i, j) {
                        break;
                    }
                }
                _ => break,
            }
        }
        bias = s.bias();
        if s.kkt_holds(bias, params.tol) {
            converged = true;
            break;
        }
        if iterations >= params.max_iter {
            break;
        }
        threshold /= 10.0;
    }

    let mut support_vectors = Vec::new();
    let mut alphas = Vec::new();
    for i in 0..n {
        if s.alpha[i] > 0.0 {
            support_vectors.push(x[i].clone());
            alphas.push(s.alpha[i] * s.y[i]);
        }
    }
    Ok(SmoSolution {
        model: SvmModel {
            support_vectors,
            alphas,
            bias,
            kernel,
            c_param: params.c,
        },
        alphas: s.alpha.clone(),
        iterations,
        converged,
    })
}
