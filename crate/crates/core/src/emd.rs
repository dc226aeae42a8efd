//! Empirical mode decomposition.
//!
//! A signal is split into intrinsic mode functions (IMFs, fastest first) plus
//! a residual by repeated sifting: subtract the mean of the upper and lower
//! natural-spline envelopes until the candidate behaves like an IMF. The
//! residual is always obtained by subtraction, so `Σ imfs + residual`
//! reproduces the input up to rounding.
//!
//! Envelope ends are handled by mirroring the two extrema nearest to each
//! boundary across it before fitting the spline.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spline::NaturalSpline;

/// Sifting stop rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiftConfig {
    /// Cauchy-type stop: `Σ(h_{k-1} - h_k)² / Σ h_{k-1}²` must drop below this.
    pub sd_threshold: f64,
    pub max_sift_iters: usize,
    pub max_imfs: usize,
}

impl Default for SiftConfig {
    fn default() -> Self {
        Self {
            sd_threshold: 0.2,
            max_sift_iters: 50,
            max_imfs: 12,
        }
    }
}

impl SiftConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sd_threshold > 0.0 && self.sd_threshold < 1.0) {
            return Err(Error::Config(format!(
                "sd_threshold must lie in (0, 1), got {}",
                self.sd_threshold
            )));
        }
        if self.max_sift_iters == 0 || self.max_imfs == 0 {
            return Err(Error::Config("sifting caps must be positive".into()));
        }
        Ok(())
    }
}

/// One intrinsic mode function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Imf {
    pub samples: Vec<f64>,
    /// Number of sifting passes that produced it.
    pub sift_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmdResult {
    pub imfs: Vec<Imf>,
    pub residual: Vec<f64>,
}

impl EmdResult {
    /// `Σ imfs + residual`, sample by sample.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = self.residual.clone();
        for imf in &self.imfs {
            for (o, v) in out.iter_mut().zip(&imf.samples) {
                *o += v;
            }
        }
        out
    }

    /// Sum of the IMFs alone, i.e. the input with its trend removed.
    pub fn oscillatory_part(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.residual.len()];
        for imf in &self.imfs {
            for (o, v) in out.iter_mut().zip(&imf.samples) {
                *o += v;
            }
        }
        out
    }

    /// CSV with one column per IMF and a trailing residual column.
    pub fn to_csv(&self) -> String {
        let mut header: Vec<String> = (1..=self.imfs.len()).map(|k| format!("imf{k}")).collect();
        header.push("residual".into());
        let mut out = header.join(",");
        out.push('\n');
        for t in 0..self.residual.len() {
            for imf in &self.imfs {
                out.push_str(&format!("{},", imf.samples[t]));
            }
            out.push_str(&format!("{}\n", self.residual[t]));
        }
        out
    }
}

/// Strict interior maxima and minima (0-based). A flat run counts once, at
/// its center index; runs touching either end are ignored.
pub fn local_extrema(x: &[f64]) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = x.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    let mut i = 1;
    while i < n - 1 {
        let mut j = i;
        while j + 1 < n && x[j + 1] == x[i] {
            j += 1;
        }
        if j < n - 1 {
            let (before, after) = (x[i - 1], x[j + 1]);
            let mid = (i + j) / 2;
            if x[i] > before && x[i] > after {
                maxima.push(mid);
            } else if x[i] < before && x[i] < after {
                minima.push(mid);
            }
        }
        i = j + 1;
    }
    Ok((maxima, minima))
}

/// Number of sign changes, skipping exact zeros.
pub fn zero_crossings(x: &[f64]) -> usize {
    let mut count = 0;
    let mut prev = 0.0f64;
    for &v in x {
        if v == 0.0 {
            continue;
        }
        if prev != 0.0 && (v > 0.0) != (prev > 0.0) {
            count += 1;
        }
        prev = v;
    }
    count
}

/// `|#extrema - #zero crossings| <= 1`.
pub fn satisfies_imf_count(x: &[f64]) -> bool {
    match local_extrema(x) {
        Ok((mx, mn)) => (mx.len() + mn.len()).abs_diff(zero_crossings(x)) <= 1,
        Err(_) => true,
    }
}

/// Natural cubic spline through `(i, x[i])` for each anchor index, evaluated
/// at every sample. Boundaries not already anchored get the two nearest
/// anchors mirrored across them. A single anchor yields a constant.
pub fn spline_envelope(anchors: &[usize], x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if anchors.is_empty() {
        return Err(Error::Degenerate(
            "envelope needs at least one anchor".into(),
        ));
    }
    if let Some(&bad) = anchors.iter().find(|&&a| a >= n) {
        return Err(Error::Bounds(format!(
            "anchor {bad} outside signal of length {n}"
        )));
    }
    if anchors.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Degenerate("anchors must strictly increase".into()));
    }
    if anchors.len() == 1 {
        return Ok(vec![x[anchors[0]]; n]);
    }

    let last = (n - 1) as f64;
    let mut xs = Vec::with_capacity(anchors.len() + 4);
    let mut ys = Vec::with_capacity(anchors.len() + 4);
    if anchors[0] != 0 {
        for &a in anchors[..2].iter().rev() {
            xs.push(-(a as f64));
            ys.push(x[a]);
        }
    }
    for &a in anchors {
        xs.push(a as f64);
        ys.push(x[a]);
    }
    let k = anchors.len();
    if anchors[k - 1] != n - 1 {
        for &a in anchors[k - 2..].iter().rev() {
            xs.push(2.0 * last - a as f64);
            ys.push(x[a]);
        }
    }
    let spline = NaturalSpline::new(xs, ys)?;
    Ok((0..n).map(|i| spline.eval(i as f64)).collect())
}

fn is_siftable(h: &[f64]) -> bool {
    matches!(local_extrema(h), Ok((mx, mn)) if mx.len() >= 2 && mn.len() >= 2)
}

/// One sifting step: `h - (upper + lower) / 2`.
pub fn sift_once(h: &[f64]) -> Result<Vec<f64>> {
    let (maxima, minima) = local_extrema(h)?;
    if maxima.len() < 2 || minima.len() < 2 {
        return Err(Error::NotSiftable);
    }
    let upper = spline_envelope(&maxima, h)?;
    let lower = spline_envelope(&minima, h)?;
    Ok(h.iter()
        .zip(upper.iter().zip(&lower))
        .map(|(v, (u, l))| v - 0.5 * (u + l))
        .collect())
}

/// Sifts until the SD criterion is met and the extrema/zero-crossing counts
/// agree. If the iteration cap is hit before the counts agree, sifting
/// continues for up to three more caps' worth of passes.
pub fn extract_imf(x: &[f64], cfg: &SiftConfig) -> Result<Imf> {
    cfg.validate()?;
    let hard_cap = cfg.max_sift_iters * 4;
    let mut h = x.to_vec();
    let mut iters = 0;
    loop {
        let next = match sift_once(&h) {
            Ok(next) => next,
            Err(Error::NotSiftable) if iters > 0 => break,
            Err(e) => return Err(e),
        };
        let num: f64 = h.iter().zip(&next).map(|(a, b)| (a - b) * (a - b)).sum();
        let den: f64 = h.iter().map(|a| a * a).sum();
        let sd = if den > 0.0 { num / den } else { 0.0 };
        h = next;
        iters += 1;

        let counts_ok = satisfies_imf_count(&h);
        if (sd < cfg.sd_threshold && counts_ok)
            || (iters >= cfg.max_sift_iters && counts_ok)
            || iters >= hard_cap
        {
            break;
        }
    }
    Ok(Imf {
        samples: h,
        sift_iterations: iters,
    })
}

/// Full decomposition into IMFs and a residual.
pub fn decompose(x: &[f64], cfg: &SiftConfig) -> Result<EmdResult> {
    cfg.validate()?;
    if x.len() < 8 {
        return Err(Error::InsufficientData {
            needed: 8,
            got: x.len(),
        });
    }
    let mut remainder = x.to_vec();
    let mut imfs = Vec::new();
    while imfs.len() < cfg.max_imfs && is_siftable(&remainder) {
        let imf = extract_imf(&remainder, cfg)?;
        for (r, c) in remainder.iter_mut().zip(&imf.samples) {
            *r -= c;
        }
        imfs.push(imf);
    }
    Ok(EmdResult {
        imfs,
        residual: remainder,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn max_abs(v: &[f64]) -> f64 {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Extremum count of a smooth function, from sign changes of its
    /// finite-difference slope on a grid `refine` times denser than the
    /// samples.
    fn dense_extrema(f: impl Fn(f64) -> f64, n: usize, refine: usize) -> (usize, usize) {
        let pts: Vec<f64> = (0..=(n - 1) * refine)
            .map(|k| f(k as f64 / refine as f64))
            .collect();
        let (mut mx, mut mn) = (0, 0);
        for w in pts.windows(3) {
            if w[1] > w[0] && w[1] > w[2] {
                mx += 1;
            }
            if w[1] < w[0] && w[1] < w[2] {
                mn += 1;
            }
        }
        (mx, mn)
    }

    #[test]
    fn extrema_basic() {
        assert_eq!(local_extrema(&[0.0, 1.0, 0.0]).unwrap(), (vec![1], vec![]));
        let ramp: Vec<f64> = (0..20).map(|i| i as f64).collect();
        assert_eq!(local_extrema(&ramp).unwrap(), (vec![], vec![]));
        assert!(local_extrema(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn extrema_plateau_center() {
        let x = [0.0, 2.0, 2.0, 2.0, 0.0, -1.0, -1.0, 0.0];
        assert_eq!(local_extrema(&x).unwrap(), (vec![2], vec![5]));
        // plateau running into the boundary is not an extremum
        assert_eq!(local_extrema(&[0.0, 1.0, 1.0]).unwrap(), (vec![], vec![]));
    }

    #[test]
    fn extrema_of_two_sine_periods() {
        let f = |t: f64| (2.0 * PI * 2.0 * t / 64.0).sin();
        let x: Vec<f64> = (0..64).map(|t| f(t as f64)).collect();
        let (mx, mn) = local_extrema(&x).unwrap();
        let oracle = dense_extrema(f, 64, 100);
        assert_eq!(oracle, (2, 2));
        assert_eq!((mx.len(), mn.len()), oracle);
    }

    #[test]
    fn envelope_linear_between_endpoint_anchors() {
        let x: Vec<f64> = (0..11).map(|i| 3.0 - 0.5 * i as f64).collect();
        let env = spline_envelope(&[0, 10], &x).unwrap();
        for (e, v) in env.iter().zip(&x) {
            assert!((e - v).abs() < 1e-12);
        }
    }

    #[test]
    fn envelope_interpolates_anchor() {
        let mut x = vec![0.0; 11];
        x[5] = 1.0;
        let env = spline_envelope(&[0, 5, 10], &x).unwrap();
        assert!((env[5] - 1.0).abs() < 1e-12);
        assert!((env[0]).abs() < 1e-12 && env[10].abs() < 1e-12);
    }

    #[test]
    fn envelope_single_and_empty() {
        let x = [1.0, 4.0, 2.0, 3.0];
        assert_eq!(spline_envelope(&[1], &x).unwrap(), vec![4.0; 4]);
        assert!(matches!(
            spline_envelope(&[], &x),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn envelope_of_cosine_maxima() {
        // 4 periods over 200 samples; sampled peaks sit slightly below 1
        let n = 200;
        let dt = 8.0 * PI / (n - 1) as f64;
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * dt).cos()).collect();
        let (mx, _) = local_extrema(&x).unwrap();
        let env = spline_envelope(&mx, &x).unwrap();
        let err = env[10..n - 10]
            .iter()
            .map(|e| (e - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(err < 0.02, "max envelope error {err}");
    }

    fn tone(n: usize, period: f64) -> Vec<f64> {
        (0..n)
            .map(|i| (2.0 * PI * i as f64 / period).cos())
            .collect()
    }

    #[test]
    fn sift_leaves_tone_alone() {
        let x = tone(512, 25.3);
        let h = sift_once(&x).unwrap();
        let d = x[30..482]
            .iter()
            .zip(&h[30..482])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(d < 0.05, "{d}");
    }

    #[test]
    fn sift_removes_offset() {
        let c = 3.7;
        let x: Vec<f64> = tone(512, 25.3).iter().map(|v| v + c).collect();
        let h = sift_once(&x).unwrap();
        let mean_env = x[30..482]
            .iter()
            .zip(&h[30..482])
            .map(|(a, b)| (a - b - c).abs())
            .fold(0.0, f64::max);
        assert!(mean_env < 0.05, "{mean_env}");
    }

    #[test]
    fn ramp_is_not_siftable() {
        let ramp: Vec<f64> = (0..50).map(|i| i as f64 * 0.3).collect();
        assert_eq!(sift_once(&ramp), Err(Error::NotSiftable));
        assert_eq!(
            extract_imf(&ramp, &SiftConfig::default()),
            Err(Error::NotSiftable)
        );
    }

    #[test]
    fn imf_of_tone_is_tone() {
        let x = tone(512, 25.3);
        let imf = extract_imf(&x, &SiftConfig::default()).unwrap();
        let d = x[30..482]
            .iter()
            .zip(&imf.samples[30..482])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(d < 0.05, "{d}");
        assert!(imf.sift_iterations < SiftConfig::default().max_sift_iters);
    }

    fn correlation(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        cov / (va * vb).sqrt()
    }

    #[test]
    fn first_imf_tracks_fast_tone() {
        let n = 1024;
        let ts: Vec<f64> = (0..n).map(|i| i as f64 * 8.0 * PI / n as f64).collect();
        let fast: Vec<f64> = ts.iter().map(|t| (10.0 * t).cos()).collect();
        let x: Vec<f64> = ts.iter().map(|t| (10.0 * t).cos() + t.cos()).collect();
        let imf = extract_imf(&x, &SiftConfig::default()).unwrap();
        let r = correlation(&imf.samples, &fast);
        assert!(r > 0.95, "correlation {r}");
    }

    #[test]
    fn tone_plus_trend() {
        let n = 1024;
        let ts: Vec<f64> = (0..n).map(|i| i as f64 * 8.0 * PI / n as f64).collect();
        let x: Vec<f64> = ts.iter().map(|t| (10.0 * t).cos() + 0.5 * t).collect();
        let res = decompose(&x, &SiftConfig::default()).unwrap();
        assert!(!res.imfs.is_empty());
        let rec = res.reconstruct();
        let err = x
            .iter()
            .zip(&rec)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-9 * max_abs(&x));

        // Least-squares line through the trend part (residual plus any slow
        // IMFs beyond the first) should have slope 0.5.
        let mut trend = res.residual.clone();
        for imf in &res.imfs[1..] {
            for (t, v) in trend.iter_mut().zip(&imf.samples) {
                *t += v;
            }
        }
        let nf = n as f64;
        let mt = ts.iter().sum::<f64>() / nf;
        let my = trend.iter().sum::<f64>() / nf;
        let sxy: f64 = ts
            .iter()
            .zip(&trend)
            .map(|(t, y)| (t - mt) * (y - my))
            .sum();
        let sxx: f64 = ts.iter().map(|t| (t - mt).powi(2)).sum();
        let slope = sxy / sxx;
        assert!((slope - 0.5).abs() < 0.02, "slope {slope}");
    }

    #[test]
    fn noise_imfs_satisfy_count_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..512).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let res = decompose(&x, &SiftConfig::default()).unwrap();
        assert!(res.imfs.len() >= 4 && res.imfs.len() <= 12);
        for imf in &res.imfs {
            assert!(satisfies_imf_count(&imf.samples));
        }
        assert!(!is_siftable(&res.residual) || res.imfs.len() == 12);
    }

    #[test]
    fn constant_has_no_imfs() {
        let x = vec![4.2; 64];
        let res = decompose(&x, &SiftConfig::default()).unwrap();
        assert!(res.imfs.is_empty());
        assert_eq!(res.residual, x);
    }

    #[test]
    fn short_input_rejected() {
        assert!(matches!(
            decompose(&[1.0; 7], &SiftConfig::default()),
            Err(Error::InsufficientData { needed: 8, .. })
        ));
        let bad = SiftConfig {
            sd_threshold: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn csv_export_header() {
        let x: Vec<f64> = tone(64, 8.0).iter().map(|v| v + 10.0).collect();
        let res = decompose(&x, &SiftConfig::default()).unwrap();
        let csv = res.to_csv();
        let header = csv.lines().next().unwrap();
        assert!(header.starts_with("imf1"));
        assert!(header.ends_with(",residual"));
        assert_eq!(csv.lines().count(), 65);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn reconstruction_and_determinism(xs in prop::collection::vec(-100.0f64..100.0, 8..200)) {
            let cfg = SiftConfig::default();
            let a = decompose(&xs, &cfg).unwrap();
            let b = decompose(&xs, &cfg).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert!(a.imfs.len() <= cfg.max_imfs);
            let rec = a.reconstruct();
            let scale = max_abs(&xs).max(f64::MIN_POSITIVE);
            for (x, r) in xs.iter().zip(&rec) {
                prop_assert!((x - r).abs() <= 1e-9 * scale);
            }
        }
    }
}
