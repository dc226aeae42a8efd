//! Natural cubic spline on strictly increasing knots.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct NaturalSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the knots; zero at both ends.
    m: Vec<f64>,
}

impl NaturalSpline {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n != ys.len() {
            return Err(Error::Dimension {
                expected: n,
                got: ys.len(),
            });
        }
        if n < 2 {
            return Err(Error::InsufficientData { needed: 2, got: n });
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Degenerate("spline knots must increase".into()));
        }

        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the (n-2)x(n-2) system for interior moments.
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut upper = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for i in 1..n - 1 {
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                diag[i - 1] = 2.0 * (h0 + h1);
                upper[i - 1] = h1;
                rhs[i - 1] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
            }
            for i in 1..k {
                let lower = xs[i + 1] - xs[i];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
            }
        }
        Ok(Self { xs, ys, m })
    }

    /// Evaluates the spline; outside the knot span the end cubic pieces are
    /// extended.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let seg = match self.xs.partition_point(|&k| k <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let (x0, x1) = (self.xs[seg], self.xs[seg + 1]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        a * self.ys[seg]
            + b * self.ys[seg + 1]
            + ((a * a * a - a) * self.m[seg] + (b * b * b - b) * self.m[seg + 1]) * h * h / 6.0
    }

    /// Derivative at `x`.
    pub fn derivative(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let seg = match self.xs.partition_point(|&k| k <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let (x0, x1) = (self.xs[seg], self.xs[seg + 1]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        (self.ys[seg + 1] - self.ys[seg]) / h - (3.0 * a * a - 1.0) * h * self.m[seg] / 6.0
            + (3.0 * b * b - 1.0) * h * self.m[seg + 1] / 6.0
    }
}
