//! Cubic spline of the conformal factor with zero end slopes.
//!
//! The even reflection `u(-ψ) = u(ψ)`, `u(2π - ψ) = u(ψ)` turns `u` into a
//! smooth periodic function; the periodic spline of such data is itself even,
//! so restricted to `[0, π]` it is the clamped spline with `s'(0) = s'(π) = 0`.

#[derive(Debug, Clone)]
pub(crate) struct PoleClampedSpline {
    h: f64,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl PoleClampedSpline {
    pub fn new(h: f64, y: &[f64]) -> Self {
        let n = y.len() - 1;
        let inv_h2 = 6.0 / (h * h);
        // Tridiagonal system for the second derivatives.
        let mut diag = vec![4.0; n + 1];
        let mut rhs = vec![0.0; n + 1];
        diag[0] = 2.0;
        diag[n] = 2.0;
        rhs[0] = inv_h2 * (y[1] - y[0]);
        rhs[n] = inv_h2 * (y[n - 1] - y[n]);
        for i in 1..n {
            rhs[i] = inv_h2 * (y[i + 1] - 2.0 * y[i] + y[i - 1]);
        }
        // Thomas algorithm, unit off-diagonals.
        let mut c = vec![0.0; n + 1];
        c[0] = 1.0 / diag[0];
        rhs[0] /= diag[0];
        for i in 1..=n {
            let denom = diag[i] - c[i - 1];
            c[i] = 1.0 / denom;
            rhs[i] = (rhs[i] - rhs[i - 1]) / denom;
        }
        let mut m = rhs;
        for i in (0..n).rev() {
            m[i] -= c[i] * m[i + 1];
        }
        Self { h, y: y.to_vec(), m }
    }

    fn locate(&self, x: f64) -> (usize, f64, f64) {
        let n = self.y.len() - 1;
        let pos = (x / self.h).floor();
        let i = if pos < 0.0 { 0 } else { (pos as usize).min(n - 1) };
        let left = x - i as f64 * self.h;
        let right = self.h - left;
        (i, left, right)
    }

    /// Value, first and second derivative at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let (i, a, b) = self.locate(x);
        let h = self.h;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let value =
            (b * b * b * m0 + a * a * a * m1) / (6.0 * h) + (y0 / h - m0 * h / 6.0) * b + (y1 / h - m1 * h / 6.0) * a;
        let d1 = (-b * b * m0 + a * a * m1) / (2.0 * h) + (y1 - y0) / h - (m1 - m0) * h / 6.0;
        let d2 = (b * m0 + a * m1) / h;
        (value, d1, d2)
    }
}
