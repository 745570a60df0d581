//! Quadrature rules on the colatitude grid.
//!
//! Areas are integrals `∫_0^π f(s) sin s ds` of smooth even functions `f`.
//! With `z = cos s` these become `∫_{-1}^{1} F(z) dz` sampled at the Chebyshev
//! extreme points, so the cosine interpolant of the nodal values (a DCT-I)
//! integrates them with Clenshaw–Curtis accuracy. Partial integrals up to an
//! arbitrary `ψ` use the same interpolant.

use std::f64::consts::PI;
#[cfg(test)]
use std::sync::OnceLock;

/// Table of `cos(mπ/n)` for `m = 0..2n`.
#[derive(Debug, Clone)]
pub(crate) struct CosineTable {
    n: usize,
    cos: Vec<f64>,
}

impl CosineTable {
    pub fn new(n: usize) -> Self {
        let cos = (0..2 * n).map(|m| (PI * m as f64 / n as f64).cos()).collect();
        Self { n, cos }
    }

    /// `cos(kjπ/n)`.
    fn at(&self, k: usize, j: usize) -> f64 {
        self.cos[(k * j) % (2 * self.n)]
    }

    /// Coefficients `a_k` with `f(ψ_j) = Σ'' a_k cos(kψ_j)`, where `Σ''` halves
    /// the first and last terms.
    pub fn cosine_coefficients(&self, f: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..=n)
            .map(|k| {
                let mut acc = 0.5 * (f[0] + f[n] * self.at(k, n));
                for (j, fj) in f.iter().enumerate().take(n).skip(1) {
                    acc += fj * self.at(k, j);
                }
                2.0 * acc / n as f64
            })
            .collect()
    }

    /// Nodal weights of `∫_0^π f(s) sin s ds`.
    pub fn sine_weights(&self) -> Vec<f64> {
        let n = self.n;
        // ∫_0^π cos(ks) sin s ds = 2/(1 - k²) for even k, 0 for odd k.
        let moment = |k: usize| {
            if k % 2 == 1 {
                0.0
            } else {
                2.0 / (1.0 - (k * k) as f64)
            }
        };
        (0..=n)
            .map(|j| {
                let mut acc = 0.5 * (moment(0) + moment(n) * self.at(n, j));
                for k in 1..n {
                    acc += moment(k) * self.at(k, j);
                }
                let end = if j == 0 || j == n { 0.5 } else { 1.0 };
                end * 2.0 * acc / n as f64
            })
            .collect()
    }
}

/// `∫_0^ψ p(s) sin s ds` for `p(s) = Σ'' a_k cos(ks)`.
pub(crate) fn partial_sine_integral(coeffs: &[f64], psi: f64) -> f64 {
    let n = coeffs.len() - 1;
    let theta = 0.5 * psi;
    let (st, ct) = theta.sin_cos();
    // sin(mθ) for m = 0..=n+1 by rotation.
    let mut sines = Vec::with_capacity(n + 2);
    let (mut s, mut c) = (0.0f64, 1.0f64);
    for _ in 0..=n + 1 {
        sines.push(s);
        let next = s * ct + c * st;
        c = c * ct - s * st;
        s = next;
    }
    // ∫_0^ψ cos(ks) sin s ds, written with 1 - cos x = 2 sin²(x/2).
    let moment = |k: usize| -> f64 {
        match k {
            0 => 2.0 * sines[1] * sines[1],
            1 => 2.0 * (st * ct).powi(2),
            _ => {
                let kp = (k + 1) as f64;
                let km = (k - 1) as f64;
                sines[k + 1] * sines[k + 1] / kp - sines[k - 1] * sines[k - 1] / km
            }
        }
    };
    let mut acc = 0.5 * (coeffs[0] * moment(0) + coeffs[n] * moment(n));
    for (k, a) in coeffs.iter().enumerate().take(n).skip(1) {
        acc += a * moment(k);
    }
    acc
}

/// Value of `Σ'' a_k cos(kψ)`.
#[cfg(test)]
pub(crate) fn cosine_series(coeffs: &[f64], psi: f64) -> f64 {
    let n = coeffs.len() - 1;
    let c1 = psi.cos();
    let (mut prev, mut cur) = (c1, 1.0);
    let mut acc = 0.5 * coeffs[0];
    for (k, a) in coeffs.iter().enumerate().skip(1) {
        // cos(kψ) = 2 cos ψ cos((k-1)ψ) - cos((k-2)ψ)
        let next = 2.0 * c1 * cur - prev;
        prev = cur;
        cur = next;
        acc += if k == n { 0.5 * a * cur } else { a * cur };
    }
    acc
}

/// Eight-point Gauss–Legendre rule on [-1, 1], the oracle for the tests.
#[cfg(test)]
pub(crate) struct GaussLegendre {
    pub nodes: [f64; 8],
    pub weights: [f64; 8],
}

#[cfg(test)]
pub(crate) fn gauss_legendre() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| {
        const N: usize = 8;
        let mut nodes = [0.0; N];
        let mut weights = [0.0; N];
        for i in 0..N {
            // Newton on P_N from the Chebyshev-like initial guess.
            let mut x = (PI * (i as f64 + 0.75) / (N as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre(N, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-17 {
                    break;
                }
            }
            let (_, d) = legendre(N, x);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * d * d);
        }
        GaussLegendre { nodes, weights }
    })
}

#[cfg(test)]
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre integral of `f` over `[a, b]`.
#[cfg(test)]
pub(crate) fn integrate<F: Fn(f64) -> f64>(a: f64, b: f64, f: F) -> f64 {
    let rule = gauss_legendre();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.nodes
        .iter()
        .zip(rule.weights.iter())
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}
