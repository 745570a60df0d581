//! Rotationally symmetric conformal metrics `e^{2u(ψ)}·g_round` on a uniform
//! colatitude grid.
//!
//! The Laplace–Beltrami part `u'' + cot ψ·u'` is discretised in flux form,
//! `(sin ψ·u')' / sin ψ`, with central differences across cell faces and the
//! round-sphere cell areas `cos ψ_{i-½} - cos ψ_{i+½}` as control volumes. At
//! the poles the half-cell is a spherical cap and the single face flux plays
//! the role of the even-reflection ghost point (`u_{-1} = u_1`); the limit is
//! `2u''`. Summed against the cell areas the fluxes telescope, so the
//! discrete total curvature is exactly `4π`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature;

/// Largest admissible `|u|`; beyond this `e^{2u}` leaves any meaningful range.
pub const MAX_ABS_U: f64 = 50.0;

/// Smallest admissible number of grid intervals.
pub const MIN_INTERVALS: usize = 16;

#[derive(Debug)]
struct GridTables {
    n: usize,
    spacing: f64,
    psi: Vec<f64>,
    /// `sin ψ` at the faces `ψ_{i+½}`, `i = 0..n`.
    face_sin: Vec<f64>,
    /// Round-sphere cell areas divided by `2π`.
    cell_area: Vec<f64>,
    /// Nodal weights of `∫_0^π f(s) sin s ds`.
    sine_weights: Vec<f64>,
    cosines: quadrature::CosineTable,
}

/// Uniform samples `ψ_i = iπ/n` of the polar angle, `n` even and at least 16.
#[derive(Debug, Clone)]
pub struct ColatitudeGrid {
    tables: Arc<GridTables>,
}

impl PartialEq for ColatitudeGrid {
    fn eq(&self, other: &Self) -> bool {
        self.tables.n == other.tables.n
    }
}

impl ColatitudeGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < MIN_INTERVALS {
            return Err(Error::InvalidGrid(format!(
                "n = {n} intervals, need at least {MIN_INTERVALS}"
            )));
        }
        if n % 2 != 0 {
            return Err(Error::InvalidGrid(format!("n = {n} must be even")));
        }
        let h = PI / n as f64;
        let psi: Vec<f64> = (0..=n).map(|i| if i == n { PI } else { i as f64 * h }).collect();
        // Faces of the southern half mirror the northern ones bit for bit, so
        // the stencil commutes exactly with ψ ↦ π - ψ.
        let half = n / 2;
        let mut face_cos = vec![0.0; n];
        let mut face_sin = vec![0.0; n];
        for i in 0..half {
            let x = (i as f64 + 0.5) * h;
            face_cos[i] = x.cos();
            face_sin[i] = x.sin();
            face_cos[n - 1 - i] = -face_cos[i];
            face_sin[n - 1 - i] = face_sin[i];
        }
        let mut cell_area = vec![0.0; n + 1];
        cell_area[0] = 1.0 - face_cos[0];
        for i in 1..n {
            cell_area[i] = face_cos[i - 1] - face_cos[i];
        }
        cell_area[n] = face_cos[n - 1] + 1.0;

        let cosines = quadrature::CosineTable::new(n);
        let sine_weights = cosines.sine_weights();
        Ok(Self {
            tables: Arc::new(GridTables {
                n,
                spacing: h,
                psi,
                face_sin,
                cell_area,
                sine_weights,
                cosines,
            }),
        })
    }

    /// Number of intervals.
    pub fn intervals(&self) -> usize {
        self.tables.n
    }

    /// Number of nodes, `n + 1`.
    pub fn len(&self) -> usize {
        self.tables.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.tables.spacing
    }

    pub fn nodes(&self) -> &[f64] {
        &self.tables.psi
    }

    pub fn psi(&self, i: usize) -> f64 {
        self.tables.psi[i]
    }

    /// Round-sphere area of each control volume (full azimuth).
    pub fn cell_areas(&self) -> impl Iterator<Item = f64> + '_ {
        self.tables.cell_area.iter().map(|a| 2.0 * PI * a)
    }

    pub(crate) fn cosines(&self) -> &quadrature::CosineTable {
        &self.tables.cosines
    }

    /// `2π ∫_0^π f(ψ) sin ψ dψ` for nodal samples of `f`.
    pub fn sphere_integral(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.len());
        2.0 * PI * self.tables.sine_weights.iter().zip(f).map(|(w, v)| w * v).sum::<f64>()
    }

    /// Flux-form spherical Laplacian `(sin ψ·f')' / sin ψ` of nodal data.
    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        let t = &*self.tables;
        let n = t.n;
        let inv_h = 1.0 / t.spacing;
        let mut out = vec![0.0; n + 1];
        let mut flux_left = 0.0;
        for i in 0..n {
            let flux = t.face_sin[i] * (f[i + 1] - f[i]) * inv_h;
            out[i] = (flux - flux_left) / t.cell_area[i];
            flux_left = flux;
        }
        out[n] = -flux_left / t.cell_area[n];
        out
    }
}

/// Conformal factor samples `u(ψ_i)` of the metric `e^{2u}·g_round` at a flow time.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisymMetric {
    grid: ColatitudeGrid,
    u: Vec<f64>,
    time: f64,
}

impl AxisymMetric {
    pub fn new(grid: ColatitudeGrid, u: Vec<f64>, time: f64) -> Result<Self> {
        if u.len() != grid.len() {
            return Err(Error::InvalidMetric(format!(
                "{} samples for a grid of {} nodes",
                u.len(),
                grid.len()
            )));
        }
        if let Some(i) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidMetric(format!("non-finite u at node {i}")));
        }
        if let Some(i) = u.iter().position(|v| v.abs() > MAX_ABS_U) {
            return Err(Error::InvalidMetric(format!(
                "|u| = {} at node {i} exceeds {MAX_ABS_U}",
                u[i].abs()
            )));
        }
        if !time.is_finite() {
            return Err(Error::InvalidMetric("non-finite time".into()));
        }
        Ok(Self { grid, u, time })
    }

    pub fn from_fn(grid: ColatitudeGrid, f: impl Fn(f64) -> f64, time: f64) -> Result<Self> {
        let u = grid.nodes().iter().map(|&p| f(p)).collect();
        Self::new(grid, u, time)
    }

    /// The round unit sphere, `u ≡ 0`.
    pub fn round(grid: ColatitudeGrid) -> Self {
        let n = grid.len();
        Self {
            grid,
            u: vec![0.0; n],
            time: 0.0,
        }
    }

    /// `u(ψ) = Σ a_k cos(kψ)` over even modes `k`. Not normalized.
    pub fn fourier(grid: ColatitudeGrid, modes: &[(u32, f64)]) -> Result<Self> {
        if let Some((k, _)) = modes.iter().find(|(k, _)| k % 2 != 0) {
            return Err(Error::InvalidMetric(format!("Fourier mode {k} is odd")));
        }
        Self::from_fn(
            grid,
            |p| modes.iter().map(|&(k, a)| a * (k as f64 * p).cos()).sum(),
            0.0,
        )
    }

    pub fn grid(&self) -> &ColatitudeGrid {
        &self.grid
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn max_abs_u(&self) -> f64 {
        self.u.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// One-sided slopes `(u_1 - u_0)/Δψ` and `(u_n - u_{n-1})/Δψ`; both are
    /// O(Δψ) for a pole-regular metric.
    pub fn pole_slopes(&self) -> (f64, f64) {
        let n = self.grid.intervals();
        let h = self.grid.spacing();
        ((self.u[1] - self.u[0]) / h, (self.u[n] - self.u[n - 1]) / h)
    }

    /// The metric pulled back by `ψ ↦ π - ψ`.
    pub fn reflect(&self) -> Self {
        let mut u = self.u.clone();
        u.reverse();
        Self {
            grid: self.grid.clone(),
            u,
            time: self.time,
        }
    }

    /// Nodal Gauss curvature `K = e^{-2u}(1 - Δu)`.
    pub fn gauss_curvature(&self) -> Result<CurvatureField> {
        let lap = self.grid.laplacian(&self.u);
        let k: Vec<f64> = self
            .u
            .iter()
            .zip(&lap)
            .map(|(u, l)| (-2.0 * u).exp() * (1.0 - l))
            .collect();
        if let Some(i) = k.iter().position(|v| !v.is_finite()) {
            return Err(Error::Blowup {
                time: self.time,
                reason: format!("non-finite curvature at node {i}"),
                last_good: None,
            });
        }
        Ok(CurvatureField {
            grid: self.grid.clone(),
            k,
        })
    }

    /// Conformal density `e^{2u}` at the nodes.
    pub fn density(&self) -> Vec<f64> {
        self.u.iter().map(|u| (2.0 * u).exp()).collect()
    }

    /// `2π ∫_0^π e^{2u} sin ψ dψ`.
    pub fn total_area(&self) -> f64 {
        self.grid.sphere_integral(&self.density())
    }

    /// Shifts `u` by `-½ ln(A/4π)` so the total area is `4π`.
    pub fn normalize(&self) -> Self {
        let shift = -0.5 * (self.total_area() / (4.0 * PI)).ln();
        Self {
            grid: self.grid.clone(),
            u: self.u.iter().map(|u| u + shift).collect(),
            time: self.time,
        }
    }

    /// `∫ K dμ` over the control volumes of the curvature stencil.
    ///
    /// This is the measure under which the discrete Gauss–Bonnet identity
    /// holds; it equals `4π` up to rounding for every metric.
    pub fn total_curvature(&self) -> Result<f64> {
        let k = self.gauss_curvature()?;
        Ok(k.k
            .iter()
            .zip(&self.u)
            .zip(self.grid.cell_areas())
            .map(|((k, u), a)| k * (2.0 * u).exp() * a)
            .sum())
    }

    /// `∫ K dμ` by the area quadrature applied to the nodal curvature. Differs
    /// from `4π` by the O(Δψ²) truncation error of the curvature stencil.
    pub fn total_curvature_quadrature(&self) -> Result<f64> {
        let k = self.gauss_curvature()?;
        let integrand: Vec<f64> = k.k.iter().zip(&self.u).map(|(k, u)| k * (2.0 * u).exp()).collect();
        Ok(self.grid.sphere_integral(&integrand))
    }

    /// Checks the Ritoré criterion: curvature positive everywhere and
    /// non-increasing from the north pole to the equator.
    pub fn ritore_criterion(&self) -> Result<RitoreVerdict> {
        let k = self.gauss_curvature()?;
        Ok(k.ritore_scan())
    }
}

/// Why a metric failed the Ritoré criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RitoreViolation {
    NonPositiveCurvature,
    IncreasingCurvature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RitoreVerdict {
    pub certified: bool,
    pub first_violation: Option<(usize, RitoreViolation)>,
}

/// Nodal Gauss curvature on a colatitude grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureField {
    grid: ColatitudeGrid,
    k: Vec<f64>,
}

impl CurvatureField {
    pub fn grid(&self) -> &ColatitudeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.k
    }

    pub fn max(&self) -> f64 {
        self.k.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.k.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `max |∂K/∂ψ|` by central differences; the pole derivatives vanish.
    pub fn sup_abs_derivative(&self) -> f64 {
        let h = self.grid.spacing();
        self.k
            .windows(3)
            .map(|w| ((w[2] - w[0]) / (2.0 * h)).abs())
            .fold(0.0, f64::max)
    }

    fn ritore_scan(&self) -> RitoreVerdict {
        let half = self.grid.intervals() / 2;
        for (i, &k) in self.k.iter().enumerate() {
            if k <= 0.0 {
                return RitoreVerdict {
                    certified: false,
                    first_violation: Some((i, RitoreViolation::NonPositiveCurvature)),
                };
            }
            if (1..=half).contains(&i) {
                let prev = self.k[i - 1];
                // Allow rounding noise on plateaus.
                if k > prev + 64.0 * f64::EPSILON * prev.abs() {
                    return RitoreVerdict {
                        certified: false,
                        first_violation: Some((i, RitoreViolation::IncreasingCurvature)),
                    };
                }
            }
        }
        RitoreVerdict {
            certified: true,
            first_violation: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(n: usize) -> ColatitudeGrid {
        ColatitudeGrid::new(n).unwrap()
    }

    #[test]
    fn grid_rejects_small_or_odd() {
        assert!(matches!(ColatitudeGrid::new(14), Err(Error::InvalidGrid(_))));
        assert!(matches!(ColatitudeGrid::new(33), Err(Error::InvalidGrid(_))));
        let g = grid(16);
        assert_eq!(g.nodes()[0], 0.0);
        assert_eq!(g.nodes()[16], PI);
        assert_relative_eq!(g.spacing(), PI / 16.0);
    }

    #[test]
    fn round_sphere_curvature_is_exactly_one() {
        let m = AxisymMetric::round(grid(64));
        let k = m.gauss_curvature().unwrap();
        assert!(k.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn constant_shift_rescales_curvature() {
        let c = 0.3;
        let m = AxisymMetric::from_fn(grid(32), |_| c, 0.0).unwrap();
        for &k in m.gauss_curvature().unwrap().values() {
            assert_relative_eq!(k, (-2.0 * c).exp(), max_relative = 1e-15);
        }
    }

    #[test]
    fn areas_of_constant_factors() {
        assert_relative_eq!(
            AxisymMetric::round(grid(64)).total_area(),
            4.0 * PI,
            max_relative = 1e-14
        );
        let m = AxisymMetric::from_fn(grid(64), |_| 0.5 * 2f64.ln(), 0.0).unwrap();
        assert_relative_eq!(m.total_area(), 8.0 * PI, max_relative = 1e-14);
    }

    #[test]
    fn area_matches_adaptive_quadrature() {
        // 2π ∫ e^{0.2 cos 2s} sin s ds by 40-digit adaptive quadrature.
        let oracle = 11.841_867_803_942_837_602;
        let m = AxisymMetric::from_fn(grid(256), |p| 0.1 * (2.0 * p).cos(), 0.0).unwrap();
        assert!((m.total_area() - oracle).abs() < 1e-9);
    }

    #[test]
    fn normalize_shift_and_idempotence() {
        let m = AxisymMetric::from_fn(grid(256), |p| 0.1 * (2.0 * p).cos(), 0.0).unwrap();
        let n1 = m.normalize();
        // Oracle shift −½ ln(A/4π) from the adaptive-quadrature area.
        let shift = 0.029_691_438_121_925_555;
        assert!((n1.u()[0] - m.u()[0] - shift).abs() < 1e-10);
        assert!((n1.total_area() - 4.0 * PI).abs() < 1e-10);
        let n2 = n1.normalize();
        for (a, b) in n1.u().iter().zip(n2.u()) {
            assert!((a - b).abs() <= 2.0 * f64::EPSILON * a.abs().max(1.0));
        }
        let c = AxisymMetric::from_fn(grid(64), |_| 0.7, 0.0).unwrap().normalize();
        assert!(c.max_abs_u() < 1e-14);
    }

    #[test]
    fn rejects_degenerate_samples() {
        let g = grid(16);
        assert!(AxisymMetric::new(g.clone(), vec![0.0; 5], 0.0).is_err());
        assert!(AxisymMetric::from_fn(g.clone(), |_| 51.0, 0.0).is_err());
        assert!(AxisymMetric::from_fn(g, |p| if p > 1.0 { f64::NAN } else { 0.0 }, 0.0).is_err());
    }

    #[test]
    fn fourier_rejects_odd_modes() {
        assert!(AxisymMetric::fourier(grid(32), &[(3, 0.1)]).is_err());
        let m = AxisymMetric::fourier(grid(32), &[(2, 0.1), (4, 0.05)]).unwrap();
        assert_relative_eq!(m.u()[0], 0.15);
    }

    #[test]
    fn discrete_gauss_bonnet_is_exact() {
        for amp in [0.1, 0.6, 1.5] {
            let m = AxisymMetric::fourier(grid(128), &[(2, amp), (6, 0.1 * amp)]).unwrap();
            let total = m.total_curvature().unwrap();
            assert!((total - 4.0 * PI).abs() < 1e-11, "amp {amp}: {total}");
        }
    }

    #[test]
    fn quadrature_gauss_bonnet_converges_at_second_order() {
        let err = |n| {
            let m = AxisymMetric::fourier(grid(n), &[(2, 0.1)]).unwrap().normalize();
            (m.total_curvature_quadrature().unwrap() - 4.0 * PI).abs()
        };
        let (e64, e128, e256) = (err(64), err(128), err(256));
        for ratio in [e64 / e128, e128 / e256] {
            assert!((3.4..=4.6).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn curvature_commutes_with_reflection() {
        let m = AxisymMetric::fourier(grid(64), &[(2, 0.2), (4, -0.1)]).unwrap();
        let k = m.gauss_curvature().unwrap();
        let kr = m.reflect().gauss_curvature().unwrap();
        let n = k.values().len();
        for i in 0..n {
            assert!((k.values()[i] - kr.values()[n - 1 - i]).abs() < 1e-12);
        }
    }

    #[test]
    fn ritore_rejects_oscillating_curvature() {
        let m = AxisymMetric::fourier(grid(128), &[(4, 0.5)]).unwrap().normalize();
        let v = m.ritore_criterion().unwrap();
        assert!(!v.certified);
        // Oracle: direct scan of the closed-form curvature of 0.5 cos 4ψ.
        let c = m.u()[0] - 0.5;
        let exact = |p: f64| {
            let u = 0.5 * (4.0 * p).cos() + c;
            let up = -2.0 * (4.0 * p).sin();
            let upp = -8.0 * (4.0 * p).cos();
            let drift = if p == 0.0 { upp } else { up / p.tan() };
            (-2.0 * u).exp() * (1.0 - upp - drift)
        };
        let g = m.grid();
        let first_bad = (1..=64)
            .find(|&i| exact(g.psi(i)) > exact(g.psi(i - 1)) || exact(g.psi(i)) <= 0.0)
            .unwrap();
        assert_eq!(v.first_violation.unwrap().0, first_bad);
    }

    #[test]
    fn ritore_accepts_round_sphere() {
        let v = AxisymMetric::round(grid(32)).ritore_criterion().unwrap();
        assert!(v.certified);
        assert_eq!(v.first_violation, None);
    }
}
