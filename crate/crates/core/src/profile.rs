//! Isoperimetric-profile candidate `φ_u(ξ) = L_u(A_u⁻¹(ξ·|M|))` of polar caps.
//!
//! Cap areas use the same Simpson-panel rule as [`AxisymMetric::total_area`],
//! extended inside a panel by integrating the quadratic interpolant of the
//! density exactly. Cap lengths and all `ψ`-derivatives come from the
//! pole-clamped cubic spline of `u`. Profile derivatives are chain-rule closed
//! forms in `ψ`, never differences of the tabulated values.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::AxisymMetric;
use crate::quadrature;
use crate::roots::bisect_increasing;
use crate::spline::PoleClampedSpline;

/// Small-ξ window and sample count for [`asymptotic_sup_curvature`].
pub const FIT_WINDOW: (f64, f64) = (1e-4, 1e-2);
pub const FIT_SAMPLES: usize = 20;

/// Where a profile came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProfileSource {
    /// Built from caps of a metric. Without Ritoré certification the
    /// tabulated values are only an upper bound for the true profile.
    FromMetric {
        certified: bool,
    },
    RosenauClosedForm {
        t: f64,
    },
}

/// Tabulated profile `(ξ, φ, φ', φ'')`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsoperimetricProfile {
    xi: Vec<f64>,
    value: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
    psi: Option<Vec<f64>>,
    sup_curvature: Option<f64>,
    source: ProfileSource,
}

impl IsoperimetricProfile {
    pub(crate) fn from_parts(
        xi: Vec<f64>,
        value: Vec<f64>,
        d1: Vec<f64>,
        d2: Vec<f64>,
        psi: Option<Vec<f64>>,
        sup_curvature: Option<f64>,
        source: ProfileSource,
    ) -> Self {
        Self {
            xi,
            value,
            d1,
            d2,
            psi,
            sup_curvature,
            source,
        }
    }

    /// Profile from externally computed samples, e.g. read back from disk.
    pub fn from_samples(xi: Vec<f64>, value: Vec<f64>, sup_curvature: Option<f64>) -> Result<Self> {
        if xi.len() != value.len() || xi.is_empty() {
            return Err(Error::InvalidArgument(
                "profile needs matching, non-empty samples".into(),
            ));
        }
        validate_xi(&xi)?;
        let n = xi.len();
        Ok(Self {
            xi,
            value,
            d1: vec![f64::NAN; n],
            d2: vec![f64::NAN; n],
            psi: None,
            sup_curvature,
            source: ProfileSource::FromMetric { certified: false },
        })
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn values(&self) -> &[f64] {
        &self.value
    }

    pub fn d1(&self) -> &[f64] {
        &self.d1
    }

    pub fn d2(&self) -> &[f64] {
        &self.d2
    }

    /// Cap angles `A_u⁻¹(ξ|M|)` for profiles built from a metric.
    pub fn psi(&self) -> Option<&[f64]> {
        self.psi.as_deref()
    }

    pub fn sup_curvature(&self) -> Option<f64> {
        self.sup_curvature
    }

    pub fn source(&self) -> ProfileSource {
        self.source
    }

    /// True when the values are known to equal the isoperimetric profile.
    pub fn is_certified(&self) -> bool {
        match self.source {
            ProfileSource::FromMetric { certified } => certified,
            ProfileSource::RosenauClosedForm { .. } => true,
        }
    }
}

fn validate_xi(xi: &[f64]) -> Result<()> {
    if let Some(x) = xi.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
        return Err(Error::InvalidArgument(format!("area fraction {x} outside (0, 1)")));
    }
    if xi.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "area fractions must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Value and derivatives of a profile at one `(ξ, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    /// `∂φ/∂t`
    pub dt: f64,
}

impl ProfileJet {
    /// `∂φ/∂t - [(φ²φ'' - φ(φ')²)/(4π)² + φ + φ'(1 - 2ξ)]`, which vanishes for
    /// profiles of axisymmetric solutions of the normalized flow.
    pub fn equality_residual(&self, xi: f64) -> f64 {
        let (p, p1, p2) = (self.value, self.d1, self.d2);
        let diffusion = (p * p * p2 - p * p1 * p1) / (16.0 * PI * PI);
        self.dt - (diffusion + p + p1 * (1.0 - 2.0 * xi))
    }
}

/// Jets from three profiles on a common `ξ` grid at `t - δ`, `t`, `t + δ`;
/// `∂φ/∂t` by central differences.
pub fn jets_from_time_series(
    before: &IsoperimetricProfile,
    at: &IsoperimetricProfile,
    after: &IsoperimetricProfile,
    delta: f64,
) -> Vec<ProfileJet> {
    (0..at.len())
        .map(|j| ProfileJet {
            value: at.value[j],
            d1: at.d1[j],
            d2: at.d2[j],
            dt: (after.value[j] - before.value[j]) / (2.0 * delta),
        })
        .collect()
}

/// Residuals of the cap variation identities under unit-speed normal motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationResiduals {
    /// `dA/ds - L`
    pub area_rate: f64,
    /// `dL/ds - k·L`
    pub length_rate: f64,
}

/// Cap areas and lengths of one metric, with the data needed to evaluate
/// them off-grid.
#[derive(Debug, Clone)]
pub struct CapGeometry<'a> {
    metric: &'a AxisymMetric,
    spline: PoleClampedSpline,
    /// Cosine coefficients of the area density `e^{2u}`.
    density: Vec<f64>,
    /// Cap areas at the nodes `ψ_i`.
    node_area: Vec<f64>,
}

impl<'a> CapGeometry<'a> {
    pub fn new(metric: &'a AxisymMetric) -> Result<Self> {
        let grid = metric.grid();
        let density = grid.cosines().cosine_coefficients(&metric.density());
        let mut node_area = Vec::with_capacity(grid.len());
        node_area.push(0.0);
        for i in 1..grid.len() {
            let a = 2.0 * PI * quadrature::partial_sine_integral(&density, grid.psi(i));
            if !(a > node_area[i - 1]) {
                return Err(Error::NonMonotoneArea { psi: grid.psi(i - 1) });
            }
            node_area.push(a);
        }
        Ok(Self {
            metric,
            spline: PoleClampedSpline::new(grid.spacing(), metric.u()),
            density,
            node_area,
        })
    }

    pub fn metric(&self) -> &AxisymMetric {
        self.metric
    }

    pub fn total_area(&self) -> f64 {
        *self.node_area.last().expect("at least two nodes")
    }

    /// `A_u(ψ)`, area of the cap `{colatitude ≤ ψ}`.
    pub fn area(&self, psi: f64) -> f64 {
        2.0 * PI * quadrature::partial_sine_integral(&self.density, psi.clamp(0.0, PI))
    }

    /// `L_u(ψ) = 2π e^{u(ψ)} sin ψ`.
    pub fn length(&self, psi: f64) -> f64 {
        let (u, _, _) = self.spline.eval(psi);
        2.0 * PI * u.exp() * psi.sin()
    }

    /// `u, u', u''` from the spline.
    pub fn log_factor(&self, psi: f64) -> (f64, f64, f64) {
        self.spline.eval(psi)
    }

    /// Cap angle enclosing the area fraction `xi`.
    pub fn invert_area(&self, xi: f64) -> Result<f64> {
        if !(xi > 0.0 && xi < 1.0) {
            return Err(Error::InvalidArgument(format!("area fraction {xi} outside (0, 1)")));
        }
        let target = xi * self.total_area();
        // First node at or above the target.
        let i = self
            .node_area
            .partition_point(|&a| a < target)
            .clamp(1, self.node_area.len() - 1);
        let grid = self.metric.grid();
        let (lo, hi) = (grid.psi(i - 1), grid.psi(i));
        Ok(bisect_increasing(|psi| self.area(psi), lo, hi, target, 0.0))
    }

    /// Geodesic curvature `e^{-u}(cot ψ + u')` of the latitude circle at `ψ`.
    pub fn geodesic_curvature(&self, psi: f64) -> f64 {
        let (u, u1, _) = self.spline.eval(psi);
        (-u).exp() * (1.0 / psi.tan() + u1)
    }

    /// `(φ, φ', φ'')` at the cap angle `ψ`, derivatives in the area fraction.
    pub fn profile_at_angle(&self, psi: f64) -> (f64, f64, f64) {
        let (u, u1, u2) = self.spline.eval(psi);
        let total = self.total_area();
        let (s, c) = psi.sin_cos();
        let cot = c / s;
        let e = (-u).exp();
        let value = 2.0 * PI * u.exp() * s;
        let d1 = total * e * (cot + u1);
        let d2 = total * total * e * (u2 - 1.0 / (s * s) - u1 * cot - u1 * u1) * e * e / (2.0 * PI * s);
        (value, d1, d2)
    }

    /// Residuals of `dA/ds = L` and `dL/ds = k·L` with `ds = e^u dψ`, the rates
    /// taken by central differences of width `Δψ`.
    pub fn variation_check(&self, psi: f64) -> Result<VariationResiduals> {
        let delta = self.metric.grid().spacing();
        if !(psi - delta >= 0.0 && psi + delta <= PI) {
            return Err(Error::InvalidArgument(format!("cap angle {psi} too close to a pole")));
        }
        let speed = self.spline.eval(psi).0.exp();
        let length = self.length(psi);
        let da_ds = (self.area(psi + delta) - self.area(psi - delta)) / (2.0 * delta * speed);
        let dl_ds = (self.length(psi + delta) - self.length(psi - delta)) / (2.0 * delta * speed);
        Ok(VariationResiduals {
            area_rate: da_ds - length,
            length_rate: dl_ds - self.geodesic_curvature(psi) * length,
        })
    }
}

/// Convenience wrappers with the metric as the first argument.
pub fn cap_area(m: &AxisymMetric, psi: f64) -> Result<f64> {
    Ok(CapGeometry::new(m)?.area(psi))
}

pub fn cap_length(m: &AxisymMetric, psi: f64) -> Result<f64> {
    Ok(CapGeometry::new(m)?.length(psi))
}

pub fn invert_area(m: &AxisymMetric, xi: f64) -> Result<f64> {
    CapGeometry::new(m)?.invert_area(xi)
}

pub fn geodesic_curvature_latitude(m: &AxisymMetric, psi: f64) -> Result<f64> {
    Ok(CapGeometry::new(m)?.geodesic_curvature(psi))
}

pub fn cap_variation_check(m: &AxisymMetric, psi: f64) -> Result<VariationResiduals> {
    CapGeometry::new(m)?.variation_check(psi)
}

/// Tabulates `φ_u` and its derivatives at the area fractions `xi`.
pub fn build_profile(m: &AxisymMetric, xi: &[f64]) -> Result<IsoperimetricProfile> {
    validate_xi(xi)?;
    let caps = CapGeometry::new(m)?;
    let curvature = m.gauss_curvature()?;
    let certified = m.ritore_criterion()?.certified;
    let mut psi = Vec::with_capacity(xi.len());
    let mut value = Vec::with_capacity(xi.len());
    let mut d1 = Vec::with_capacity(xi.len());
    let mut d2 = Vec::with_capacity(xi.len());
    for &x in xi {
        let angle = caps.invert_area(x)?;
        let (v, p1, p2) = caps.profile_at_angle(angle);
        psi.push(angle);
        value.push(v);
        d1.push(p1);
        d2.push(p2);
    }
    Ok(IsoperimetricProfile {
        xi: xi.to_vec(),
        value,
        d1,
        d2,
        psi: Some(psi),
        sup_curvature: Some(curvature.max()),
        source: ProfileSource::FromMetric { certified },
    })
}

/// `FIT_SAMPLES` log-spaced area fractions spanning [`FIT_WINDOW`].
pub fn fit_window_samples() -> Vec<f64> {
    log_spaced(FIT_WINDOW.0, FIT_WINDOW.1, FIT_SAMPLES)
}

pub(crate) fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Estimates `sup K` from the small-area behaviour
/// `φ(ξ) = 4π√ξ - 2π sup K ξ^{3/2} + O(ξ^{5/2})` of a profile on a surface of
/// area `4π`.
///
/// Fits `(4π√ξ - φ)/(2π ξ^{3/2}) ≈ a + bξ` by least squares over the samples
/// inside [`FIT_WINDOW`] and returns the intercept `a`.
pub fn asymptotic_sup_curvature(p: &IsoperimetricProfile) -> Result<f64> {
    let (lo, hi) = FIT_WINDOW;
    let pts: Vec<(f64, f64)> =
        p.xi.iter()
            .zip(&p.value)
            .filter(|(x, _)| **x >= lo * (1.0 - 1e-12) && **x <= hi * (1.0 + 1e-12))
            .map(|(&x, &v)| (x, (4.0 * PI * x.sqrt() - v) / (2.0 * PI * x.powf(1.5))))
            .collect();
    if pts.len() < 5 {
        return Err(Error::IllConditionedFit(format!(
            "{} samples in [{lo:e}, {hi:e}], need at least 5",
            pts.len()
        )));
    }
    let x_min = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x_max = pts.iter().map(|p| p.0).fold(0.0, f64::max);
    if x_max < 10.0 * x_min {
        return Err(Error::IllConditionedFit(format!(
            "window [{x_min:e}, {x_max:e}] spans less than a decade"
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok(my - slope * mx)
}
