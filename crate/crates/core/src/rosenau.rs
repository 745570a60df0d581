//! Closed forms for the Rosenau solution of normalized Ricci flow.
//!
//! On the cylinder `ℝ × [0, 4π]` the metric is `U(x)(dx² + dy²)` with
//! `U = sinh h / (2h(cosh x + cosh h))` and `h = e^{-2t}`. The colatitude map
//! `ψ = 2 arctan(e^{x/2})` puts the equator at `x = 0` and gives
//! `e^{2v(ψ)} = 4U / sin²ψ = (sinh h / h) / (1 + sinh²(h/2) sin²ψ)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::metric::{AxisymMetric, ColatitudeGrid};
use crate::profile::{IsoperimetricProfile, ProfileJet, ProfileSource};

/// Below this `h` the profile ratio is evaluated by its Taylor expansion.
pub const SERIES_THRESHOLD: f64 = 1e-4;

/// The Rosenau solution at one instant: `h = e^{-2t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RosenauState {
    t: f64,
    h: f64,
}

impl RosenauState {
    /// State at flow time `t`; `t = +∞` is the round sphere.
    pub fn at_time(t: f64) -> Self {
        Self { t, h: (-2.0 * t).exp() }
    }

    pub fn from_parameter(h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "Rosenau parameter h = {h} must be positive"
            )));
        }
        Ok(Self { t: -0.5 * h.ln(), h })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Conformal factor `U(x)` on the cylinder.
    pub fn conformal_factor(&self, x: f64) -> f64 {
        let h = self.h;
        if h == 0.0 {
            return 0.5 / (x.cosh() + 1.0);
        }
        h.sinh() / (2.0 * h * (x.cosh() + h.cosh()))
    }

    /// Gauss curvature `h(1 + cosh x cosh h) / (sinh h (cosh x + cosh h))`.
    pub fn curvature(&self, x: f64) -> f64 {
        let h = self.h;
        let sech = 1.0 / x.cosh();
        let h_over_sinh = if h == 0.0 { 1.0 } else { h / h.sinh() };
        h_over_sinh * (sech + h.cosh()) / (1.0 + h.cosh() * sech)
    }

    /// `h coth h`, attained at the poles.
    pub fn sup_curvature(&self) -> f64 {
        x_coth_x(self.h)
    }

    /// `h / sinh h`, attained on the equator.
    pub fn min_curvature(&self) -> f64 {
        if self.h == 0.0 {
            1.0
        } else {
            self.h / self.h.sinh()
        }
    }

    /// Log conformal factor `v(ψ)` relative to the round metric.
    pub fn sphere_log_factor(&self, psi: f64) -> f64 {
        let h = self.h;
        let s = (0.5 * h).sinh() * psi.sin();
        0.5 * (sinhc(h).ln() - (s * s).ln_1p())
    }

    /// `∂v/∂t` at colatitude `ψ`, through `dh/dt = -2h`.
    pub fn sphere_log_rate(&self, psi: f64) -> f64 {
        let h = self.h;
        if h == 0.0 {
            return 0.0;
        }
        let s2 = psi.sin().powi(2);
        -h * (1.0 / h.tanh() - 1.0 / h - h.sinh() * s2 / (2.0 + (h.cosh() - 1.0) * s2))
    }

    /// The Rosenau metric sampled on a colatitude grid, at flow time 0.
    pub fn as_axisym(&self, grid: ColatitudeGrid) -> Result<AxisymMetric> {
        AxisymMetric::from_fn(grid, |p| self.sphere_log_factor(p), 0.0)
    }

    /// `φ(ξ) = 4π sqrt(sinh(ξh) sinh((1-ξ)h) / (h sinh h))`.
    pub fn profile(&self, xi: f64) -> f64 {
        4.0 * PI * profile_ratio(xi, self.h).sqrt()
    }

    /// Value with analytic `ξ`- and `t`-derivatives.
    pub fn profile_jet(&self, xi: f64) -> ProfileJet {
        let h = self.h;
        let eta = 1.0 - xi;
        let value = self.profile(xi);
        let (xa, xb) = (x_coth_x(xi * h), x_coth_x(eta * h));
        let (ya, yb) = (x_csch_x_sq(xi * h), x_csch_x_sq(eta * h));
        let slope = 0.5 * (xa / xi - xb / eta);
        let slope_d = -0.5 * (ya / (xi * xi) + yb / (eta * eta));
        let log_rate = -(xa + xb - 1.0 - x_coth_x(h));
        ProfileJet {
            value,
            d1: value * slope,
            d2: value * (slope * slope + slope_d),
            dt: value * log_rate,
        }
    }

    /// Closed-form profile tabulated on `xi`.
    pub fn tabulate_profile(&self, xi: &[f64]) -> IsoperimetricProfile {
        let jets: Vec<ProfileJet> = xi.iter().map(|&x| self.profile_jet(x)).collect();
        IsoperimetricProfile::from_parts(
            xi.to_vec(),
            jets.iter().map(|j| j.value).collect(),
            jets.iter().map(|j| j.d1).collect(),
            jets.iter().map(|j| j.d2).collect(),
            None,
            Some(self.sup_curvature()),
            ProfileSource::RosenauClosedForm { t: self.t },
        )
    }
}

/// Profile of the Rosenau solution at time `t` (`t = +∞` gives the round profile).
pub fn profile_at(xi: f64, t: f64) -> f64 {
    RosenauState::at_time(t).profile(xi)
}

/// Round-sphere profile `4π sqrt(ξ(1-ξ))`.
pub fn round_profile(xi: f64) -> f64 {
    4.0 * PI * (xi * (1.0 - xi)).sqrt()
}

/// Sharp upper curvature bound `e^{-2(t+t0)} coth(e^{-2(t+t0)})`; equals 1
/// when `t + t0 = +∞`.
pub fn curvature_bound(t: f64, t0: f64) -> f64 {
    let s = t + t0;
    if s == f64::INFINITY {
        return 1.0;
    }
    x_coth_x((-2.0 * s).exp())
}

/// `x coth x`, continuous at 0.
pub fn x_coth_x(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 3.0 - x2 * x2 / 45.0
    } else if ax > 20.0 {
        ax
    } else {
        x / x.tanh()
    }
}

/// `x² csch² x`, continuous at 0.
pub fn x_csch_x_sq(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 3.0 + x2 * x2 / 15.0
    } else if ax > 700.0 {
        0.0
    } else {
        let r = x / x.sinh();
        r * r
    }
}

fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sinh() / x
    }
}

fn ln_sinh(y: f64) -> f64 {
    if y > 20.0 {
        y - std::f64::consts::LN_2 + (-(-2.0 * y).exp()).ln_1p()
    } else {
        y.sinh().ln()
    }
}

/// `sinh(ξh) sinh((1-ξ)h) / (h sinh h)`, stable from `h → 0` to large `h`.
pub fn profile_ratio(xi: f64, h: f64) -> f64 {
    let eta = 1.0 - xi;
    if h < SERIES_THRESHOLD {
        let (a2, b2, h2) = ((xi * h).powi(2), (eta * h).powi(2), h * h);
        let series = |z2: f64| 1.0 + z2 / 6.0 + z2 * z2 / 120.0;
        xi * eta * series(a2) * series(b2) / series(h2)
    } else if h > 20.0 {
        (ln_sinh(xi * h) + ln_sinh(eta * h) - ln_sinh(h) - h.ln()).exp()
    } else {
        (xi * h).sinh() * (eta * h).sinh() / (h.sinh() * h)
    }
}
