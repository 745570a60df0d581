//! Normalized Ricci flow `∂u/∂t = e^{-2u}Δu + 1 - e^{-2u}` for the conformal
//! factor, integrated with classical RK4 under a diffusive step limit.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::metric::AxisymMetric;

/// Abort when the curvature exceeds this.
pub const BLOWUP_CURVATURE: f64 = 1e6;

/// Right-hand side of the conformal-factor equation.
pub type RhsFn = fn(&AxisymMetric) -> Result<Vec<f64>>;

/// `e^{-2u}Δu + 1 - e^{-2u}` at every node (equivalently `1 - K`).
pub fn rhs(m: &AxisymMetric) -> Result<Vec<f64>> {
    let lap = m.grid().laplacian(m.u());
    let out: Vec<f64> = m
        .u()
        .iter()
        .zip(&lap)
        .map(|(u, l)| {
            let e = (-2.0 * u).exp();
            e * l + 1.0 - e
        })
        .collect();
    if let Some(i) = out.iter().position(|v| !v.is_finite()) {
        return Err(Error::Blowup {
            time: m.time(),
            reason: format!("non-finite flow velocity at node {i}"),
            last_good: None,
        });
    }
    Ok(out)
}

/// Explicit step limit `safety · Δψ² · min e^{2u} / 4`.
pub fn stability_dt(m: &AxisymMetric, safety: f64) -> f64 {
    let h = m.grid().spacing();
    let min_u = m.u().iter().copied().fold(f64::INFINITY, f64::min);
    safety * h * h * (2.0 * min_u).exp() / 4.0
}

fn blowup(m: &AxisymMetric, reason: String) -> Error {
    Error::Blowup {
        time: m.time(),
        reason,
        last_good: Some(Box::new(m.clone())),
    }
}

fn stage(m: &AxisymMetric, base: &[f64], k: &[f64], scale: f64) -> Result<AxisymMetric> {
    let u = base.iter().zip(k).map(|(b, k)| b + scale * k).collect();
    AxisymMetric::new(m.grid().clone(), u, m.time()).map_err(|e| blowup(m, e.to_string()))
}

/// One classical RK4 step of size `dt`, optionally followed by area
/// renormalization.
pub fn step(m: &AxisymMetric, dt: f64, renormalize: bool) -> Result<AxisymMetric> {
    step_with(rhs, m, dt, renormalize)
}

pub fn step_with(f: RhsFn, m: &AxisymMetric, dt: f64, renormalize: bool) -> Result<AxisymMetric> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("time step {dt} must be positive")));
    }
    let u0 = m.u();
    let wrap = |e: Error| match e {
        Error::Blowup { reason, .. } => blowup(m, reason),
        other => other,
    };
    let k1 = f(m).map_err(wrap)?;
    let k2 = f(&stage(m, u0, &k1, 0.5 * dt)?).map_err(wrap)?;
    let k3 = f(&stage(m, u0, &k2, 0.5 * dt)?).map_err(wrap)?;
    let k4 = f(&stage(m, u0, &k3, dt)?).map_err(wrap)?;
    let u: Vec<f64> = (0..u0.len())
        .map(|i| u0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    let next = AxisymMetric::new(m.grid().clone(), u, m.time() + dt).map_err(|e| blowup(m, e.to_string()))?;
    Ok(if renormalize { next.normalize() } else { next })
}

/// Integration settings.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowParams {
    /// Fraction of the diffusive step limit, in (0, 1].
    pub safety: f64,
    pub t_end: f64,
    pub renormalize_each_step: bool,
    /// Snapshot times, sorted, within `[0, t_end]`.
    pub output_times: Vec<f64>,
}

impl FlowParams {
    pub fn new(t_end: f64, output_times: Vec<f64>) -> Self {
        Self {
            safety: 0.5,
            t_end,
            renormalize_each_step: true,
            output_times,
        }
    }

    /// `count + 1` evenly spaced snapshot times from 0 to `t_end`.
    pub fn uniform(t_end: f64, count: usize) -> Self {
        let times = (0..=count)
            .map(|i| {
                if i == count {
                    t_end
                } else {
                    t_end * i as f64 / count as f64
                }
            })
            .collect();
        Self::new(t_end, times)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return Err(Error::InvalidArgument(format!("safety {} outside (0, 1]", self.safety)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "t_end {} must be finite and >= 0",
                self.t_end
            )));
        }
        if self.output_times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "output times must be strictly increasing".into(),
            ));
        }
        if let Some(t) = self.output_times.iter().find(|t| !(**t >= 0.0 && **t <= self.t_end)) {
            return Err(Error::InvalidArgument(format!(
                "output time {t} outside [0, {}]",
                self.t_end
            )));
        }
        Ok(())
    }
}

/// Per-step diagnostics of an integration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepStats {
    pub dt: Vec<f64>,
    pub max_curvature: Vec<f64>,
}

/// Snapshots of a flow at the requested output times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<AxisymMetric>,
    pub step_stats: StepStats,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(AxisymMetric::time).collect()
    }
}

/// Integrates from `m0` (flow time 0, area `4π`) to `p.t_end`, landing exactly
/// on every output time.
pub fn evolve(m0: &AxisymMetric, p: &FlowParams) -> Result<Trajectory> {
    evolve_with(rhs, m0, p)
}

pub fn evolve_with(f: RhsFn, m0: &AxisymMetric, p: &FlowParams) -> Result<Trajectory> {
    p.validate()?;
    let area = m0.total_area();
    if (area - 4.0 * PI).abs() > 1e-8 * 4.0 * PI {
        return Err(Error::InvalidArgument(format!(
            "initial metric has area {area}, normalize to 4π first"
        )));
    }
    let mut m = m0.clone().with_time(0.0);
    let mut t = 0.0;
    let mut snapshots = Vec::with_capacity(p.output_times.len());
    let mut stats = StepStats::default();
    let targets = p
        .output_times
        .iter()
        .map(|&t| (t, true))
        .chain(std::iter::once((p.t_end, false)));
    for (target, record) in targets {
        while target - t > 1e-13 * target.abs().max(1.0) {
            let remaining = target - t;
            let limit = stability_dt(&m, p.safety);
            let (dt, lands) = if limit >= remaining {
                (remaining, true)
            } else {
                (limit, false)
            };
            let next = step_with(f, &m, dt, p.renormalize_each_step)?;
            t = if lands { target } else { t + dt };
            let next = next.with_time(t);
            let k = next
                .gauss_curvature()
                .map_err(|_| blowup(&m, "non-finite curvature".into()))?;
            let kmax = k.max();
            if !(kmax <= BLOWUP_CURVATURE) {
                return Err(blowup(&m, format!("max K = {kmax:e} exceeds {BLOWUP_CURVATURE:e}")));
            }
            stats.dt.push(dt);
            stats.max_curvature.push(kmax);
            m = next;
        }
        t = target.max(t);
        m = m.with_time(t);
        if record {
            snapshots.push(m.clone());
        }
    }
    Ok(Trajectory {
        snapshots,
        step_stats: stats,
    })
}
