//! Comparison of flow profiles against the time-shifted Rosenau model and the
//! curvature monitors that follow from it.
//!
//! `t0 = +∞` stands for the round-sphere model (bound `K ≤ 1`).

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::flow::Trajectory;
use crate::metric::AxisymMetric;
use crate::profile::{asymptotic_sup_curvature, build_profile, log_spaced, IsoperimetricProfile};
use crate::roots::bisect_increasing;
use crate::rosenau::{self, curvature_bound, round_profile, x_coth_x};

/// Bisection stopping width for crossing times.
const TIME_TOL: f64 = 1e-13;

/// Relative distance from the round sphere (profile deficit, or excess of
/// `sup K` over 1) below which data counts as round. Rounding alone is around
/// `1e-14` and would otherwise produce a spurious finite offset near `t = 6`.
pub const ROUND_SLACK: f64 = 1e-12;

/// Time at which the Rosenau profile at `xi` reaches `value`; `+∞` when the
/// value is at least the round-sphere profile.
pub fn crossing_time(value: f64, xi: f64) -> f64 {
    if value >= round_profile(xi) * (1.0 - ROUND_SLACK) {
        return f64::INFINITY;
    }
    let profile = |t: f64| rosenau::profile_at(xi, t);
    let mut lo = -1.0;
    while profile(lo) > value && lo > -340.0 {
        lo *= 2.0;
    }
    let mut hi = 1.0;
    while profile(hi) < value {
        hi *= 2.0;
        if hi > 1024.0 {
            return f64::INFINITY;
        }
    }
    bisect_increasing(profile, lo, hi, value, TIME_TOL)
}

/// Solves `e^{-2t} coth(e^{-2t}) = sup_k`; `+∞` when `sup_k` is within
/// [`ROUND_SLACK`] of 1.
pub fn endpoint_time(sup_k: f64) -> f64 {
    if !(sup_k > 1.0 + ROUND_SLACK) {
        return f64::INFINITY;
    }
    // x coth x is increasing with x coth x >= x.
    let x = bisect_increasing(x_coth_x, 0.0, sup_k + 1.0, sup_k, 0.0);
    if x == 0.0 {
        f64::INFINITY
    } else {
        -0.5 * x.ln()
    }
}

/// Largest shift `t0` with `profile >= φ_Rosenau(·, t0)`: the infimum of the
/// crossing times over the samples and of the small-area endpoint condition.
pub fn solve_t0(p: &IsoperimetricProfile) -> f64 {
    let sup_k = p.sup_curvature().or_else(|| asymptotic_sup_curvature(p).ok());
    let endpoint = sup_k.map_or(f64::INFINITY, endpoint_time);
    p.xi()
        .iter()
        .zip(p.values())
        .map(|(&xi, &v)| crossing_time(v, xi))
        .fold(endpoint, f64::min)
}

/// 200 area fractions: 50 log-spaced on each side of `[0.05, 0.95]`, 100 linear
/// in between.
pub fn comparison_xi_grid() -> Vec<f64> {
    let low = log_spaced(1e-3, 0.05, 51);
    let mut xi: Vec<f64> = low[..50].to_vec();
    xi.extend((0..100).map(|i| 0.05 + 0.9 * i as f64 / 99.0));
    xi.extend(low[..50].iter().rev().map(|x| 1.0 - x));
    xi
}

/// `∫ |K - 1| dμ`.
pub fn l1_deviation(m: &AxisymMetric) -> Result<f64> {
    let k = m.gauss_curvature()?;
    let integrand: Vec<f64> = k
        .values()
        .iter()
        .zip(m.u())
        .map(|(k, u)| (k - 1.0).abs() * (2.0 * u).exp())
        .collect();
    Ok(m.grid().sphere_integral(&integrand))
}

/// Slack for the inequality monitors: `c1·Δψ² + c2·10⁻⁹`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TolerancePolicy {
    pub profile_c1: f64,
    pub curvature_c1: f64,
    pub c2: f64,
}

impl TolerancePolicy {
    /// Five times the worst error per `Δψ²` measured by [`calibrate`] on the
    /// Rosenau trajectory from `t = 0` to `3`, 30 snapshots, `n ∈ {64, 128, 256}`:
    /// profile 0.0680, curvature 0.3443.
    pub const DEFAULT: Self = Self {
        profile_c1: 0.34,
        curvature_c1: 1.72,
        c2: 1.0,
    };

    pub fn profile(&self, spacing: f64) -> f64 {
        self.profile_c1 * spacing * spacing + self.c2 * 1e-9
    }

    pub fn curvature(&self, spacing: f64) -> f64 {
        self.curvature_c1 * spacing * spacing + self.c2 * 1e-9
    }
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Worst observed profile and curvature errors per `Δψ²` on a Rosenau
/// trajectory, one entry per grid size.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub intervals: Vec<usize>,
    pub profile_error: Vec<f64>,
    pub curvature_error: Vec<f64>,
}

impl Calibration {
    pub fn profile_constant(&self) -> f64 {
        self.scaled(&self.profile_error)
    }

    pub fn curvature_constant(&self) -> f64 {
        self.scaled(&self.curvature_error)
    }

    fn scaled(&self, errs: &[f64]) -> f64 {
        self.intervals
            .iter()
            .zip(errs)
            .map(|(&n, e)| e / (PI / n as f64).powi(2))
            .fold(0.0, f64::max)
    }

    /// Policy with `factor` times the measured constants.
    pub fn policy(&self, factor: f64) -> TolerancePolicy {
        TolerancePolicy {
            profile_c1: factor * self.profile_constant(),
            curvature_c1: factor * self.curvature_constant(),
            c2: 1.0,
        }
    }
}

/// Measures the scheme error against the Rosenau closed forms.
pub fn calibrate(intervals: &[usize], t_end: f64, snapshots: usize) -> Result<Calibration> {
    use crate::flow::{evolve, FlowParams};
    use crate::metric::ColatitudeGrid;
    use crate::rosenau::RosenauState;

    let xi = comparison_xi_grid();
    let mut profile_error = Vec::new();
    let mut curvature_error = Vec::new();
    for &n in intervals {
        let grid = ColatitudeGrid::new(n)?;
        let m0 = RosenauState::at_time(0.0).as_axisym(grid)?;
        let traj = evolve(&m0, &FlowParams::uniform(t_end, snapshots))?;
        let errs: Vec<(f64, f64)> = traj
            .snapshots
            .par_iter()
            .map(|m| -> Result<(f64, f64)> {
                let model = RosenauState::at_time(m.time());
                let p = build_profile(m, &xi)?;
                let pe = xi
                    .iter()
                    .zip(p.values())
                    .map(|(&x, &v)| (v - model.profile(x)).abs())
                    .fold(0.0, f64::max);
                let k = m.gauss_curvature()?;
                let ke = m
                    .grid()
                    .nodes()
                    .iter()
                    .zip(k.values())
                    .map(|(&psi, &kv)| {
                        let x = 2.0 * (0.5 * psi).tan().ln();
                        let exact = model.curvature(x);
                        (kv - exact).abs()
                    })
                    .fold(0.0, f64::max);
                Ok((pe, ke))
            })
            .collect::<Result<_>>()?;
        profile_error.push(errs.iter().map(|e| e.0).fold(0.0, f64::max));
        curvature_error.push(errs.iter().map(|e| e.1).fold(0.0, f64::max));
    }
    Ok(Calibration {
        intervals: intervals.to_vec(),
        profile_error,
        curvature_error,
    })
}

/// Outcome of one monitor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    /// Negative margin on an uncertified profile: `φ_u` only bounds the true
    /// profile from above, so nothing is learned.
    Warn,
    Fail,
    /// Not applicable at this snapshot.
    Skip,
}

impl Verdict {
    fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Warn, _) | (_, Warn) => Warn,
            (Pass, _) | (_, Pass) => Pass,
            _ => Skip,
        }
    }
}

/// Thresholds for the monitors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorOptions {
    #[serde(skip)]
    pub xi: Vec<f64>,
    pub tolerance: TolerancePolicy,
    /// Decay inequality is asserted from this time on.
    pub decay_from: f64,
    /// Relative slack on the decay bound.
    pub decay_slack: f64,
    /// Absolute slack on the lower curvature barrier.
    pub barrier_slack: f64,
    pub gauss_bonnet_tol: f64,
}

impl Default for MonitorOptions {
    fn default() -> Self {
        Self {
            xi: comparison_xi_grid(),
            tolerance: TolerancePolicy::DEFAULT,
            decay_from: 0.5,
            decay_slack: 1e-3,
            barrier_slack: 1e-6,
            gauss_bonnet_tol: 1e-6,
        }
    }
}

/// Per-monitor verdicts at one snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdicts {
    /// `min_ξ (φ_u - φ_model) >= -tol`.
    pub profile: Verdict,
    /// `min_ξ (φ_u - φ_model) >= (initial minimum) - tol`.
    pub profile_floor: Verdict,
    /// `max K <= bound + tol`.
    pub curvature_bound: Verdict,
    /// `∫|K-1| dμ <= 4π e^{-4(t+t0)} (1 + slack) + c2·10⁻⁹`.
    pub decay: Verdict,
    /// `min K >= -1/(e^t - 1) - slack`.
    pub lower_barrier: Verdict,
    /// `|∫K dμ - 4π| <= tol`.
    pub gauss_bonnet: Verdict,
}

impl Verdicts {
    pub fn iter(&self) -> [(&'static str, Verdict); 6] {
        [
            ("profile", self.profile),
            ("profile_floor", self.profile_floor),
            ("curvature_bound", self.curvature_bound),
            ("decay", self.decay),
            ("lower_barrier", self.lower_barrier),
            ("gauss_bonnet", self.gauss_bonnet),
        ]
    }

    fn combine(self, o: Verdicts) -> Verdicts {
        Verdicts {
            profile: self.profile.combine(o.profile),
            profile_floor: self.profile_floor.combine(o.profile_floor),
            curvature_bound: self.curvature_bound.combine(o.curvature_bound),
            decay: self.decay.combine(o.decay),
            lower_barrier: self.lower_barrier.combine(o.lower_barrier),
            gauss_bonnet: self.gauss_bonnet.combine(o.gauss_bonnet),
        }
    }

    fn all_skip() -> Verdicts {
        Verdicts {
            profile: Verdict::Skip,
            profile_floor: Verdict::Skip,
            curvature_bound: Verdict::Skip,
            decay: Verdict::Skip,
            lower_barrier: Verdict::Skip,
            gauss_bonnet: Verdict::Skip,
        }
    }
}

pub(crate) fn serialize_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// Monitored quantities at one snapshot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotRecord {
    pub t: f64,
    pub max_k: f64,
    pub min_k: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub bound: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub bound_margin: f64,
    pub area: f64,
    pub total_curvature: f64,
    pub l1_dev: f64,
    pub l1_bound: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub lower_barrier: f64,
    pub min_profile_margin: f64,
    pub argmin_xi: f64,
    pub certified: bool,
    pub sup_dk: f64,
    pub profile_tolerance: f64,
    pub curvature_tolerance: f64,
    pub verdicts: Verdicts,
    #[serde(skip)]
    pub profile: Vec<f64>,
    #[serde(skip)]
    pub model: Vec<f64>,
}

impl SnapshotRecord {
    pub fn margins(&self) -> impl Iterator<Item = f64> + '_ {
        self.profile.iter().zip(&self.model).map(|(p, m)| p - m)
    }
}

/// First failing monitor in time order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub monitor: &'static str,
    pub index: usize,
    pub t: f64,
}

/// Monitors evaluated along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    #[serde(serialize_with = "serialize_extended")]
    pub t0: f64,
    pub intervals: usize,
    pub options: MonitorOptions,
    #[serde(skip)]
    pub xi: Vec<f64>,
    pub summary: Verdicts,
    pub first_failure: Option<Failure>,
    pub records: Vec<SnapshotRecord>,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

fn record_snapshot(m: &AxisymMetric, t0: f64, opts: &MonitorOptions) -> Result<SnapshotRecord> {
    let t = m.time();
    let h = m.grid().spacing();
    let k = m.gauss_curvature()?;
    let profile = build_profile(m, &opts.xi)?;
    let model_t = t + t0;
    let model: Vec<f64> = opts.xi.iter().map(|&x| rosenau::profile_at(x, model_t)).collect();
    let (min_margin, argmin) = profile
        .values()
        .iter()
        .zip(&model)
        .zip(&opts.xi)
        .map(|((p, q), &x)| (p - q, x))
        .fold((f64::INFINITY, f64::NAN), |acc, v| if v.0 < acc.0 { v } else { acc });
    let bound = curvature_bound(t, t0);
    let max_k = k.max();
    let min_k = k.min();
    let l1_bound = if model_t == f64::INFINITY {
        0.0
    } else {
        4.0 * PI * (-4.0 * model_t).exp()
    };
    let lower_barrier = if t > 0.0 { -1.0 / t.exp_m1() } else { f64::NEG_INFINITY };
    let total_curvature = m.total_curvature()?;
    let l1_dev = l1_deviation(m)?;
    let certified = profile.is_certified();
    let profile_tol = opts.tolerance.profile(h);
    let curvature_tol = opts.tolerance.curvature(h);

    let check = |ok: bool| if ok { Verdict::Pass } else { Verdict::Fail };
    let profile_verdict = if min_margin >= -profile_tol {
        Verdict::Pass
    } else if certified {
        Verdict::Fail
    } else {
        Verdict::Warn
    };
    let verdicts = Verdicts {
        profile: profile_verdict,
        profile_floor: Verdict::Skip,
        curvature_bound: check(max_k <= bound + curvature_tol),
        decay: if t >= opts.decay_from {
            check(l1_dev <= l1_bound * (1.0 + opts.decay_slack) + opts.tolerance.c2 * 1e-9)
        } else {
            Verdict::Skip
        },
        lower_barrier: if t > 0.0 {
            check(min_k >= lower_barrier - opts.barrier_slack)
        } else {
            Verdict::Skip
        },
        gauss_bonnet: check((total_curvature - 4.0 * PI).abs() <= opts.gauss_bonnet_tol),
    };
    Ok(SnapshotRecord {
        t,
        max_k,
        min_k,
        bound,
        bound_margin: bound - max_k,
        area: m.total_area(),
        total_curvature,
        l1_dev,
        l1_bound,
        lower_barrier,
        min_profile_margin: min_margin,
        argmin_xi: argmin,
        certified,
        sup_dk: k.sup_abs_derivative(),
        profile_tolerance: profile_tol,
        curvature_tolerance: curvature_tol,
        verdicts,
        profile: profile.values().to_vec(),
        model,
    })
}

/// Evaluates every monitor on every snapshot of `traj` against the Rosenau
/// model shifted by `t0`.
pub fn monitor(traj: &Trajectory, t0: f64, opts: &MonitorOptions) -> Result<ComparisonReport> {
    let mut records: Vec<SnapshotRecord> = traj
        .snapshots
        .par_iter()
        .map(|m| record_snapshot(m, t0, opts))
        .collect::<Result<_>>()?;

    if let Some(first) = records.first() {
        let floor = first.min_profile_margin.min(0.0);
        for r in records.iter_mut() {
            r.verdicts.profile_floor = if r.min_profile_margin >= floor - r.profile_tolerance {
                Verdict::Pass
            } else if r.certified {
                Verdict::Fail
            } else {
                Verdict::Warn
            };
        }
    }

    let mut summary = Verdicts::all_skip();
    let mut first_failure = None;
    for (i, r) in records.iter().enumerate() {
        summary = summary.combine(r.verdicts);
        if first_failure.is_none() {
            if let Some((name, _)) = r.verdicts.iter().into_iter().find(|(_, v)| *v == Verdict::Fail) {
                first_failure = Some(Failure {
                    monitor: name,
                    index: i,
                    t: r.t,
                });
            }
        }
    }
    let intervals = traj.snapshots.first().map_or(0, |m| m.grid().intervals());
    Ok(ComparisonReport {
        t0,
        intervals,
        options: opts.clone(),
        xi: opts.xi.clone(),
        summary,
        first_failure,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::ColatitudeGrid;
    use crate::rosenau::RosenauState;
    use approx::assert_relative_eq;

    #[test]
    fn crossing_time_inverts_profile() {
        for xi in [0.001, 0.2, 0.5, 0.9] {
            let v = rosenau::profile_at(xi, 0.7);
            assert!((crossing_time(v, xi) - 0.7).abs() < 1e-9);
            let w = rosenau::profile_at(xi, -3.0);
            assert!((crossing_time(w, xi) + 3.0).abs() < 1e-9);
        }
        assert_eq!(crossing_time(round_profile(0.3), 0.3), f64::INFINITY);
        assert!(crossing_time(6.0405, 0.5).abs() < 1e-3);
    }

    #[test]
    fn endpoint_time_inverts_bound() {
        for t in [-1.0, 0.0, 0.4, 2.0] {
            let k = curvature_bound(t, 0.0);
            assert_relative_eq!(endpoint_time(k), t, epsilon = 1e-9);
        }
        assert_eq!(endpoint_time(1.0), f64::INFINITY);
        assert_eq!(endpoint_time(0.7), f64::INFINITY);
    }

    #[test]
    fn t0_of_closed_form_profiles() {
        let xi = comparison_xi_grid();
        for s in [-0.5, 0.0, 0.8] {
            let p = RosenauState::at_time(s).tabulate_profile(&xi);
            assert!((solve_t0(&p) - s).abs() < 1e-6, "s = {s}");
        }
        let round = AxisymMetric::round(ColatitudeGrid::new(64).unwrap());
        let p = build_profile(&round, &xi).unwrap();
        assert_eq!(solve_t0(&p), f64::INFINITY);
    }

    #[test]
    fn xi_grid_shape() {
        let xi = comparison_xi_grid();
        assert_eq!(xi.len(), 200);
        assert!(xi.windows(2).all(|w| w[1] > w[0]));
        assert_relative_eq!(xi[0], 1e-3, max_relative = 1e-12);
        assert_relative_eq!(xi[199], 1.0 - 1e-3, max_relative = 1e-12);
    }

    #[test]
    fn l1_deviation_basics() {
        let g = ColatitudeGrid::new(128).unwrap();
        assert_eq!(l1_deviation(&AxisymMetric::round(g.clone())).unwrap(), 0.0);
        let m = AxisymMetric::fourier(g, &[(2, 0.3)]).unwrap().normalize();
        let k = m.gauss_curvature().unwrap();
        let signed: Vec<f64> = k
            .values()
            .iter()
            .zip(m.u())
            .map(|(k, u)| (k - 1.0) * (2.0 * u).exp())
            .collect();
        let signed = m.grid().sphere_integral(&signed);
        assert!(l1_deviation(&m).unwrap() >= signed.abs());
    }

    #[test]
    fn rosenau_l1_decreases_in_time() {
        // Closed-form integrand on the cylinder: 4π ∫ |K - 1| U dx.
        let l1 = |t: f64| {
            let s = RosenauState::at_time(t);
            (0..240)
                .map(|k| {
                    let a = -60.0 + 0.5 * k as f64;
                    crate::quadrature::integrate(a, a + 0.5, |x| (s.curvature(x) - 1.0).abs() * s.conformal_factor(x))
                })
                .sum::<f64>()
                * 4.0
                * PI
        };
        assert!(l1(0.5) < l1(0.0));
        let g = ColatitudeGrid::new(256).unwrap();
        let m = RosenauState::at_time(0.0).as_axisym(g).unwrap();
        assert_relative_eq!(l1_deviation(&m).unwrap(), l1(0.0), max_relative = 1e-3);
    }
}
