//! Self-check of the numerical invariants, run by `sphere-ricci verify`.
//!
//! Each check reduces to a non-negative defect that must not exceed a limit.
//! The velocity field is injectable so that a corrupted right-hand side can be
//! shown to trip the suite.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use crate::comparison::{comparison_xi_grid, monitor, solve_t0, MonitorOptions, TolerancePolicy};
use crate::error::{Error, Result};
use crate::flow::{evolve_with, rhs, FlowParams, RhsFn, Trajectory};
use crate::metric::{AxisymMetric, ColatitudeGrid};
use crate::profile::{asymptotic_sup_curvature, build_profile, fit_window_samples, CapGeometry};
use crate::rosenau::{curvature_bound, round_profile, RosenauState};

/// Grid sizes exercised by default.
pub const SIZES: [usize; 2] = [64, 128];

/// Accepted band for error ratios under halving of `Δψ`.
pub const SECOND_ORDER_BAND: (f64, f64) = (3.4, 4.6);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    /// Grid size, `None` for closed-form or cross-grid checks.
    pub n: Option<usize>,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Fixed-width pass/fail table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<28} {:>5} {:>12} {:>12}  result",
            "check", "n", "value", "limit"
        );
        for c in &self.checks {
            let n = c.n.map_or_else(|| "-".to_string(), |n| n.to_string());
            let verdict = if c.passed { "pass" } else { "FAIL" };
            let _ = write!(
                out,
                "{:<28} {:>5} {:>12.4e} {:>12.4e}  {verdict}",
                c.name, n, c.value, c.limit
            );
            if !c.note.is_empty() {
                let _ = write!(out, "  ({})", c.note);
            }
            out.push('\n');
        }
        out
    }
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    /// Records `value <= limit`; an error counts as a failure.
    fn push(&mut self, name: &'static str, n: Option<usize>, limit: f64, value: Result<f64>) {
        let (value, note) = match value {
            Ok(v) => (v, String::new()),
            Err(e) => (f64::NAN, e.to_string()),
        };
        self.checks.push(Check {
            name,
            n,
            value,
            limit,
            passed: value <= limit,
            note,
        });
    }

    fn ratio(&mut self, name: &'static str, coarse: Result<f64>, fine: Result<f64>) {
        let r = match (coarse, fine) {
            (Ok(a), Ok(b)) => Ok(a / b),
            (Err(e), _) | (_, Err(e)) => Err(e),
        };
        let (lo, hi) = SECOND_ORDER_BAND;
        let (value, note) = match r {
            Ok(v) => (v, format!("expected in [{lo}, {hi}]")),
            Err(e) => (f64::NAN, e.to_string()),
        };
        self.checks.push(Check {
            name,
            n: None,
            value,
            limit: hi,
            passed: (lo..=hi).contains(&value),
            note,
        });
    }
}

fn max_abs<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, |m, v| {
        if v.is_nan() || m.is_nan() {
            f64::NAN
        } else {
            m.max(v.abs())
        }
    })
}

fn fourier(n: usize, modes: &[(u32, f64)]) -> Result<AxisymMetric> {
    Ok(AxisymMetric::fourier(ColatitudeGrid::new(n)?, modes)?.normalize())
}

/// Interior nodes away from the poles.
fn interior(n: usize) -> std::ops::Range<usize> {
    1..n
}

struct Runs {
    n: usize,
    round: Result<Trajectory>,
    perturbed: Result<Trajectory>,
    indefinite: Result<Trajectory>,
    rosenau: Result<Trajectory>,
}

fn runs(f: RhsFn, n: usize) -> Runs {
    let go = |m: Result<AxisymMetric>, p: FlowParams| m.and_then(|m| evolve_with(f, &m, &p));
    let grid = ColatitudeGrid::new(n);
    Runs {
        n,
        round: go(
            grid.as_ref().map_err(echo).map(|g| AxisymMetric::round(g.clone())),
            FlowParams::uniform(0.5, 5),
        ),
        perturbed: go(fourier(n, &[(2, 0.1)]), FlowParams::uniform(1.0, 10)),
        indefinite: go(
            fourier(n, &[(2, 0.6)]),
            FlowParams::new(1.0, vec![0.0, 0.1, 0.2, 0.5, 1.0]),
        ),
        rosenau: go(
            grid.as_ref()
                .map_err(echo)
                .and_then(|g| RosenauState::at_time(0.0).as_axisym(g.clone())),
            FlowParams::uniform(1.0, 4),
        ),
    }
}

/// Errors are not `Clone`; shared results re-raise their message.
fn echo(e: &Error) -> Error {
    Error::InvalidArgument(e.to_string())
}

fn snapshots(t: &Result<Trajectory>) -> Result<&[AxisymMetric]> {
    t.as_ref().map(|t| t.snapshots.as_slice()).map_err(echo)
}

/// Largest profile and curvature error against the closed form along a
/// Rosenau trajectory started at `t = 0`.
fn rosenau_errors(traj: &Result<Trajectory>) -> Result<(f64, f64)> {
    let xi = comparison_xi_grid();
    let mut worst = (0.0f64, 0.0f64);
    for m in snapshots(traj)? {
        let model = RosenauState::at_time(m.time());
        let p = build_profile(m, &xi)?;
        let pe = max_abs(xi.iter().zip(p.values()).map(|(&x, v)| v - model.profile(x)));
        let k = m.gauss_curvature()?;
        let ke = max_abs(
            m.grid()
                .nodes()
                .iter()
                .zip(k.values())
                .map(|(&psi, kv)| kv - model.curvature(2.0 * (0.5 * psi).tan().ln())),
        );
        worst = (worst.0.max(pe), worst.1.max(ke));
    }
    Ok(worst)
}

/// Relative defect of `φ'' = -((4π)²K + φ'²)/φ` at the interior nodes, with
/// `K` from the grid and `φ''` from the spline.
fn concavity_defect(m: &AxisymMetric) -> Result<f64> {
    let cg = CapGeometry::new(m)?;
    let k = m.gauss_curvature()?;
    let n = m.grid().intervals();
    Ok(max_abs(interior(n).map(|i| {
        let (p, d1, d2) = cg.profile_at_angle(m.grid().psi(i));
        let model = -((4.0 * PI).powi(2) * k.values()[i] + d1 * d1) / p;
        (d2 - model) / model
    })))
}

fn variation_defect(m: &AxisymMetric) -> Result<f64> {
    let cg = CapGeometry::new(m)?;
    let n = m.grid().intervals();
    let mut worst = 0.0f64;
    for i in interior(n) {
        let r = cg.variation_check(m.grid().psi(i))?;
        worst = worst.max(r.area_rate.abs()).max(r.length_rate.abs());
    }
    Ok(worst)
}

fn geodesic_defect(m: &AxisymMetric) -> Result<f64> {
    let cg = CapGeometry::new(m)?;
    let n = m.grid().intervals();
    Ok(max_abs(interior(n).map(|i| {
        let psi = m.grid().psi(i);
        cg.geodesic_curvature(psi) - cg.profile_at_angle(psi).1 / (4.0 * PI)
    })))
}

/// Runs every check with the velocity field `f` on the grids `sizes`.
pub fn run_suite(f: RhsFn, sizes: &[usize]) -> VerifyReport {
    let mut s = Suite { checks: Vec::new() };
    let policy = TolerancePolicy::DEFAULT;
    let all: Vec<Runs> = sizes.iter().map(|&n| runs(f, n)).collect();
    let mut rates: Vec<(Result<f64>, Result<f64>, Result<f64>)> = Vec::new();

    for r in &all {
        let n = Some(r.n);
        let h = std::f64::consts::PI / r.n as f64;
        let h2 = h * h;

        let round = ColatitudeGrid::new(r.n).map(AxisymMetric::round);
        s.push(
            "velocity_round",
            n,
            1e-12,
            round.as_ref().map_err(echo).and_then(|m| Ok(max_abs(f(m)?))),
        );
        let ros0 = ColatitudeGrid::new(r.n).and_then(|g| RosenauState::at_time(0.0).as_axisym(g));
        s.push(
            "velocity_rosenau",
            n,
            policy.curvature(h),
            ros0.as_ref().map_err(echo).and_then(|m| {
                let v = f(m)?;
                let model = RosenauState::at_time(0.0);
                Ok(max_abs(
                    m.grid()
                        .nodes()
                        .iter()
                        .zip(&v)
                        .map(|(&p, v)| v - model.sphere_log_rate(p)),
                ))
            }),
        );

        s.push(
            "round_fixed_point",
            n,
            1e-8,
            snapshots(&r.round).map(|ms| ms.iter().map(AxisymMetric::max_abs_u).fold(0.0, f64::max)),
        );
        s.push(
            "area_renormalized",
            n,
            1e-10,
            snapshots(&r.perturbed).map(|ms| max_abs(ms.iter().map(|m| m.total_area() - 4.0 * PI))),
        );
        s.push(
            "gauss_bonnet",
            n,
            1e-6,
            snapshots(&r.perturbed).and_then(|ms| {
                ms.iter()
                    .chain(snapshots(&r.indefinite)?)
                    .map(|m| Ok(m.total_curvature()? - 4.0 * PI))
                    .collect::<Result<Vec<_>>>()
                    .map(max_abs)
            }),
        );
        s.push(
            "positivity",
            n,
            1e-8,
            snapshots(&r.perturbed).and_then(|ms| {
                ms.iter()
                    .map(|m| Ok(-m.gauss_curvature()?.min()))
                    .collect::<Result<Vec<_>>>()
                    .map(|v| v.into_iter().fold(f64::NEG_INFINITY, f64::max))
            }),
        );
        s.push(
            "reflection_symmetry",
            n,
            1e-12,
            snapshots(&r.perturbed).map(|ms| {
                max_abs(ms.iter().flat_map(|m| {
                    let u = m.u();
                    (0..u.len()).map(move |i| u[i] - u[u.len() - 1 - i])
                }))
            }),
        );
        s.push(
            "lower_barrier",
            n,
            1e-6,
            snapshots(&r.indefinite).and_then(|ms| {
                let mut worst = f64::NEG_INFINITY;
                for m in ms.iter().filter(|m| m.time() > 0.0) {
                    let barrier = -1.0 / m.time().exp_m1();
                    worst = worst.max(barrier - m.gauss_curvature()?.min());
                }
                Ok(worst)
            }),
        );

        let ros = rosenau_errors(&r.rosenau);
        s.push(
            "rosenau_profile",
            n,
            policy.profile(h),
            ros.as_ref().map(|e| e.0).map_err(echo),
        );
        s.push(
            "rosenau_curvature",
            n,
            policy.curvature(h),
            ros.as_ref().map(|e| e.1).map_err(echo),
        );

        let xi = comparison_xi_grid();
        s.push(
            "round_profile",
            n,
            1e-10,
            round.as_ref().map_err(echo).and_then(|m| {
                let p = build_profile(m, &xi)?;
                Ok(max_abs(xi.iter().zip(p.values()).map(|(&x, v)| v - round_profile(x))))
            }),
        );
        let pert = fourier(r.n, &[(2, 0.1)]);
        s.push(
            "area_inversion",
            n,
            1e-10,
            pert.as_ref().map_err(echo).and_then(|m| {
                let cg = CapGeometry::new(m)?;
                let total = cg.total_area();
                let mut worst = 0.0f64;
                for i in 1..r.n {
                    let psi = m.grid().psi(i);
                    worst = worst.max((cg.invert_area(cg.area(psi) / total)? - psi).abs());
                }
                Ok(worst)
            }),
        );
        s.push(
            "profile_symmetry",
            n,
            1e-10,
            pert.as_ref().map_err(echo).and_then(|m| {
                let p = build_profile(m, &xi)?;
                let v = p.values();
                Ok(max_abs((0..v.len()).map(|i| v[i] - v[v.len() - 1 - i])))
            }),
        );
        s.push(
            "concavity_sign",
            n,
            0.0,
            pert.as_ref().map_err(echo).and_then(|m| {
                let p = build_profile(m, &xi)?;
                Ok(p.d2().iter().filter(|&&d| !(d < 0.0)).count() as f64)
            }),
        );
        let conc = pert.as_ref().map_err(echo).and_then(concavity_defect);
        s.push("concavity_identity", n, 2.5 * h2, conc.as_ref().copied().map_err(echo));
        let var = pert.as_ref().map_err(echo).and_then(variation_defect);
        s.push("cap_variation", n, 12.0 * h2, var.as_ref().copied().map_err(echo));
        s.push(
            "geodesic_curvature",
            n,
            1e-6,
            round.as_ref().map_err(echo).and_then(geodesic_defect),
        );
        s.push(
            "geodesic_curvature_perturbed",
            n,
            1e-4,
            pert.as_ref().map_err(echo).and_then(geodesic_defect),
        );
        s.push(
            "ritore",
            n,
            0.0,
            (|| {
                let g = ColatitudeGrid::new(r.n)?;
                let good = RosenauState::at_time(0.0)
                    .as_axisym(g.clone())?
                    .ritore_criterion()?
                    .certified;
                let bad = AxisymMetric::fourier(g, &[(4, 0.5)])?
                    .normalize()
                    .ritore_criterion()?
                    .certified;
                Ok(f64::from(u8::from(!good) + u8::from(bad)))
            })(),
        );
        s.push(
            "normalize_idempotent",
            n,
            4.0 * f64::EPSILON,
            pert.as_ref()
                .map_err(echo)
                .map(|m| max_abs(m.u().iter().zip(m.clone().normalize().u()).map(|(a, b)| a - b))),
        );

        s.push(
            "initial_bound_dominates",
            n,
            1e-3,
            pert.as_ref().map_err(echo).and_then(|m| {
                let t0 = solve_t0(&build_profile(m, &xi)?);
                let max_k = m.gauss_curvature()?.max();
                Ok((max_k - curvature_bound(0.0, t0)) / max_k)
            }),
        );
        s.push(
            "t0_shift_covariance",
            n,
            2.0 * h2,
            snapshots(&r.rosenau).and_then(|ms| {
                let m = ms
                    .iter()
                    .find(|m| m.time() == 0.5)
                    .ok_or_else(|| Error::InvalidArgument("no snapshot at t = 0.5".into()))?;
                Ok((solve_t0(&build_profile(m, &xi)?) - 0.5).abs())
            }),
        );
        s.push(
            "monitors_perturbed",
            n,
            0.0,
            r.perturbed.as_ref().map_err(echo).and_then(|traj| {
                let t0 = solve_t0(&build_profile(&traj.snapshots[0], &xi)?);
                let opts = MonitorOptions::default();
                let a = monitor(traj, t0, &opts)?;
                let b = monitor(traj, t0, &opts)?;
                let same = serde_json::to_string(&a)? == serde_json::to_string(&b)?;
                Ok(f64::from(u8::from(!a.passed()) + u8::from(!same)))
            }),
        );

        rates.push((ros.map(|e| e.0), conc, var));
    }

    for w in rates.windows(2) {
        let clone = |r: &Result<f64>| r.as_ref().copied().map_err(echo);
        s.ratio("rosenau_profile_order", clone(&w[0].0), clone(&w[1].0));
        s.ratio("concavity_identity_order", clone(&w[0].1), clone(&w[1].1));
        s.ratio("cap_variation_order", clone(&w[0].2), clone(&w[1].2));
    }

    closed_form_checks(&mut s);
    VerifyReport { checks: s.checks }
}

fn closed_form_checks(s: &mut Suite) {
    let mut worst = 0.0f64;
    for i in 0..=20 {
        let t = 3.0 * i as f64 / 20.0;
        let state = RosenauState::at_time(t);
        for j in 1..=49 {
            let xi = j as f64 / 50.0;
            worst = worst.max(state.profile_jet(xi).equality_residual(xi).abs());
        }
    }
    s.push("rosenau_equality_residual", None, 1e-9, Ok(worst));

    let xi = comparison_xi_grid();
    s.push(
        "t0_rosenau",
        None,
        1e-6,
        Ok(max_abs([-0.5, 0.0, 0.8].iter().map(|&t| {
            solve_t0(&RosenauState::at_time(t).tabulate_profile(&xi)) - t
        }))),
    );
    s.push(
        "asymptotic_sup_curvature",
        None,
        1e-2,
        [0.0, 0.5, 1.0]
            .iter()
            .map(|&t| {
                let state = RosenauState::at_time(t);
                let est = asymptotic_sup_curvature(&state.tabulate_profile(&fit_window_samples()))?;
                Ok(((est - state.sup_curvature()) / state.sup_curvature()).abs())
            })
            .collect::<Result<Vec<_>>>()
            .map(max_abs),
    );
}

/// The default suite with the true velocity field.
pub fn run_default() -> VerifyReport {
    run_suite(rhs, &SIZES)
}
