use std::f64::consts::PI;

use proptest::prelude::*;

use sphere_ricci::comparison::{comparison_xi_grid, monitor, solve_t0, MonitorOptions};
use sphere_ricci::flow::{evolve, FlowParams};
use sphere_ricci::profile::{asymptotic_sup_curvature, build_profile, fit_window_samples, CapGeometry};
use sphere_ricci::rosenau::{curvature_bound, profile_at, profile_ratio, RosenauState};
use sphere_ricci::{AxisymMetric, ColatitudeGrid};

fn grid(n: usize) -> ColatitudeGrid {
    ColatitudeGrid::new(n).unwrap()
}

fn modes() -> impl Strategy<Value = Vec<(u32, f64)>> {
    prop::collection::vec((prop::sample::select(vec![2u32, 4, 6]), -0.15f64..0.15), 1..4)
}

fn sizes() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![32usize, 48, 64])
}

fn metric(n: usize, modes: &[(u32, f64)]) -> AxisymMetric {
    AxisymMetric::fourier(grid(n), modes).unwrap().normalize()
}

/// `sinh z / z` by its Taylor series; every term is positive, so the sum has
/// full relative precision for the small arguments used here.
fn sinhc(z: f64) -> f64 {
    let z2 = z * z;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..30 {
        term *= z2 / ((2 * k) as f64 * (2 * k + 1) as f64);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn total_curvature_is_four_pi(n in sizes(), m in modes()) {
        let tc = metric(n, &m).total_curvature().unwrap();
        prop_assert!((tc - 4.0 * PI).abs() < 1e-11, "{tc}");
    }

    #[test]
    fn constant_factor_has_constant_curvature(n in sizes(), c in -1.0f64..1.0) {
        let m = AxisymMetric::new(grid(n), vec![c; n + 1], 0.0).unwrap();
        let k = m.gauss_curvature().unwrap();
        let expected = (-2.0 * c).exp();
        for v in k.values() {
            prop_assert!((v - expected).abs() <= 4.0 * f64::EPSILON * expected);
        }
    }

    #[test]
    fn curvature_commutes_with_reflection(n in sizes(), a in -0.3f64..0.3, b in -0.3f64..0.3) {
        let m = AxisymMetric::from_fn(grid(n), |p| a * p.cos() + b * (2.0 * p).cos(), 0.0).unwrap();
        let k = m.gauss_curvature().unwrap();
        let kr = m.reflect().gauss_curvature().unwrap();
        for (x, y) in k.values().iter().rev().zip(kr.values()) {
            prop_assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
    }

    #[test]
    fn inversion_undoes_cap_area(n in sizes(), m in modes(), s in 0.0f64..1.0) {
        let m = metric(n, &m);
        let h = m.grid().spacing();
        let psi = h + s * (PI - 2.0 * h);
        let cg = CapGeometry::new(&m).unwrap();
        let xi = cg.area(psi) / cg.total_area();
        let back = cg.invert_area(xi).unwrap();
        prop_assert!((back - psi).abs() < 1e-10, "{psi} -> {back}");
    }

    #[test]
    fn symmetric_metrics_have_symmetric_profiles(n in sizes(), m in modes(), xi in 0.01f64..0.49) {
        let p = build_profile(&metric(n, &m), &[xi, 1.0 - xi]).unwrap();
        prop_assert!((p.values()[0] - p.values()[1]).abs() < 1e-10);
    }

    #[test]
    fn positive_curvature_gives_concave_profile(n in sizes(), m in modes()) {
        let m = metric(n, &m);
        prop_assume!(m.gauss_curvature().unwrap().min() > 0.0);
        let p = build_profile(&m, &comparison_xi_grid()).unwrap();
        prop_assert!(p.d2().iter().all(|d| *d < 0.0));
    }

    #[test]
    fn rosenau_profile_increases_in_time(xi in 0.001f64..0.999, t in -3.0f64..3.0, dt in 0.01f64..1.0) {
        prop_assert!(profile_at(xi, t + dt) > profile_at(xi, t));
    }

    #[test]
    fn rosenau_profile_is_symmetric(k in 1u32..1024, t in -3.0f64..5.0) {
        // Dyadic fractions, so that 1 - ξ is exact.
        let xi = k as f64 / 1024.0;
        prop_assert_eq!(profile_at(xi, t), profile_at(1.0 - xi, t));
    }

    #[test]
    fn rosenau_sup_curvature_is_the_bound(t in -2.0f64..4.0) {
        let s = RosenauState::at_time(t);
        // The supremum sits at the poles, x = ±∞.
        let sup = (0..=800)
            .map(|i| s.curvature(-40.0 + 0.1 * i as f64))
            .chain([s.curvature(f64::INFINITY), s.curvature(f64::NEG_INFINITY)])
            .fold(f64::MIN, f64::max);
        let bound = curvature_bound(t, 0.0);
        prop_assert!((sup - bound).abs() <= 1e-12 * bound, "{sup} vs {bound}");
        prop_assert!(s.curvature(0.0) <= sup);
    }

    #[test]
    fn profile_ratio_is_stable_for_small_h(xi in 0.001f64..0.999, e in -8.0f64..-1.0) {
        let h = 10f64.powf(e);
        let eta = 1.0 - xi;
        let oracle = xi * eta * sinhc(xi * h) * sinhc(eta * h) / sinhc(h);
        let got = profile_ratio(xi, h);
        prop_assert!(((got - oracle) / oracle).abs() < 1e-10, "{got} vs {oracle}");
    }

    #[test]
    fn t0_of_a_translated_model_is_the_translation(tau in -1.0f64..2.0) {
        let p = RosenauState::at_time(tau).tabulate_profile(&comparison_xi_grid());
        prop_assert!((solve_t0(&p) - tau).abs() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn flow_invariants(m in modes()) {
        // Make the initial samples exactly symmetric.
        let raw = metric(32, &m);
        let u: Vec<f64> = (0..=32).map(|i| raw.u()[i.min(32 - i)]).collect();
        let m0 = AxisymMetric::new(grid(32), u, 0.0).unwrap().normalize();
        let min_k0 = m0.gauss_curvature().unwrap().min();
        let traj = evolve(&m0, &FlowParams::uniform(0.2, 4)).unwrap();
        for s in &traj.snapshots {
            prop_assert!((s.total_area() - 4.0 * PI).abs() <= 1e-10);
            let k = s.gauss_curvature().unwrap();
            if min_k0 > 0.0 {
                prop_assert!(k.min() > -1e-8);
            }
            if s.time() > 0.0 {
                prop_assert!(k.min() >= -1.0 / s.time().exp_m1() - 1e-6);
            }
            let u = s.u();
            for i in 0..u.len() {
                prop_assert_eq!(u[i], u[u.len() - 1 - i]);
            }
        }
    }

    #[test]
    fn bound_dominates_initial_curvature(m in modes()) {
        let m0 = metric(64, &m);
        let t0 = solve_t0(&build_profile(&m0, &comparison_xi_grid()).unwrap());
        let max_k = m0.gauss_curvature().unwrap().max();
        prop_assert!(max_k <= curvature_bound(0.0, t0) * (1.0 + 1e-3), "{max_k} vs t0 = {t0}");
    }

    #[test]
    fn reports_are_deterministic(m in modes()) {
        let m0 = metric(32, &m);
        let traj = evolve(&m0, &FlowParams::uniform(0.1, 2)).unwrap();
        let t0 = solve_t0(&build_profile(&m0, &comparison_xi_grid()).unwrap());
        let a = serde_json::to_string(&monitor(&traj, t0, &MonitorOptions::default()).unwrap()).unwrap();
        let b = serde_json::to_string(&monitor(&traj, t0, &MonitorOptions::default()).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn curvature_quadrature_converges_at_second_order() {
    let errs: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&n| (metric(n, &[(2, 0.3), (4, -0.1)]).total_curvature_quadrature().unwrap() - 4.0 * PI).abs())
        .collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.4..=4.6).contains(&ratio), "{errs:?}");
    }
}

#[test]
fn round_profile_is_reproduced() {
    let xi = comparison_xi_grid();
    let p = build_profile(&AxisymMetric::round(grid(64)), &xi).unwrap();
    for (x, v) in xi.iter().zip(p.values()) {
        assert!((v - 4.0 * PI * (x * (1.0 - x)).sqrt()).abs() < 1e-10, "{x}");
    }
}

#[test]
fn shift_covariance_along_a_flow() {
    let m0 = RosenauState::at_time(0.0).as_axisym(grid(128)).unwrap();
    let traj = evolve(&m0, &FlowParams::new(0.5, vec![0.25, 0.5])).unwrap();
    let h2 = (PI / 128.0).powi(2);
    for s in &traj.snapshots {
        let t0 = solve_t0(&build_profile(s, &comparison_xi_grid()).unwrap());
        assert!((t0 - s.time()).abs() < 2.0 * h2, "{} vs {}", t0, s.time());
    }
}

#[test]
fn asymptotic_fit_recovers_model_curvature() {
    for t in [0.0, 0.5, 1.0] {
        let s = RosenauState::at_time(t);
        let est = asymptotic_sup_curvature(&s.tabulate_profile(&fit_window_samples())).unwrap();
        approx::assert_relative_eq!(est, s.sup_curvature(), max_relative = 1e-2);
    }
}
