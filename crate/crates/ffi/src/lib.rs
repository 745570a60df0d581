//! C interface to `sphere_ricci`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call returns an
//! [`SrStatus`]; on failure a description is available from
//! [`sr_last_error_message`] on the same thread. Panics are caught at the
//! boundary and reported as [`SrStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use sphere_ricci::comparison::{self, MonitorOptions};
use sphere_ricci::flow::{self, FlowParams, Trajectory};
use sphere_ricci::profile::{build_profile, IsoperimetricProfile};
use sphere_ricci::rosenau::{self, RosenauState};
use sphere_ricci::{AxisymMetric, ColatitudeGrid, Error};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Output buffer length does not match the object.
    BufferSize = 3,
    /// The flow left the admissible range.
    Blowup = 4,
    /// Any other numerical failure.
    Numerical = 5,
    Panic = 6,
}

/// A conformal factor `u` on a colatitude grid, with its flow time.
pub struct SrMetric(AxisymMetric);

/// Snapshots of a flow run.
pub struct SrTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(SrStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Blowup { .. } => SrStatus::Blowup,
            Error::InvalidGrid(_) | Error::InvalidMetric(_) | Error::InvalidArgument(_) | Error::Config { .. } => {
                SrStatus::InvalidArgument
            }
            _ => SrStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn guard<F: FnOnce() -> Outcome>(f: F) -> SrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SrStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            SrStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(SrStatus::NullPointer, format!("`{name}` is null"))
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn write<T>(p: *mut T, name: &str, value: T) -> Outcome {
    if p.is_null() {
        return Err(null(name));
    }
    p.write(value);
    Ok(())
}

unsafe fn input<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a>(p: *mut f64, len: usize, expected: usize, name: &str) -> Result<&'a mut [f64], Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    if len != expected {
        return Err(Failure(
            SrStatus::BufferSize,
            format!("`{name}` has length {len}, expected {expected}"),
        ));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sr_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Round sphere on `n` intervals (`n` even, at least 16).
///
/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn sr_metric_round(n: usize, out: *mut *mut SrMetric) -> SrStatus {
    guard(|| {
        let m = AxisymMetric::round(ColatitudeGrid::new(n)?);
        write(out, "out", boxed(SrMetric(m)))
    })
}

/// `u = Σ amplitudes[k] cos(modes[k] ψ)`, normalized to area `4π`. Modes must
/// be even.
///
/// # Safety
/// `modes` and `amplitudes` must point to `count` readable elements; `out`
/// must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn sr_metric_fourier(
    n: usize,
    modes: *const u32,
    amplitudes: *const f64,
    count: usize,
    out: *mut *mut SrMetric,
) -> SrStatus {
    guard(|| {
        let k = input(modes, count, "modes")?;
        let a = input(amplitudes, count, "amplitudes")?;
        let pairs: Vec<(u32, f64)> = k.iter().copied().zip(a.iter().copied()).collect();
        let m = AxisymMetric::fourier(ColatitudeGrid::new(n)?, &pairs)?.normalize();
        write(out, "out", boxed(SrMetric(m)))
    })
}

/// The Rosenau solution at flow time `t`, sampled on `n` intervals.
///
/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn sr_metric_rosenau(n: usize, t: f64, out: *mut *mut SrMetric) -> SrStatus {
    guard(|| {
        if !t.is_finite() {
            return Err(Failure(SrStatus::InvalidArgument, format!("t = {t} is not finite")));
        }
        let m = RosenauState::at_time(t).as_axisym(ColatitudeGrid::new(n)?)?;
        write(out, "out", boxed(SrMetric(m)))
    })
}

/// Metric from `len = n + 1` nodal samples of `u`, not normalized.
///
/// # Safety
/// `u` must point to `len` readable doubles; `out` must be valid for writing
/// a pointer.
#[no_mangle]
pub unsafe extern "C" fn sr_metric_from_samples(u: *const f64, len: usize, out: *mut *mut SrMetric) -> SrStatus {
    guard(|| {
        let u = input(u, len, "u")?;
        if len < 2 {
            return Err(Failure(SrStatus::InvalidArgument, format!("{len} samples")));
        }
        let m = AxisymMetric::new(ColatitudeGrid::new(len - 1)?, u.to_vec(), 0.0)?;
        write(out, "out", boxed(SrMetric(m)))
    })
}

/// Releases a metric; NULL is ignored.
///
/// # Safety
/// `m` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sr_metric_free(m: *mut SrMetric) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of nodes, `n + 1`.
///
/// # Safety
/// `m` must be a live handle; `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sr_metric_len(m: *const SrMetric, out: *mut usize) -> SrStatus {
    guard(|| write(out, "out", deref(m, "m")?.0.grid().len()))
}

/// # Safety
/// `m` must be a live handle; `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sr_metric_time(m: *const SrMetric, out: *mut f64) -> SrStatus {
    guard(|| write(out, "out", deref(m, "m")?.0.time()))
}

/// Copies the samples of `u` into `buf`, which must have `n + 1` entries.
///
/// # Safety
/// `m` must be a live handle; `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sr_metric_u(m: *const SrMetric, buf: *mut f64, len: usize) -> SrStatus {
    guard(|| {
        let m = &deref(m, "m")?.0;
        output(buf, len, m.grid().len(), "buf")?.copy_from_slice(m.u());
        Ok(())
    })
}

/// Gauss curvature at the nodes.
///
/// # Safety
/// `m` must be a live handle; `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sr_metric_curvature(m: *const SrMetric, buf: *mut f64, len: usize) -> SrStatus {
    guard(|| {
        let m = &deref(m, "m")?.0;
        let k = m.gauss_curvature()?;
        output(buf, len, m.grid().len(), "buf")?.copy_from_slice(k.values());
        Ok(())
    })
}

/// # Safety
/// `m` must be a live handle; `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sr_metric_total_area(m: *const SrMetric, out: *mut f64) -> SrStatus {
    guard(|| write(out, "out", deref(m, "m")?.0.total_area()))
}

/// `∫ K dμ`, equal to `4π` up to rounding.
///
/// # Safety
/// `m` must be a live handle; `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sr_metric_total_curvature(m: *const SrMetric, out: *mut f64) -> SrStatus {
    guard(|| write(out, "out", deref(m, "m")?.0.total_curvature()?))
}

/// Rescales `m` in place to area `4π`.
///
/// # Safety
/// `m` must be a live handle not aliased elsewhere during the call.
#[no_mangle]
pub unsafe extern "C" fn sr_metric_normalize(m: *mut SrMetric) -> SrStatus {
    guard(|| {
        let m = m.as_mut().ok_or_else(|| null("m"))?;
        m.0 = m.0.clone().normalize();
        Ok(())
    })
}

/// Ritoré scan: positive curvature, non-increasing from the pole to the
/// equator. `first_violation` receives the first failing node, or `SIZE_MAX`.
///
/// # Safety
/// `m` must be a live handle; the outputs valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sr_metric_ritore(
    m: *const SrMetric,
    certified: *mut bool,
    first_violation: *mut usize,
) -> SrStatus {
    guard(|| {
        let v = deref(m, "m")?.0.ritore_criterion()?;
        write(certified, "certified", v.certified)?;
        write(
            first_violation,
            "first_violation",
            v.first_violation.map_or(usize::MAX, |(i, _)| i),
        )
    })
}

/// Profile `φ` and its first two derivatives at the area fractions `xi`.
/// `d1` and `d2` may be NULL.
///
/// # Safety
/// `m` must be a live handle; `xi` readable and `value`, `d1`, `d2` (when not
/// NULL) writable for `count` doubles.
#[no_mangle]
pub unsafe extern "C" fn sr_metric_profile(
    m: *const SrMetric,
    xi: *const f64,
    count: usize,
    value: *mut f64,
    d1: *mut f64,
    d2: *mut f64,
) -> SrStatus {
    guard(|| {
        let m = &deref(m, "m")?.0;
        let xi = input(xi, count, "xi")?;
        let p = build_profile(m, xi)?;
        output(value, count, count, "value")?.copy_from_slice(p.values());
        if !d1.is_null() {
            output(d1, count, count, "d1")?.copy_from_slice(p.d1());
        }
        if !d2.is_null() {
            output(d2, count, count, "d2")?.copy_from_slice(p.d2());
        }
        Ok(())
    })
}

/// Integrates the normalized flow from `m0` (area `4π`) to `t_end`, with
/// snapshots at `times` (sorted, within `[0, t_end]`). `safety` in (0, 1].
///
/// # Safety
/// `m0` must be a live handle; `times` readable for `count` doubles; `out`
/// valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn sr_evolve(
    m0: *const SrMetric,
    t_end: f64,
    safety: f64,
    times: *const f64,
    count: usize,
    out: *mut *mut SrTrajectory,
) -> SrStatus {
    guard(|| {
        let m0 = &deref(m0, "m0")?.0;
        let mut p = FlowParams::new(t_end, input(times, count, "times")?.to_vec());
        p.safety = safety;
        let traj = flow::evolve(m0, &p)?;
        write(out, "out", boxed(SrTrajectory(traj)))
    })
}

/// Releases a trajectory; NULL is ignored.
///
/// # Safety
/// `t` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sr_trajectory_free(t: *mut SrTrajectory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `t` must be a live handle; `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sr_trajectory_len(t: *const SrTrajectory, out: *mut usize) -> SrStatus {
    guard(|| write(out, "out", deref(t, "t")?.0.snapshots.len()))
}

/// Copy of snapshot `index` as a new metric handle.
///
/// # Safety
/// `t` must be a live handle; `out` valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn sr_trajectory_snapshot(
    t: *const SrTrajectory,
    index: usize,
    out: *mut *mut SrMetric,
) -> SrStatus {
    guard(|| {
        let snaps = &deref(t, "t")?.0.snapshots;
        let m = snaps.get(index).ok_or_else(|| {
            Failure(
                SrStatus::InvalidArgument,
                format!("snapshot {index} of {}", snaps.len()),
            )
        })?;
        write(out, "out", boxed(SrMetric(m.clone())))
    })
}

/// Rosenau offset `t0` of the profile of `m`; `+∞` for round data.
///
/// # Safety
/// `m` must be a live handle; `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sr_solve_t0(m: *const SrMetric, out: *mut f64) -> SrStatus {
    guard(|| {
        let m = &deref(m, "m")?.0;
        let p = build_profile(m, &comparison::comparison_xi_grid())?;
        write(out, "out", comparison::solve_t0(&p))
    })
}

/// Rosenau offset of tabulated profile samples. `sup_curvature` may be NaN
/// when unknown, in which case it is estimated from the small-area samples.
///
/// # Safety
/// `xi` and `value` readable for `count` doubles; `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sr_solve_t0_samples(
    xi: *const f64,
    value: *const f64,
    count: usize,
    sup_curvature: f64,
    out: *mut f64,
) -> SrStatus {
    guard(|| {
        let xi = input(xi, count, "xi")?.to_vec();
        let value = input(value, count, "value")?.to_vec();
        let sup = (!sup_curvature.is_nan()).then_some(sup_curvature);
        let p = IsoperimetricProfile::from_samples(xi, value, sup)?;
        write(out, "out", comparison::solve_t0(&p))
    })
}

/// Runs the comparison monitors on `t` against the Rosenau model shifted by
/// `t0`. `passed` is true when no monitor failed. When `json` is not NULL it
/// receives the full report, to be released with [`sr_string_free`].
///
/// # Safety
/// `t` must be a live handle; `passed` valid for writing; `json` NULL or
/// valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn sr_compare(
    t: *const SrTrajectory,
    t0: f64,
    passed: *mut bool,
    json: *mut *mut c_char,
) -> SrStatus {
    guard(|| {
        let traj = &deref(t, "t")?.0;
        let report = comparison::monitor(traj, t0, &MonitorOptions::default())?;
        write(passed, "passed", report.passed())?;
        if !json.is_null() {
            let text = serde_json::to_string(&report).map_err(|e| Failure(SrStatus::Numerical, e.to_string()))?;
            let c = CString::new(text).map_err(|e| Failure(SrStatus::Numerical, e.to_string()))?;
            json.write(c.into_raw());
        }
        Ok(())
    })
}

/// Releases a string returned by this library; NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Rosenau profile `φ(ξ, t)`; `t = +∞` gives the round profile.
#[no_mangle]
pub extern "C" fn sr_rosenau_profile(xi: f64, t: f64) -> f64 {
    rosenau::profile_at(xi, t)
}

/// Curvature bound `x coth x` at `x = e^{-2(t+t0)}`.
#[no_mangle]
pub extern "C" fn sr_curvature_bound(t: f64, t0: f64) -> f64 {
    rosenau::curvature_bound(t, t0)
}
