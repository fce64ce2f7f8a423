//! C ABI over `bo-core`.
//!
//! Every function returns a [`BoStatus`]. On failure the message is kept in a
//! thread-local buffer readable through [`bo_last_error_message`]. Handles are
//! opaque and must be released with the matching `*_free` function. Array
//! arguments are `(pointer, length)` pairs; lengths are checked against the
//! handle before anything is read or written.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use bo_core::exact::OneSolitonParams;
use bo_core::hilbert::{hilbert_line, hilbert_periodic, HilbertPath, PeriodicHilbertKernel};
use bo_core::stepper::{evolve_with, CflParams, EvolveOptions, FixedPointConfig, Stepper};
use bo_core::{BoError, GridFunction, GridSpec};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    LengthMismatch = 3,
    NonFinite = 4,
    NoConvergence = 5,
    Divergence = 6,
    BlowUp = 7,
    NumericalGuard = 8,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoHilbertPath {
    Spectral = 0,
    Direct = 1,
}

/// Diagnostics of one implicit step.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BoStepInfo {
    pub dt: f64,
    pub iterations: usize,
    pub final_contraction_ratio: f64,
    pub max_contraction_ratio: f64,
}

/// Summary of a multi-step evolution.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BoEvolveInfo {
    pub steps: usize,
    pub total_iterations: usize,
    pub lambda: f64,
    pub dt: f64,
    pub relative_l2_drift: f64,
}

/// Periodic Hilbert kernel for a fixed odd size.
pub struct BoKernel {
    inner: PeriodicHilbertKernel,
}

/// Periodic solver state: grid, current values, elapsed time and settings.
pub struct BoSolver {
    stepper: Stepper,
    state: GridFunction,
    time: f64,
    cfl: CflParams,
    fp: FixedPointConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &BoError) -> BoStatus {
    match e {
        BoError::LengthMismatch { .. } | BoError::KernelMismatch { .. } | BoError::GridMismatch => {
            BoStatus::LengthMismatch
        }
        BoError::NonFinite { .. } => BoStatus::NonFinite,
        BoError::NoConvergence { .. } => BoStatus::NoConvergence,
        BoError::Divergence { .. } => BoStatus::Divergence,
        BoError::BlowUp { .. } => BoStatus::BlowUp,
        BoError::Step { source, .. } => status_of(source),
        BoError::KernelCrossCheck { .. } | BoError::SpectralResidue { .. } => BoStatus::NumericalGuard,
        _ => BoStatus::InvalidArgument,
    }
}

struct Fail(BoStatus, String);

impl From<BoError> for Fail {
    fn from(e: BoError) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(BoStatus::NullPointer, format!("`{what}` is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> BoStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(String::new());
            BoStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
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
            BoStatus::Panic
        }
    }
}

unsafe fn input<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

fn expect_len(got: usize, expected: usize) -> Result<(), Fail> {
    if got == expected {
        Ok(())
    } else {
        Err(BoError::LengthMismatch { expected, got }.into())
    }
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes) and returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn bo_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn bo_status_string(status: BoStatus) -> *const c_char {
    let s: &'static CStr = match status {
        BoStatus::Ok => c"ok",
        BoStatus::NullPointer => c"null pointer",
        BoStatus::InvalidArgument => c"invalid argument",
        BoStatus::LengthMismatch => c"length mismatch",
        BoStatus::NonFinite => c"non-finite value",
        BoStatus::NoConvergence => c"fixed-point iteration did not converge",
        BoStatus::Divergence => c"fixed-point iteration diverged",
        BoStatus::BlowUp => c"solution blew up",
        BoStatus::NumericalGuard => c"numerical self-check failed",
        BoStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn bo_kernel_new(n_points: usize, out: *mut *mut BoKernel) -> BoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = PeriodicHilbertKernel::new(n_points)?;
        *out = Box::into_raw(Box::new(BoKernel { inner }));
        Ok(())
    })
}

/// # Safety
/// `kernel` must be null or a handle from [`bo_kernel_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bo_kernel_free(kernel: *mut BoKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

/// # Safety
/// `kernel` must be a live handle; `u` and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bo_hilbert_periodic(
    kernel: *const BoKernel,
    path: BoHilbertPath,
    u: *const f64,
    out: *mut f64,
    len: usize,
) -> BoStatus {
    guard(|| {
        let kernel = kernel.as_ref().ok_or_else(|| null("kernel"))?;
        let n = kernel.inner.n_points();
        expect_len(len, n)?;
        let u = input(u, len, "u")?;
        let out = output(out, len, "out")?;
        let grid = GridSpec::periodic_interval(n, 0.0, 1.0)?;
        let path = match path {
            BoHilbertPath::Spectral => HilbertPath::Spectral,
            BoHilbertPath::Direct => HilbertPath::Direct,
        };
        let h = hilbert_periodic(&GridFunction::new(grid, u.to_vec())?, &kernel.inner, path)?;
        out.copy_from_slice(h.values());
        Ok(())
    })
}

/// Line transform of `len` samples; `out` receives `3 * len` values on the
/// input grid padded by one input width on each side.
///
/// # Safety
/// `u` must hold `len` doubles and `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bo_hilbert_line(u: *const f64, len: usize, out: *mut f64, out_len: usize) -> BoStatus {
    guard(|| {
        expect_len(out_len, 3 * len)?;
        let u = input(u, len, "u")?;
        let out = output(out, out_len, "out")?;
        let grid = GridSpec::line(len, 1.0, 0.0)?;
        let h = hilbert_line(&GridFunction::new(grid, u.to_vec())?)?;
        out.copy_from_slice(h.values());
        Ok(())
    })
}

/// Samples the periodic one-soliton at the points `x`.
///
/// # Safety
/// `x` and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bo_one_soliton_sample(
    c: f64,
    l_domain: f64,
    t: f64,
    x: *const f64,
    out: *mut f64,
    len: usize,
) -> BoStatus {
    guard(|| {
        let p = OneSolitonParams::new(c, l_domain)?;
        let x = input(x, len, "x")?;
        let out = output(out, len, "out")?;
        for (o, &xi) in out.iter_mut().zip(x) {
            *o = p.eval(xi, t);
        }
        Ok(())
    })
}

/// Solver on the periodic grid of `n_points` (odd) cells over `[a, b)`,
/// starting from zero with the default step-size and iteration settings.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn bo_solver_new(n_points: usize, a: f64, b: f64, out: *mut *mut BoSolver) -> BoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let grid = GridSpec::periodic_interval(n_points, a, b)?;
        let solver = BoSolver {
            stepper: Stepper::for_grid(grid)?,
            state: GridFunction::zeros(grid),
            time: 0.0,
            cfl: CflParams::default(),
            fp: FixedPointConfig::default(),
        };
        *out = Box::into_raw(Box::new(solver));
        Ok(())
    })
}

/// # Safety
/// `solver` must be null or a handle from [`bo_solver_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bo_solver_free(solver: *mut BoSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// # Safety
/// `solver` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bo_solver_len(solver: *const BoSolver) -> usize {
    solver.as_ref().map_or(0, |s| s.state.len())
}

/// Grid coordinates `x_j`.
///
/// # Safety
/// `solver` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bo_solver_coordinates(solver: *const BoSolver, out: *mut f64, len: usize) -> BoStatus {
    guard(|| {
        let s = solver.as_ref().ok_or_else(|| null("solver"))?;
        expect_len(len, s.state.len())?;
        output(out, len, "out")?.copy_from_slice(&s.state.grid().coordinates());
        Ok(())
    })
}

/// Replaces the state and resets the elapsed time to `t`.
///
/// # Safety
/// `solver` must be a live handle; `u` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bo_solver_set_state(solver: *mut BoSolver, u: *const f64, len: usize, t: f64) -> BoStatus {
    guard(|| {
        let s = solver.as_mut().ok_or_else(|| null("solver"))?;
        expect_len(len, s.state.len())?;
        if !t.is_finite() {
            return Err(BoError::InvalidParameter {
                name: "t".into(),
                reason: "must be finite".into(),
            }
            .into());
        }
        s.state = GridFunction::new(*s.state.grid(), input(u, len, "u")?.to_vec())?;
        s.time = t;
        Ok(())
    })
}

/// # Safety
/// `solver` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bo_solver_get_state(solver: *const BoSolver, out: *mut f64, len: usize) -> BoStatus {
    guard(|| {
        let s = solver.as_ref().ok_or_else(|| null("solver"))?;
        expect_len(len, s.state.len())?;
        output(out, len, "out")?.copy_from_slice(s.state.values());
        Ok(())
    })
}

/// # Safety
/// `solver` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bo_solver_time(solver: *const BoSolver) -> f64 {
    solver.as_ref().map_or(f64::NAN, |s| s.time)
}

/// Fixed-point stopping rule used by later steps.
///
/// # Safety
/// `solver` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bo_solver_set_fixed_point(
    solver: *mut BoSolver,
    rel_tolerance: f64,
    max_iterations: usize,
    divergence_guard: f64,
) -> BoStatus {
    guard(|| {
        let s = solver.as_mut().ok_or_else(|| null("solver"))?;
        let fp = FixedPointConfig {
            rel_tolerance,
            max_iterations,
            divergence_guard,
        };
        fp.validate()?;
        s.fp = fp;
        Ok(())
    })
}

/// Step-size rule for [`bo_solver_evolve`]: a fixed `lambda = dt/dx` when
/// `lambda > 0`, otherwise `factor / |u0|_h2` with `factor` in (0, 1].
///
/// # Safety
/// `solver` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bo_solver_set_lambda(solver: *mut BoSolver, lambda: f64, factor: f64) -> BoStatus {
    guard(|| {
        let s = solver.as_mut().ok_or_else(|| null("solver"))?;
        let cfl = CflParams {
            practical_lambda: (lambda > 0.0).then_some(lambda),
            practical_factor: factor,
            ..CflParams::default()
        };
        cfl.validate()?;
        s.cfl = cfl;
        Ok(())
    })
}

/// One Crank-Nicolson step of size `dt`. The state is left unchanged on error.
///
/// # Safety
/// `solver` must be a live handle; `info` may be null.
#[no_mangle]
pub unsafe extern "C" fn bo_solver_step(solver: *mut BoSolver, dt: f64, info: *mut BoStepInfo) -> BoStatus {
    guard(|| {
        let s = solver.as_mut().ok_or_else(|| null("solver"))?;
        let (next, report) = s.stepper.step(s.state.values(), dt, &s.fp)?;
        s.state = GridFunction::new(*s.state.grid(), next)?;
        s.time += dt;
        if let Some(info) = info.as_mut() {
            *info = BoStepInfo {
                dt: report.dt_used,
                iterations: report.iterations,
                final_contraction_ratio: report.final_contraction_ratio,
                max_contraction_ratio: report.max_contraction_ratio,
            };
        }
        Ok(())
    })
}

/// Advances the state by `duration`, landing exactly on the end time.
///
/// # Safety
/// `solver` must be a live handle; `info` may be null.
#[no_mangle]
pub unsafe extern "C" fn bo_solver_evolve(solver: *mut BoSolver, duration: f64, info: *mut BoEvolveInfo) -> BoStatus {
    guard(|| {
        let s = solver.as_mut().ok_or_else(|| null("solver"))?;
        let traj = evolve_with(
            &mut s.stepper,
            &s.state,
            duration,
            &s.cfl,
            &s.fp,
            &[],
            &EvolveOptions::default(),
        )?;
        s.state = traj.final_state.clone();
        s.time += duration;
        if let Some(info) = info.as_mut() {
            *info = BoEvolveInfo {
                steps: traj.steps.len(),
                total_iterations: traj.total_iterations(),
                lambda: traj.lambda_initial,
                dt: traj.dt_max(),
                relative_l2_drift: traj.relative_l2_drift(),
            };
        }
        Ok(())
    })
}
