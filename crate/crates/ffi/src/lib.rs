//! C ABI over the torus-mhd laboratory.
//!
//! Every entry point returns a [`TmhdStatus`] and writes results through out
//! pointers. Backgrounds and simulations are opaque heap handles released with
//! their `_free` functions. The message of the most recent failure on the
//! calling thread is available from [`tmhd_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use torus_mhd::solver::{random_state, InitialData};
use torus_mhd::spectral::{sobolev_norm, Sobolev};
use torus_mhd::{
    classify_mode, estimate_constant, golden_vector, kernel_bound_check, kernel_values,
    BackgroundField, Case, Error, Region, SimState, Solver, SolverConfig, TorusGrid,
};

/// Status codes shared by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmhdStatus {
    Ok = 0,
    NullPointer = 1,
    Config = 2,
    Contract = 3,
    Divergence = 4,
    Cfl = 5,
    Io = 6,
    Panic = 7,
}

/// Frequency region of a mode.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmhdRegion {
    S1 = 1,
    S2 = 2,
    S3 = 3,
}

/// Certified background field.
pub struct TmhdBackground {
    inner: BackgroundField,
}

/// Solver plus its current state.
pub struct TmhdSimulation {
    solver: Solver,
    state: SimState,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> TmhdStatus {
    match err {
        Error::Config(_) => TmhdStatus::Config,
        Error::Contract(_) => TmhdStatus::Contract,
        Error::Divergence { .. } => TmhdStatus::Divergence,
        Error::Cfl { .. } => TmhdStatus::Cfl,
        Error::Snapshot(_) | Error::Io(_) => TmhdStatus::Io,
    }
}

fn null_pointer(name: &str) -> TmhdStatus {
    set_error(format!("{name} is null"));
    TmhdStatus::NullPointer
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), TmhdStatus>) -> TmhdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TmhdStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            TmhdStatus::Panic
        }
    }
}

fn lift<T>(r: torus_mhd::Result<T>) -> Result<T, TmhdStatus> {
    r.map_err(|e| {
        let status = status_of(&e);
        set_error(e.to_string());
        status
    })
}

unsafe fn input<'a, T>(ptr: *const T, len: usize, name: &str) -> Result<&'a [T], TmhdStatus> {
    if ptr.is_null() {
        return Err(null_pointer(name));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

unsafe fn output<'a, T>(ptr: *mut T, name: &str) -> Result<&'a mut T, TmhdStatus> {
    ptr.as_mut().ok_or_else(|| null_pointer(name))
}

unsafe fn handle<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, TmhdStatus> {
    ptr.as_ref().ok_or_else(|| null_pointer(name))
}

/// Copies the last error message into `buf` (NUL-terminated, truncated to
/// `len`). Returns the full message length, 0 when there is none.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn tmhd_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Minimum of `|b̃·k| |k|^r` over `0 < |k|_∞ ≤ k_max`; `argmin` receives `n` entries.
///
/// # Safety
/// `b_tilde` and `argmin` must hold `n` elements; `c_hat` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tmhd_estimate_constant(
    b_tilde: *const f64,
    n: usize,
    r: f64,
    k_max: usize,
    c_hat: *mut f64,
    argmin: *mut i64,
) -> TmhdStatus {
    guard(|| {
        let b = input(b_tilde, n, "b_tilde")?;
        let out = output(c_hat, "c_hat")?;
        if argmin.is_null() {
            return Err(null_pointer("argmin"));
        }
        let cert = lift(estimate_constant(b, r, k_max))?;
        *out = cert.c_hat;
        slice::from_raw_parts_mut(argmin, n).copy_from_slice(&cert.argmin);
        Ok(())
    })
}

/// Region of mode `k` (length `n`) for background `b_tilde`.
///
/// # Safety
/// `k` and `b_tilde` must hold `n` elements; `region` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tmhd_classify_mode(
    k: *const i64,
    b_tilde: *const f64,
    n: usize,
    region: *mut TmhdRegion,
) -> TmhdStatus {
    guard(|| {
        let k = input(k, n, "k")?;
        let b = input(b_tilde, n, "b_tilde")?;
        let out = output(region, "region")?;
        *out = match lift(classify_mode(k, b))? {
            Region::S1 => TmhdRegion::S1,
            Region::S2 => TmhdRegion::S2,
            Region::S3 => TmhdRegion::S3,
        };
        Ok(())
    })
}

/// Scalar propagator kernels `L₁(t)`, `L₂(t)` of mode `k`.
///
/// # Safety
/// `k` and `b_tilde` must hold `n` elements; `l1`, `l2` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tmhd_kernel_values(
    k: *const i64,
    b_tilde: *const f64,
    n: usize,
    t: f64,
    l1: *mut f64,
    l2: *mut f64,
) -> TmhdStatus {
    guard(|| {
        let k = input(k, n, "k")?;
        let b = input(b_tilde, n, "b_tilde")?;
        let (o1, o2) = (output(l1, "l1")?, output(l2, "l2")?);
        let (v1, v2) = lift(kernel_values(k, b, t))?;
        *o1 = v1;
        *o2 = v2;
        Ok(())
    })
}

/// Checks the region bounds on both kernels; `ok` is 1 when they hold.
///
/// # Safety
/// `k` and `b_tilde` must hold `n` elements; `ok`, `slack` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tmhd_kernel_bound_check(
    k: *const i64,
    b_tilde: *const f64,
    n: usize,
    t: f64,
    ok: *mut i32,
    slack: *mut f64,
) -> TmhdStatus {
    guard(|| {
        let k = input(k, n, "k")?;
        let b = input(b_tilde, n, "b_tilde")?;
        let (o_ok, o_slack) = (output(ok, "ok")?, output(slack, "slack")?);
        let check = lift(kernel_bound_check(k, b, t))?;
        *o_ok = i32::from(check.ok);
        *o_slack = check.slack;
        Ok(())
    })
}

/// Certifies `b_tilde` with exponent `r` over `|k|_∞ ≤ k_cert`. A null
/// `b_tilde` selects the golden vector of dimension `n`.
///
/// # Safety
/// `b_tilde` must be null or hold `n` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tmhd_background_new(
    b_tilde: *const f64,
    n: usize,
    r: f64,
    k_cert: usize,
    out: *mut *mut TmhdBackground,
) -> TmhdStatus {
    guard(|| {
        let out = output(out, "out")?;
        let b = if b_tilde.is_null() {
            lift(golden_vector(n))?
        } else {
            slice::from_raw_parts(b_tilde, n).to_vec()
        };
        let inner = lift(BackgroundField::certify(&b, r, k_cert))?;
        *out = Box::into_raw(Box::new(TmhdBackground { inner }));
        Ok(())
    })
}

/// Certified constant of the background.
///
/// # Safety
/// `bg` must come from [`tmhd_background_new`]; `c_hat` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tmhd_background_c_hat(bg: *const TmhdBackground, c_hat: *mut f64) -> TmhdStatus {
    guard(|| {
        let bg = handle(bg, "bg")?;
        *output(c_hat, "c_hat")? = bg.inner.c_hat();
        Ok(())
    })
}

/// # Safety
/// `bg` must be null or come from [`tmhd_background_new`], and is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn tmhd_background_free(bg: *mut TmhdBackground) {
    if !bg.is_null() {
        drop(Box::from_raw(bg));
    }
}

/// Random small solenoidal data on an `N`-point grid, ready to step.
///
/// `case_code` is 0 for `(μ, ν) = (0, 1)` and 1 for `(1, 0)`. The data lives on
/// shells `|k| ≤ 4` with `‖u‖_{H^7} + ‖b‖_{H^7} = amplitude`.
///
/// # Safety
/// `bg` must come from [`tmhd_background_new`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tmhd_simulation_new(
    bg: *const TmhdBackground,
    points: usize,
    case_code: u8,
    dt: f64,
    amplitude: f64,
    seed: u64,
    out: *mut *mut TmhdSimulation,
) -> TmhdStatus {
    guard(|| {
        let bg = handle(bg, "bg")?;
        let out = output(out, "out")?;
        let case = Case::from_code(case_code).ok_or_else(|| {
            set_error(format!("case code must be 0 or 1, got {case_code}"));
            TmhdStatus::Config
        })?;
        let grid = lift(TorusGrid::new(bg.inner.dim(), points))?;
        let data = InitialData {
            amplitude,
            seed,
            ..InitialData::default()
        };
        let state = lift(random_state(grid, case, bg.inner.clone(), &data))?;
        let config = SolverConfig {
            dt,
            ..SolverConfig::default()
        };
        let solver = lift(Solver::new(grid, config))?;
        *out = Box::into_raw(Box::new(TmhdSimulation { solver, state }));
        Ok(())
    })
}

/// Advances by `steps` steps. On failure the state is left at the last good step.
///
/// # Safety
/// `sim` must come from [`tmhd_simulation_new`].
#[no_mangle]
pub unsafe extern "C" fn tmhd_simulation_step(sim: *mut TmhdSimulation, steps: usize) -> TmhdStatus {
    guard(|| {
        let sim = output(sim, "sim")?;
        for _ in 0..steps {
            sim.state = lift(sim.solver.step(&sim.state))?;
        }
        Ok(())
    })
}

/// Time, energy `½(‖u‖²+‖b‖²)` and `‖u‖_{H^s} + ‖b‖_{H^s}` of the current state.
///
/// # Safety
/// `sim` must come from [`tmhd_simulation_new`]; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn tmhd_simulation_observe(
    sim: *const TmhdSimulation,
    s: f64,
    t: *mut f64,
    energy: *mut f64,
    norm: *mut f64,
) -> TmhdStatus {
    guard(|| {
        let sim = handle(sim, "sim")?;
        let st = &sim.state;
        *output(t, "t")? = st.t;
        *output(energy, "energy")? = st.energy();
        *output(norm, "norm")? = sobolev_norm(&st.u_hat, s, Sobolev::Inhomogeneous)
            + sobolev_norm(&st.b_hat, s, Sobolev::Inhomogeneous);
        Ok(())
    })
}

/// Largest divergence residual and mean-mode magnitude of the current state.
///
/// # Safety
/// `sim` must come from [`tmhd_simulation_new`]; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn tmhd_simulation_invariants(
    sim: *const TmhdSimulation,
    divergence: *mut f64,
    mean: *mut f64,
) -> TmhdStatus {
    guard(|| {
        let sim = handle(sim, "sim")?;
        let report = sim.state.invariants();
        *output(divergence, "divergence")? = report.divergence;
        *output(mean, "mean")? = report.mean;
        Ok(())
    })
}

/// # Safety
/// `sim` must be null or come from [`tmhd_simulation_new`], and is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn tmhd_simulation_free(sim: *mut TmhdSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}
