//! C interface. Every call returns a `BpwaStatus`; results go through out
//! pointers. The text of the last failure on the calling thread is available
//! from `bpwa_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bpwa::config::KeyValues;
use bpwa::mms::{interwell_steady_states, intrawell_steady_states, Branch};
use bpwa::report::RunConfig;
use bpwa::simulator::{classify, numeric_power, steady_response, FullState, MotionLabel};
use bpwa::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BpwaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Numerical = 3,
    BufferTooSmall = 4,
    Io = 5,
    Panic = 6,
}

/// Opaque model: parameters plus simulation settings.
pub struct BpwaModel {
    cfg: RunConfig,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BpwaSteadyState {
    pub a0: f64,
    pub psi0: f64,
    /// 0 resonant intra-well, 1 non-resonant intra-well, 2 inter-well.
    pub branch: i32,
    pub stable: i32,
}

/// Motion codes returned by `bpwa_simulate`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BpwaMotion {
    P1Intra = 0,
    P1InterSymmetric = 1,
    P1InterAsymmetric = 2,
    Subharmonic = 3,
    Chaotic = 4,
    Diverged = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> BpwaStatus {
    match e {
        Error::Io(_) => BpwaStatus::Io,
        e if e.is_numerical() => BpwaStatus::Numerical,
        _ => BpwaStatus::InvalidInput,
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), BpwaStatus>) -> BpwaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BpwaStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            BpwaStatus::Panic
        }
    }
}

fn lift<T>(r: bpwa::Result<T>) -> Result<T, BpwaStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

unsafe fn model<'a>(m: *const BpwaModel) -> Result<&'a BpwaModel, BpwaStatus> {
    m.as_ref().ok_or_else(|| {
        set_error("null model handle");
        BpwaStatus::NullPointer
    })
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, BpwaStatus> {
    p.as_mut().ok_or_else(|| {
        set_error("null output pointer");
        BpwaStatus::NullPointer
    })
}

/// Copies the last error message, NUL terminated and truncated to `len`.
/// Returns the full message length without the terminator.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn bpwa_last_error(buf: *mut c_char, len: usize) -> usize {
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

/// Static version string.
#[no_mangle]
pub extern "C" fn bpwa_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Model with reference parameters.
///
/// # Safety
/// `out_model` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn bpwa_model_new(out_model: *mut *mut BpwaModel) -> BpwaStatus {
    guard(|| {
        let slot = out(out_model)?;
        let cfg = lift(RunConfig::with(&[]))?;
        *slot = Box::into_raw(Box::new(BpwaModel { cfg }));
        Ok(())
    })
}

/// Model from `key=value` configuration text.
///
/// # Safety
/// `text` must be null or a NUL-terminated string; `out_model` null or writable.
#[no_mangle]
pub unsafe extern "C" fn bpwa_model_from_config(text: *const c_char, out_model: *mut *mut BpwaModel) -> BpwaStatus {
    guard(|| {
        let slot = out(out_model)?;
        if text.is_null() {
            set_error("null config text");
            return Err(BpwaStatus::NullPointer);
        }
        let s = CStr::from_ptr(text).to_str().map_err(|_| {
            set_error("config text is not UTF-8");
            BpwaStatus::InvalidInput
        })?;
        let kv = lift(KeyValues::parse(s))?;
        let cfg = lift(RunConfig::from_key_values(&kv))?;
        *slot = Box::into_raw(Box::new(BpwaModel { cfg }));
        Ok(())
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `m` must come from `bpwa_model_new` or `bpwa_model_from_config` and not
/// be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bpwa_model_free(m: *mut BpwaModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Nondimensional wave forcing amplitude for `A/R` at `omega`.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn bpwa_g_wave(
    m: *const BpwaModel,
    amplitude_ratio: f64,
    omega: f64,
    out_g: *mut f64,
) -> BpwaStatus {
    guard(|| {
        let m = model(m)?;
        *out(out_g)? = lift(m.cfg.params.g_wave(amplitude_ratio, omega))?;
        Ok(())
    })
}

/// Radiation kernel at `t >= 0`.
///
/// # Safety
/// `out_h` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn bpwa_kernel_impulse(t: f64, out_h: *mut f64) -> BpwaStatus {
    guard(|| {
        let r = bpwa::RadiationRealization::hemisphere();
        *out(out_h)? = lift(bpwa::hydro::impulse_response(t, &r))?;
        Ok(())
    })
}

/// Multiple-scales steady states at one point. Writes up to `cap` states and
/// the total count to `out_len`; returns `BUFFER_TOO_SMALL` if `cap` is short.
///
/// # Safety
/// `buf` must hold `cap` elements (or be null with `cap == 0`).
#[no_mangle]
pub unsafe extern "C" fn bpwa_steady_states(
    m: *const BpwaModel,
    amplitude_ratio: f64,
    omega: f64,
    buf: *mut BpwaSteadyState,
    cap: usize,
    out_len: *mut usize,
) -> BpwaStatus {
    guard(|| {
        let m = model(m)?;
        let len = out(out_len)?;
        let p = &m.cfg.params;
        let g = lift(p.g_wave(amplitude_ratio, omega))?;
        let mut states = Vec::new();
        if (omega - p.omega_o()).abs() < p.omega_o() {
            states.extend(lift(intrawell_steady_states(omega, g, p))?);
        }
        states.extend(lift(interwell_steady_states(omega, g, p))?);
        *len = states.len();
        if states.len() > cap {
            set_error(format!("{} states, buffer holds {cap}", states.len()));
            return Err(BpwaStatus::BufferTooSmall);
        }
        if states.is_empty() {
            return Ok(());
        }
        if buf.is_null() {
            set_error("null state buffer");
            return Err(BpwaStatus::NullPointer);
        }
        for (i, s) in states.iter().enumerate() {
            *buf.add(i) = BpwaSteadyState {
                a0: s.a0,
                psi0: s.psi0,
                branch: match s.branch {
                    Branch::Resonant => 0,
                    Branch::NonResonant => 1,
                    Branch::Large => 2,
                },
                stable: s.stable as i32,
            };
        }
        Ok(())
    })
}

/// Period-doubling residual of the intra-well orbit of amplitude `a0`.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn bpwa_pd_residual(m: *const BpwaModel, a0: f64, omega: f64, out_r: *mut f64) -> BpwaStatus {
    guard(|| {
        let m = model(m)?;
        *out(out_r)? = lift(bpwa::bifurcation::pd_residual(a0, omega, &m.cfg.params))?;
        Ok(())
    })
}

/// Simulates from rest with the model's settings, returning the motion code
/// and mean power. A diverged run reports `DIVERGED` and a NaN power.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn bpwa_simulate(
    m: *const BpwaModel,
    amplitude_ratio: f64,
    omega: f64,
    out_motion: *mut BpwaMotion,
    out_power: *mut f64,
) -> BpwaStatus {
    guard(|| {
        let m = model(m)?;
        let motion = out(out_motion)?;
        let power = out(out_power)?;
        let p = &m.cfg.params;
        let g = lift(p.g_wave(amplitude_ratio, omega))?;
        let traj = match steady_response(p, omega, g, &FullState::default(), &m.cfg.sim) {
            Ok(t) => t,
            Err(Error::Divergence { .. }) => {
                *motion = BpwaMotion::Diverged;
                *power = f64::NAN;
                return Ok(());
            }
            Err(e) => return lift(Err(e)),
        };
        *motion = match lift(classify(&traj, omega, p))?.label {
            MotionLabel::P1Intra => BpwaMotion::P1Intra,
            MotionLabel::P1InterSymmetric => BpwaMotion::P1InterSymmetric,
            MotionLabel::P1InterAsymmetric => BpwaMotion::P1InterAsymmetric,
            MotionLabel::Periodic(_) => BpwaMotion::Subharmonic,
            MotionLabel::Chaotic => BpwaMotion::Chaotic,
        };
        *power = lift(numeric_power(&traj, omega, p, m.cfg.sim.window_periods))?;
        Ok(())
    })
}
