//! C ABI for the `bsfwm` toolkit.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_from_*`
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`BsfwmStatus`]; on failure the message is kept per thread and
//! can be copied out with [`bsfwm_last_error`]. Panics are caught and reported
//! as `BSFWM_STATUS_PANIC`.
//!
//! Matrices are exchanged row-major as separate real and imaginary arrays.
//! Mode indices are zero-based.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bsfwm::cli::{cmd_oracle, CheckChoice, CliError, ExperimentConfig, TransferChoice};
use bsfwm::fitting::{fit_phase_scale, CurvePoint, PhaseModel};
use bsfwm::quantum::{correlations, g2_dual_coherent};
use bsfwm::transfer::{ideal_transfer, TransferMatrix};

/// Result of an FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsfwmStatus {
    Ok = 0,
    /// Invalid configuration, parameter or index.
    InvalidInput = 1,
    /// Integrator, oracle or other numerical failure.
    Numerical = 2,
    /// Fit failure or degenerate data.
    Fit = 3,
    /// A required pointer was null.
    NullPointer = 5,
    /// Caller-supplied buffer is too small.
    BufferTooSmall = 6,
    /// Internal panic; the handle arguments should be considered poisoned.
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsfwmTransferKind {
    Ideal = 0,
    General = 1,
    Lossy = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsfwmCheck {
    Classical = 0,
    Quantum = 1,
    All = 2,
}

/// Opaque transfer matrix.
pub struct BsfwmTransfer(TransferMatrix);

/// Opaque experiment configuration.
pub struct BsfwmConfig(ExperimentConfig);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: BsfwmStatus, msg: impl Into<String>) -> BsfwmStatus {
    set_error(msg);
    status
}

fn from_cli(e: CliError) -> BsfwmStatus {
    let status = match e.code {
        2 => BsfwmStatus::Numerical,
        3 => BsfwmStatus::Fit,
        _ => BsfwmStatus::InvalidInput,
    };
    fail(status, e.message)
}

fn from_core(e: bsfwm::Error) -> BsfwmStatus {
    from_cli(CliError::from(e))
}

fn guard(f: impl FnOnce() -> BsfwmStatus) -> BsfwmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(BsfwmStatus::Panic, msg)
        }
    }
}

macro_rules! nonnull {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(BsfwmStatus::NullPointer, concat!("null pointer: ", stringify!($p)));
        })+
    };
}

/// Copies a NUL-terminated string into `buf` and stores the required size
/// (including the terminator) in `needed`.
unsafe fn copy_out(text: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> BsfwmStatus {
    if !needed.is_null() {
        *needed = text.len() + 1;
    }
    if buf.is_null() || len < text.len() + 1 {
        return fail(
            BsfwmStatus::BufferTooSmall,
            format!("buffer needs {} bytes", text.len() + 1),
        );
    }
    std::ptr::copy_nonoverlapping(text.as_ptr().cast::<c_char>(), buf, text.len());
    *buf.add(text.len()) = 0;
    BsfwmStatus::Ok
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bsfwm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message.
///
/// # Safety
/// `buf` must point to `len` writable bytes or be null; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn bsfwm_last_error(buf: *mut c_char, len: usize, needed: *mut usize) -> BsfwmStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    if !needed.is_null() {
        *needed = msg.len() + 1;
    }
    if buf.is_null() || len < msg.len() + 1 {
        return BsfwmStatus::BufferTooSmall;
    }
    std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, msg.len());
    *buf.add(msg.len()) = 0;
    BsfwmStatus::Ok
}

/// Built-in three-mode default configuration.
///
/// # Safety
/// `out` must be a valid pointer; the handle is released with [`bsfwm_config_free`].
#[no_mangle]
pub unsafe extern "C" fn bsfwm_config_default(out: *mut *mut BsfwmConfig) -> BsfwmStatus {
    nonnull!(out);
    guard(|| {
        *out = Box::into_raw(Box::new(BsfwmConfig(ExperimentConfig::builtin())));
        BsfwmStatus::Ok
    })
}

/// Parses and validates a JSON configuration.
///
/// # Safety
/// `json` must be a NUL-terminated UTF-8 string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bsfwm_config_from_json(json: *const c_char, out: *mut *mut BsfwmConfig) -> BsfwmStatus {
    nonnull!(json, out);
    guard(|| {
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            return fail(BsfwmStatus::InvalidInput, "config is not UTF-8");
        };
        match ExperimentConfig::from_json(text) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(BsfwmConfig(cfg)));
                BsfwmStatus::Ok
            }
            Err(e) => from_cli(e),
        }
    })
}

/// Serializes a configuration as pretty JSON.
///
/// # Safety
/// `cfg` must be a live handle; `buf` must hold `len` bytes or be null.
#[no_mangle]
pub unsafe extern "C" fn bsfwm_config_to_json(
    cfg: *const BsfwmConfig,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> BsfwmStatus {
    nonnull!(cfg);
    guard(|| copy_out(&(*cfg).0.to_json(), buf, len, needed))
}

/// Number of weak modes of a configuration.
///
/// # Safety
/// `cfg` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn bsfwm_config_modes(cfg: *const BsfwmConfig) -> usize {
    if cfg.is_null() {
        0
    } else {
        (*cfg).0.n_modes()
    }
}

/// # Safety
/// `cfg` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bsfwm_config_free(cfg: *mut BsfwmConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Ideal N-mode beamsplitter at nonlinear phase `phi`.
///
/// # Safety
/// `out` must be a valid pointer; release the handle with [`bsfwm_transfer_free`].
#[no_mangle]
pub unsafe extern "C" fn bsfwm_transfer_ideal(n: usize, phi: f64, out: *mut *mut BsfwmTransfer) -> BsfwmStatus {
    nonnull!(out);
    guard(|| match ideal_transfer(n, phi) {
        Ok(u) => {
            *out = Box::into_raw(Box::new(BsfwmTransfer(u)));
            BsfwmStatus::Ok
        }
        Err(e) => from_core(e),
    })
}

/// Transfer matrix of a configuration. When `use_phi` is zero the configured
/// pump powers set the phase.
///
/// # Safety
/// `cfg` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bsfwm_transfer_from_config(
    cfg: *const BsfwmConfig,
    kind: BsfwmTransferKind,
    phi: f64,
    use_phi: i32,
    out: *mut *mut BsfwmTransfer,
) -> BsfwmStatus {
    nonnull!(cfg, out);
    guard(|| {
        let kind = match kind {
            BsfwmTransferKind::Ideal => TransferChoice::Ideal,
            BsfwmTransferKind::General => TransferChoice::General,
            BsfwmTransferKind::Lossy => TransferChoice::Lossy,
        };
        match (*cfg).0.transfer_at(kind, (use_phi != 0).then_some(phi)) {
            Ok(u) => {
                *out = Box::into_raw(Box::new(BsfwmTransfer(u)));
                BsfwmStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Matrix dimension, or 0 for a null handle.
///
/// # Safety
/// `t` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn bsfwm_transfer_modes(t: *const BsfwmTransfer) -> usize {
    if t.is_null() {
        0
    } else {
        (*t).0.n_modes()
    }
}

/// Copies the N×N entries row-major into `re` and `im` (each of length `len ≥ N²`).
///
/// # Safety
/// `t` must be a live handle; `re` and `im` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bsfwm_transfer_entries(
    t: *const BsfwmTransfer,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> BsfwmStatus {
    nonnull!(t, re, im);
    guard(|| {
        let u = &(*t).0;
        let n = u.n_modes();
        if len < n * n {
            return fail(BsfwmStatus::BufferTooSmall, format!("need {} entries", n * n));
        }
        for i in 0..n {
            for j in 0..n {
                let z = u.entry(i, j);
                *re.add(i * n + j) = z.re;
                *im.add(i * n + j) = z.im;
            }
        }
        BsfwmStatus::Ok
    })
}

/// `max |U†U − s²I|`, with `s` the uniform loss scale of lossy matrices.
///
/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bsfwm_transfer_unitarity_residual(t: *const BsfwmTransfer, out: *mut f64) -> BsfwmStatus {
    nonnull!(t, out);
    guard(|| {
        *out = (*t).0.unitarity_residual();
        BsfwmStatus::Ok
    })
}

/// # Safety
/// `t` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bsfwm_transfer_free(t: *mut BsfwmTransfer) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Singles and normalized cross-correlations of the configured input through `t`.
///
/// `singles` receives N values. `g2` receives the N(N−1)/2 pairs in
/// lexicographic order; undefined normalizations are written as NaN.
///
/// # Safety
/// Handles must be live; `singles` and `g2` must hold `n_singles` and `n_pairs` doubles.
#[no_mangle]
pub unsafe extern "C" fn bsfwm_correlations(
    cfg: *const BsfwmConfig,
    t: *const BsfwmTransfer,
    singles: *mut f64,
    n_singles: usize,
    g2: *mut f64,
    n_pairs: usize,
) -> BsfwmStatus {
    nonnull!(cfg, t, singles, g2);
    guard(|| {
        let u = &(*t).0;
        let n = u.n_modes();
        if n_singles < n || n_pairs < n * (n - 1) / 2 {
            return fail(
                BsfwmStatus::BufferTooSmall,
                format!("need {n} singles and {} pairs", n * (n - 1) / 2),
            );
        }
        let state = match (*cfg).0.input.to_state(n) {
            Ok(s) => s,
            Err(e) => return from_core(e),
        };
        match correlations(&state, u) {
            Ok(c) => {
                for (k, v) in c.singles.iter().enumerate() {
                    *singles.add(k) = *v;
                }
                for (k, p) in c.pairs.iter().enumerate() {
                    *g2.add(k) = p.normalized.unwrap_or(f64::NAN);
                }
                BsfwmStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Phase-averaged dual-coherent cross-correlation `(1 − (N−2)|q|²)²`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bsfwm_g2_dual_coherent(n: usize, phi: f64, out: *mut f64) -> BsfwmStatus {
    nonnull!(out);
    guard(|| match g2_dual_coherent(n, phi) {
        Ok(v) => {
            *out = v;
            BsfwmStatus::Ok
        }
        Err(e) => from_core(e),
    })
}

/// Fits κ in `φ = κP` to a normalized input-channel depletion curve.
///
/// # Safety
/// `powers` and `values` must hold `len` doubles; `kappa` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bsfwm_fit_phase_scale(
    powers: *const f64,
    values: *const f64,
    len: usize,
    n_modes: usize,
    kappa: *mut f64,
) -> BsfwmStatus {
    nonnull!(powers, values, kappa);
    guard(|| {
        let points: Vec<CurvePoint> = (0..len)
            .map(|k| CurvePoint {
                power: *powers.add(k),
                value: *values.add(k),
            })
            .collect();
        match fit_phase_scale(&points, PhaseModel::DualInputDepletion, n_modes) {
            Ok(fit) => {
                *kappa = fit.phase_scale.unwrap_or(f64::NAN);
                BsfwmStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Runs the closed-form versus oracle comparison. `passed` is set to 1 when
/// every error is within `tol`.
///
/// # Safety
/// `cfg` must be a live handle; `max_error` and `passed` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bsfwm_oracle_check(
    cfg: *const BsfwmConfig,
    check: BsfwmCheck,
    tol: f64,
    max_error: *mut f64,
    passed: *mut i32,
) -> BsfwmStatus {
    nonnull!(cfg, max_error, passed);
    guard(|| {
        let check = match check {
            BsfwmCheck::Classical => CheckChoice::Classical,
            BsfwmCheck::Quantum => CheckChoice::Quantum,
            BsfwmCheck::All => CheckChoice::All,
        };
        match cmd_oracle(&(*cfg).0, check, tol) {
            Ok((_, ok, worst)) => {
                *max_error = worst;
                *passed = i32::from(ok);
                BsfwmStatus::Ok
            }
            Err(e) => from_cli(e),
        }
    })
}
