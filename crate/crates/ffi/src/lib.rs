//! C ABI over `qdicke`.
//!
//! Conventions:
//!
//! * Every fallible function returns a [`QdStatus`] and writes results
//!   through out-pointers. On failure the out-pointers are left untouched
//!   and [`qd_last_error`] describes the problem.
//! * States and sweeps are opaque handles created by `qd_*_new` /
//!   `qd_lmg_sweep` and released with the matching `qd_*_free`.
//! * Panics never cross the boundary; they surface as `QD_STATUS_PANIC`.
//!
//! Pointers are checked for NULL; beyond that the caller guarantees they are
//! valid for the documented length, as with any C API.

#![allow(clippy::not_unsafe_ptr_arg_deref)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qdicke::qlmg::{self, CuspEstimate, LmgModel, SweepResult};
use qdicke::qmath;
use qdicke::schmidt::{basis_entropy, schmidt_spectrum};
use qdicke::{Bipartition, DickeState, Error, QParams, QuasiSymmetricState};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Range = 3,
    Size = 4,
    Numeric = 5,
    Consistency = 6,
    NoCusp = 7,
    Annihilated = 8,
    BufferTooSmall = 9,
    IndexOutOfRange = 10,
    Panic = 11,
}

impl From<&Error> for QdStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => QdStatus::Domain,
            Error::Range(_) => QdStatus::Range,
            Error::Size { .. } => QdStatus::Size,
            Error::Annihilated { .. } => QdStatus::Annihilated,
            Error::Numeric(_) => QdStatus::Numeric,
            Error::Consistency(_) => QdStatus::Consistency,
            Error::NoCusp(_) => QdStatus::NoCusp,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("NUL bytes removed"));
}

struct Failure(QdStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure((&e).into(), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(QdStatus::NullPointer, format!("{what} is NULL"))
}

/// Runs `body`, translating errors and panics into a status code.
fn guarded(body: impl FnOnce() -> Result<(), Failure>) -> QdStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            QdStatus::Ok
        }
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
            QdStatus::Panic
        }
    }
}

fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null and, per the API contract, valid for writes of T.
    unsafe { out.write(value) };
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
///
/// The pointer stays valid until the next `qd_*` call on the same thread.
#[no_mangle]
pub extern "C" fn qd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qd_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// The q-number `[x]` for deformation `q > 0`.
#[no_mangle]
pub extern "C" fn qd_q_number(x: f64, q: f64, out: *mut f64) -> QdStatus {
    guarded(|| write(out, qmath::q_number(x, QParams::new(q)?)?, "out"))
}

/// `ln [n choose m]_q`; `-inf` outside `0 <= m <= n`.
#[no_mangle]
pub extern "C" fn qd_ln_q_binomial(n: i64, m: i64, q: f64, out: *mut f64) -> QdStatus {
    guarded(|| write(out, qmath::ln_q_binomial(n, m, QParams::new(q)?)?, "out"))
}

/// Schmidt weights `p_l`, `l = 0..=L`, of `|N,k>_q` across the cut after site `L`.
///
/// `out` must hold `capacity >= L + 1` doubles.
#[no_mangle]
pub extern "C" fn qd_schmidt_spectrum(
    n: usize,
    k: usize,
    l: usize,
    q: f64,
    out: *mut f64,
    capacity: usize,
) -> QdStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let sp = schmidt_spectrum(DickeState::new(n, k)?, Bipartition::new(l), QParams::new(q)?)?;
        let probs = sp.probs();
        if capacity < probs.len() {
            return Err(Failure(
                QdStatus::BufferTooSmall,
                format!("need {} entries, buffer holds {capacity}", probs.len()),
            ));
        }
        // SAFETY: out is non-null and holds at least `capacity` doubles.
        unsafe { ptr::copy_nonoverlapping(probs.as_ptr(), out, probs.len()) };
        Ok(())
    })
}

/// Entanglement entropy in bits of `|N,k>_q` across the cut after site `L`.
#[no_mangle]
pub extern "C" fn qd_basis_entropy(n: usize, k: usize, l: usize, q: f64, out: *mut f64) -> QdStatus {
    guarded(|| write(out, basis_entropy(DickeState::new(n, k)?, Bipartition::new(l), QParams::new(q)?)?, "out"))
}

/// Mean-field critical field of the q-LMG model at coupling 1.
#[no_mangle]
pub extern "C" fn qd_mean_field_hc(n: usize, q: f64, out: *mut f64) -> QdStatus {
    guarded(|| write(out, qlmg::mean_field_hc(n, QParams::new(q)?), "out"))
}

/// Opaque superposition `sum_k alpha_k |N,k>_q`.
pub struct QdState {
    inner: QuasiSymmetricState,
}

/// Copies `len = N + 1` normalized amplitudes into a new state handle.
#[no_mangle]
pub extern "C" fn qd_state_new(alphas: *const f64, len: usize, out: *mut *mut QdState) -> QdStatus {
    guarded(|| {
        if alphas.is_null() {
            return Err(null("alphas"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: alphas is non-null and points at `len` doubles.
        let values = unsafe { std::slice::from_raw_parts(alphas, len) }.to_vec();
        let state = QuasiSymmetricState::new(values)?;
        write(out, Box::into_raw(Box::new(QdState { inner: state })), "out")
    })
}

/// Releases a state; NULL is ignored.
#[no_mangle]
pub extern "C" fn qd_state_free(state: *mut QdState) {
    if !state.is_null() {
        // SAFETY: created by qd_state_new and not freed before.
        drop(unsafe { Box::from_raw(state) });
    }
}

/// Number of qubits `N` of a state.
#[no_mangle]
pub extern "C" fn qd_state_n(state: *const QdState, out: *mut usize) -> QdStatus {
    guarded(|| {
        // SAFETY: a live handle from qd_state_new, or NULL.
        let state = unsafe { state.as_ref() }.ok_or_else(|| null("state"))?;
        write(out, state.inner.n(), "out")
    })
}

/// Entanglement entropy in bits of a state across the cut after site `L`.
#[no_mangle]
pub extern "C" fn qd_state_entropy(state: *const QdState, l: usize, q: f64, out: *mut f64) -> QdStatus {
    guarded(|| {
        // SAFETY: a live handle from qd_state_new, or NULL.
        let state = unsafe { state.as_ref() }.ok_or_else(|| null("state"))?;
        let s = qdicke::qstate::state_entropy(&state.inner, Bipartition::new(l), QParams::new(q)?)?;
        write(out, s, "out")
    })
}

/// One field point of a sweep. Failed points have `ok == 0` and NaN values.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QdSweepRow {
    pub h: f64,
    pub ground_energy: f64,
    pub entropy_bits: f64,
    pub gap: f64,
    pub degenerate: bool,
    pub ok: bool,
}

/// Critical field located on a sweep.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QdCusp {
    pub h_c: f64,
    pub confidence: f64,
    pub step: f64,
}

/// Opaque result of `qd_lmg_sweep`.
pub struct QdSweep {
    result: SweepResult,
    cusp: Result<CuspEstimate, Error>,
}

/// Ground-state entropy of the q-LMG model on `steps` evenly spaced fields
/// in `[h_min, h_max]`, with cusp detection and one refinement level.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub extern "C" fn qd_lmg_sweep(
    n: usize,
    l: usize,
    q: f64,
    h_min: f64,
    h_max: f64,
    steps: usize,
    lambda: f64,
    out: *mut *mut QdSweep,
) -> QdStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let template = LmgModel::new(n, 0.0, lambda, QParams::new(q)?)?;
        qlmg::build_sector_hamiltonian(&template.with_field(1.0)?)?;
        let grid = qlmg::uniform_grid(h_min, h_max, steps)?;
        let (result, cusp) = qlmg::locate_cusp(&template, Bipartition::new(l), &grid)?;
        write(out, Box::into_raw(Box::new(QdSweep { result, cusp })), "out")
    })
}

/// Releases a sweep; NULL is ignored.
#[no_mangle]
pub extern "C" fn qd_sweep_free(sweep: *mut QdSweep) {
    if !sweep.is_null() {
        // SAFETY: created by qd_lmg_sweep and not freed before.
        drop(unsafe { Box::from_raw(sweep) });
    }
}

/// Number of rows in a sweep.
#[no_mangle]
pub extern "C" fn qd_sweep_len(sweep: *const QdSweep, out: *mut usize) -> QdStatus {
    guarded(|| {
        // SAFETY: a live handle from qd_lmg_sweep, or NULL.
        let sweep = unsafe { sweep.as_ref() }.ok_or_else(|| null("sweep"))?;
        write(out, sweep.result.rows.len(), "out")
    })
}

/// Row `index` of a sweep, in increasing field order.
#[no_mangle]
pub extern "C" fn qd_sweep_row(sweep: *const QdSweep, index: usize, out: *mut QdSweepRow) -> QdStatus {
    guarded(|| {
        // SAFETY: a live handle from qd_lmg_sweep, or NULL.
        let sweep = unsafe { sweep.as_ref() }.ok_or_else(|| null("sweep"))?;
        let rows = &sweep.result.rows;
        let row = rows.get(index).ok_or_else(|| {
            Failure(QdStatus::IndexOutOfRange, format!("row {index} of a sweep with {} rows", rows.len()))
        })?;
        write(
            out,
            QdSweepRow {
                h: row.h,
                ground_energy: row.ground_energy,
                entropy_bits: row.entropy,
                gap: row.gap,
                degenerate: row.degenerate,
                ok: row.is_valid(),
            },
            "out",
        )
    })
}

/// The detected cusp, or `QD_STATUS_NO_CUSP` when the curve has none.
#[no_mangle]
pub extern "C" fn qd_sweep_cusp(sweep: *const QdSweep, out: *mut QdCusp) -> QdStatus {
    guarded(|| {
        // SAFETY: a live handle from qd_lmg_sweep, or NULL.
        let sweep = unsafe { sweep.as_ref() }.ok_or_else(|| null("sweep"))?;
        let c = sweep.cusp.clone()?;
        write(out, QdCusp { h_c: c.h_c, confidence: c.confidence, step: c.step }, "out")
    })
}
