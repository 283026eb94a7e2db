//! C ABI over `hermite-fock`.
//!
//! Every entry point returns an [`HfStatus`]. On failure the message is kept
//! per thread and can be copied out with [`hf_last_error_message`]. Matrices
//! are written row-major into caller-owned buffers of [`HfComplex`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hermite_fock::unitary::{self, derive_ordering};
use hermite_fock::{
    hlpoly, state, BosonicParams, Complex64, ComplexMatrix, FockError, OrderingParams, StateDerived, StateParams,
};

/// Status codes. `HF_OK` is zero; everything else is an error.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HfStatus {
    Ok = 0,
    NullPointer = 1,
    IndexOutOfBounds = 2,
    Singular = 3,
    NonConvergent = 4,
    Domain = 5,
    InvalidParameter = 6,
    NormOverflow = 7,
    Dimension = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// Complex number with the layout of C99 `double _Complex`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HfComplex {
    pub re: f64,
    pub im: f64,
}

impl From<HfComplex> for Complex64 {
    fn from(c: HfComplex) -> Self {
        Complex64::new(c.re, c.im)
    }
}

impl From<Complex64> for HfComplex {
    fn from(c: Complex64) -> Self {
        HfComplex { re: c.re, im: c.im }
    }
}

/// Gaussian unitary `S(z) D(α) R(φ)` with its normal-ordering data.
pub struct HfUnitary {
    params: BosonicParams,
    ordering: OrderingParams,
}

/// Noisy Gaussian state with its factorization data.
pub struct HfState {
    params: StateParams,
    derived: StateDerived,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &FockError) -> HfStatus {
    match err {
        FockError::IndexOutOfBounds { .. } => HfStatus::IndexOutOfBounds,
        FockError::Singular(_) => HfStatus::Singular,
        FockError::NonConvergent { .. } => HfStatus::NonConvergent,
        FockError::Domain(_) => HfStatus::Domain,
        FockError::InvalidParameter(_) => HfStatus::InvalidParameter,
        FockError::NormOverflow(_) => HfStatus::NormOverflow,
        FockError::Dimension(_) => HfStatus::Dimension,
    }
}

struct Failure(HfStatus, String);

impl From<FockError> for Failure {
    fn from(err: FockError) -> Self {
        Failure(status_of(&err), err.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(HfStatus::NullPointer, format!("`{name}` is null"))
}

/// Runs `f`, records any error and converts panics into `HfStatus::Panic`.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            HfStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            HfStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, name: &str, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_matrix(m: &ComplexMatrix, out: *mut HfComplex, len: usize) -> Result<(), Failure> {
    let data = m.as_slice();
    if out.is_null() {
        return Err(null("out"));
    }
    if len < data.len() {
        return Err(Failure(HfStatus::BufferTooSmall, format!("buffer holds {len} entries, {} needed", data.len())));
    }
    for (i, &c) in data.iter().enumerate() {
        out.add(i).write(c.into());
    }
    Ok(())
}

unsafe fn handle<'a, T>(h: *const T) -> Result<&'a T, Failure> {
    h.as_ref().ok_or_else(|| null("handle"))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL, or
/// 0 when there is no pending error.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn hf_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                buf.add(n).write(0);
            }
            bytes.len()
        }
    })
}

/// `H_n(x, y)`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hf_hkdf(n: usize, x: HfComplex, y: HfComplex, out: *mut HfComplex) -> HfStatus {
    guard(|| write(out, "out", hlpoly::hkdf(n, x.into(), y.into())?.into()))
}

/// `H_n(x, y) / n!`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hf_hkdf_scaled(n: usize, x: HfComplex, y: HfComplex, out: *mut HfComplex) -> HfStatus {
    guard(|| write(out, "out", hlpoly::hkdf_scaled(n, x.into(), y.into())?.into()))
}

/// Two-index polynomial `H_{m,n}(x,y; z,u | tau)`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn hf_hkdf2(
    m: usize,
    n: usize,
    x: HfComplex,
    y: HfComplex,
    z: HfComplex,
    u: HfComplex,
    tau: HfComplex,
    out: *mut HfComplex,
) -> HfStatus {
    guard(|| write(out, "out", hlpoly::hkdf2(m, n, x.into(), y.into(), z.into(), u.into(), tau.into())?.into()))
}

/// Creates a unitary handle. Free it with [`hf_unitary_free`].
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hf_unitary_new(
    alpha: HfComplex,
    phi: f64,
    r: f64,
    theta: f64,
    out: *mut *mut HfUnitary,
) -> HfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let params = BosonicParams::new(alpha.into(), phi, r, theta)?;
        let h = Box::new(HfUnitary { params, ordering: derive_ordering(&params) });
        out.write(Box::into_raw(h));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or come from [`hf_unitary_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hf_unitary_free(h: *mut HfUnitary) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// `<m| U |n>`.
///
/// # Safety
/// `h` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hf_unitary_coeff(h: *const HfUnitary, m: usize, n: usize, out: *mut HfComplex) -> HfStatus {
    guard(|| {
        let h = handle(h)?;
        write(out, "out", unitary::unitary_coeff(m, n, &h.ordering)?.into())
    })
}

/// `dim x dim` block of `U`, row-major, into `out[0..len]`.
///
/// # Safety
/// `h` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn hf_unitary_matrix(
    h: *const HfUnitary,
    dim: usize,
    out: *mut HfComplex,
    len: usize,
) -> HfStatus {
    guard(|| {
        let h = handle(h)?;
        write_matrix(&unitary::unitary_matrix(&h.params, dim)?, out, len)
    })
}

/// Creates a state handle. Free it with [`hf_state_free`].
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hf_state_new(
    alpha: HfComplex,
    r: f64,
    theta: f64,
    nbar: f64,
    out: *mut *mut HfState,
) -> HfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let params = StateParams::new(alpha.into(), r, theta, nbar)?;
        let derived = state::derive_state(&params)?;
        out.write(Box::into_raw(Box::new(HfState { params, derived })));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or come from [`hf_state_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hf_state_free(h: *mut HfState) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// `ρ_{m,n}`.
///
/// # Safety
/// `h` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hf_state_coeff(h: *const HfState, m: usize, n: usize, out: *mut HfComplex) -> HfStatus {
    guard(|| {
        let h = handle(h)?;
        write(out, "out", state::rho_coeff_derived(m, n, &h.derived)?.into())
    })
}

/// `dim x dim` block of `ρ`, row-major, into `out[0..len]`.
///
/// # Safety
/// `h` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn hf_state_matrix(h: *const HfState, dim: usize, out: *mut HfComplex, len: usize) -> HfStatus {
    guard(|| {
        let h = handle(h)?;
        write_matrix(&state::rho_matrix_from_derived(&h.derived, dim)?, out, len)
    })
}

/// Photon-number probabilities `ρ_{m,m}` for `m = 0..=m_max` into
/// `probs[0..len]`; their sum goes to `partial_trace` when it is non-null.
///
/// # Safety
/// `h` must be a live handle, `probs` valid for `len` writes and
/// `partial_trace` null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hf_state_photons(
    h: *const HfState,
    m_max: usize,
    probs: *mut f64,
    len: usize,
    partial_trace: *mut f64,
) -> HfStatus {
    guard(|| {
        let h = handle(h)?;
        if probs.is_null() {
            return Err(null("probs"));
        }
        if len <= m_max {
            return Err(Failure(HfStatus::BufferTooSmall, format!("buffer holds {len} entries, {} needed", m_max + 1)));
        }
        let dist = state::photon_distribution(&h.params, m_max)?;
        for (i, &p) in dist.probabilities.iter().enumerate() {
            probs.add(i).write(p);
        }
        if !partial_trace.is_null() {
            partial_trace.write(dist.partial_trace);
        }
        Ok(())
    })
}
