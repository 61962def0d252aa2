//! C ABI over `hypjac`.
//!
//! Parameters and spectra live behind opaque handles created by `*_new` and
//! released by `*_free`. Every fallible call returns an [`HjStatus`]; the
//! message of the most recent failure on the calling thread is available
//! through [`hj_last_error_message`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hypjac::cfrac::cf_ratio_eval;
use hypjac::classify::{leading_block_signature, sign_signature};
use hypjac::hyp::{hyp2f1_series, validate_params};
use hypjac::spectral::{b_function, discrete_spectrum, spectral_to_hyp, Method, SpectralResult};
use hypjac::{Complex64, Error, HypParams};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HjStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameters = 2,
    OutsideDomain = 3,
    NoConvergence = 4,
    Singular = 5,
    EigensolverFailure = 6,
    NotApplicable = 7,
    Terminating = 8,
    ScanExhausted = 9,
    InvalidArgument = 10,
    BufferTooSmall = 11,
    Panic = 12,
}

/// Evaluation route for [`hj_b_function`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HjMethod {
    ContinuedFraction = 0,
    Resolvent = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HjComplex {
    pub re: f64,
    pub im: f64,
}

impl From<HjComplex> for Complex64 {
    fn from(z: HjComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl From<Complex64> for HjComplex {
    fn from(z: Complex64) -> Self {
        HjComplex { re: z.re, im: z.im }
    }
}

/// Opaque validated parameter triple.
pub struct HjParams(HypParams);

/// Opaque spectral result.
pub struct HjSpectrum(SpectralResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HjStatus {
    match e {
        Error::CNonpositiveInteger { .. } | Error::NonFiniteParameter { .. } => HjStatus::InvalidParameters,
        Error::OutsideDisk { .. } | Error::OnCut { .. } | Error::OnBand { .. } => HjStatus::OutsideDomain,
        Error::NoConvergence { .. } => HjStatus::NoConvergence,
        Error::DenominatorZero { .. }
        | Error::PoleOfApproximant { .. }
        | Error::NearSingular { .. }
        | Error::NearPole { .. } => HjStatus::Singular,
        Error::EigensolverFailure { .. } => HjStatus::EigensolverFailure,
        Error::ShiftInvalid
        | Error::NotRealParams
        | Error::NotStieltjes
        | Error::DegenerateNormalization
        | Error::OrderBelowStabilization { .. } => HjStatus::NotApplicable,
        Error::Terminating { .. } => HjStatus::Terminating,
        Error::ScanExhausted { .. } => HjStatus::ScanExhausted,
        Error::DegenerateSamples | Error::InvalidArgument(_) => HjStatus::InvalidArgument,
    }
}

fn fail(status: HjStatus, message: impl Into<String>) -> HjStatus {
    set_error(message.into());
    status
}

/// Runs `f`, turning library errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), HjStatus>) -> HjStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HjStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(HjStatus::Panic, "internal panic"),
    }
}

fn lib(e: Error) -> HjStatus {
    fail(status_of(&e), e.to_string())
}

unsafe fn params_ref<'a>(p: *const HjParams) -> Result<&'a HypParams, HjStatus> {
    p.as_ref()
        .map(|h| &h.0)
        .ok_or_else(|| fail(HjStatus::NullPointer, "null parameter handle"))
}

unsafe fn spectrum_ref<'a>(s: *const HjSpectrum) -> Result<&'a SpectralResult, HjStatus> {
    s.as_ref()
        .map(|h| &h.0)
        .ok_or_else(|| fail(HjStatus::NullPointer, "null spectrum handle"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), HjStatus> {
    if out.is_null() {
        return Err(fail(HjStatus::NullPointer, "null output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_slice<T: Copy>(values: &[T], buf: *mut T, cap: usize, len_out: *mut usize) -> Result<(), HjStatus> {
    write_out(len_out, values.len())?;
    if values.len() > cap {
        return Err(fail(
            HjStatus::BufferTooSmall,
            format!("need {} entries, have {cap}", values.len()),
        ));
    }
    if !values.is_empty() {
        if buf.is_null() {
            return Err(fail(HjStatus::NullPointer, "null output buffer"));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    }
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hj_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `cap`). Returns the full message length without the NUL, or
/// 0 when no error has been recorded.
#[no_mangle]
pub unsafe extern "C" fn hj_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Validates `(a, b, c)` and stores a new handle in `*out`.
#[no_mangle]
pub unsafe extern "C" fn hj_params_new(a: HjComplex, b: HjComplex, c: HjComplex, out: *mut *mut HjParams) -> HjStatus {
    guard(|| {
        let p = validate_params(a.into(), b.into(), c.into()).map_err(lib)?;
        write_out(out, Box::into_raw(Box::new(HjParams(p))))
    })
}

/// Releases a handle from [`hj_params_new`]. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hj_params_free(p: *mut HjParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Whether all three parameters are real.
#[no_mangle]
pub unsafe extern "C" fn hj_params_is_real(p: *const HjParams) -> bool {
    p.as_ref().is_some_and(|h| h.0.is_real)
}

/// `F(a, b, c; z)` by the direct series (inside the disk, or polynomial).
#[no_mangle]
pub unsafe extern "C" fn hj_series(p: *const HjParams, z: HjComplex, tol: f64, out: *mut HjComplex) -> HjStatus {
    guard(|| {
        let p = params_ref(p)?;
        let v = hyp2f1_series(p, z.into(), tol, 1_000_000).map_err(lib)?;
        write_out(out, v.value.into())
    })
}

/// `F(a, b, c; z) / F(a, b + 1, c + 1; z)` by the continued fraction.
#[no_mangle]
pub unsafe extern "C" fn hj_cf_ratio(p: *const HjParams, z: HjComplex, tol: f64, out: *mut HjComplex) -> HjStatus {
    guard(|| {
        let p = params_ref(p)?;
        let v = cf_ratio_eval(p, z.into(), tol, 1 << 22).map_err(lib)?;
        write_out(out, v.value.into())
    })
}

/// The m-function `B(a, b, c; z)` off `[-2, 2]`.
#[no_mangle]
pub unsafe extern "C" fn hj_b_function(
    p: *const HjParams,
    z: HjComplex,
    method: HjMethod,
    tol: f64,
    out: *mut HjComplex,
) -> HjStatus {
    guard(|| {
        let p = params_ref(p)?;
        let m = match method {
            HjMethod::ContinuedFraction => Method::Cf,
            HjMethod::Resolvent => Method::Resolvent,
        };
        let v = b_function(p, z.into(), m, tol).map_err(lib)?;
        write_out(out, v.into())
    })
}

/// Discrete spectrum from truncations of order `n` and `2n`.
#[no_mangle]
pub unsafe extern "C" fn hj_spectrum_new(
    p: *const HjParams,
    n: usize,
    tol: f64,
    out: *mut *mut HjSpectrum,
) -> HjStatus {
    guard(|| {
        let p = params_ref(p)?;
        let s = discrete_spectrum(p, n, tol).map_err(lib)?;
        write_out(out, Box::into_raw(Box::new(HjSpectrum(s))))
    })
}

/// Releases a handle from [`hj_spectrum_new`]. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hj_spectrum_free(s: *mut HjSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of retained eigenvalues, 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn hj_spectrum_len(s: *const HjSpectrum) -> usize {
    s.as_ref().map_or(0, |h| h.0.eigenvalues.len())
}

/// Copies the eigenvalues into `buf`; `*len_out` always receives the count.
#[no_mangle]
pub unsafe extern "C" fn hj_spectrum_eigenvalues(
    s: *const HjSpectrum,
    buf: *mut HjComplex,
    cap: usize,
    len_out: *mut usize,
) -> HjStatus {
    guard(|| {
        let s = spectrum_ref(s)?;
        let v: Vec<HjComplex> = s.eigenvalues.iter().map(|l| (*l).into()).collect();
        write_slice(&v, buf, cap, len_out)
    })
}

/// Hypergeometric zeros `w = -4/(λ - 2)` of the retained eigenvalues.
#[no_mangle]
pub unsafe extern "C" fn hj_spectrum_zeros(
    s: *const HjSpectrum,
    buf: *mut HjComplex,
    cap: usize,
    len_out: *mut usize,
) -> HjStatus {
    guard(|| {
        let s = spectrum_ref(s)?;
        let v: Vec<HjComplex> = s.eigenvalues.iter().map(|l| spectral_to_hyp(*l).into()).collect();
        write_slice(&v, buf, cap, len_out)
    })
}

/// `Σ dist(λ, [-2, 2])` and the trace-norm bound it must not exceed.
#[no_mangle]
pub unsafe extern "C" fn hj_spectrum_bounds(
    s: *const HjSpectrum,
    distance_sum: *mut f64,
    trace_bound: *mut f64,
) -> HjStatus {
    guard(|| {
        let s = spectrum_ref(s)?;
        write_out(distance_sum, s.distance_sum)?;
        write_out(trace_bound, s.trace_bound)
    })
}

/// Sign signature of a real triple. Terminating fractions yield the
/// signature of their leading block when `allow_terminating` is set.
#[no_mangle]
pub unsafe extern "C" fn hj_sign_signature(
    p: *const HjParams,
    scan_limit: usize,
    allow_terminating: bool,
    n_out: *mut usize,
    kappa_out: *mut usize,
    epsilons: *mut i8,
    cap: usize,
    len_out: *mut usize,
) -> HjStatus {
    guard(|| {
        let p = params_ref(p)?;
        let sig = if allow_terminating {
            leading_block_signature(p, scan_limit)
        } else {
            sign_signature(p, scan_limit)
        }
        .map_err(lib)?;
        write_out(n_out, sig.n)?;
        write_out(kappa_out, sig.kappa)?;
        write_slice(&sig.epsilons, epsilons, cap, len_out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> HjComplex {
        HjComplex { re, im }
    }

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&Error::NotRealParams), HjStatus::NotApplicable);
        assert_eq!(status_of(&Error::Terminating { index: 1 }), HjStatus::Terminating);
        assert_eq!(
            status_of(&Error::NearPole {
                z: Complex64::new(0.0, 0.0)
            }),
            HjStatus::Singular
        );
    }

    #[test]
    fn null_handles() {
        unsafe {
            let mut out = HjComplex::default();
            assert_eq!(
                hj_b_function(ptr::null(), c(4.0, 0.0), HjMethod::ContinuedFraction, 1e-12, &mut out),
                HjStatus::NullPointer
            );
            assert_eq!(hj_spectrum_len(ptr::null()), 0);
            hj_params_free(ptr::null_mut());
            hj_spectrum_free(ptr::null_mut());
        }
    }
}
