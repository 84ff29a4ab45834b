//! C interface. Every function returns a `KncStatus`; results go through out
//! pointers. Handles and strings returned to the caller must be released with
//! `knc_series_free` and `knc_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kncross::asymptotics;
use kncross::structures::{build_family, Family, ModelSeries, Params};
use kncross::Error;
use num_bigint::BigInt;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KncStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    Overflow = 4,
    Numeric = 5,
    Panic = 6,
}

/// Opaque counting series.
pub struct KncSeries {
    inner: ModelSeries,
    counts: Vec<BigInt>,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KncSkeletonConstants {
    pub r: f64,
    pub c: f64,
    pub eta: f64,
    pub c_prime: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn from_error(e: Error) -> KncStatus {
    let status = match e {
        Error::InvalidParameter(_) | Error::Parse(_) | Error::OracleLimit { .. } => KncStatus::InvalidArgument,
        _ => KncStatus::Numeric,
    };
    set_error(e.to_string());
    status
}

fn guard(f: impl FnOnce() -> Result<(), KncStatus>) -> KncStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KncStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            KncStatus::Panic
        }
    }
}

fn null<T>(p: *const T, what: &str) -> Result<(), KncStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        Err(KncStatus::NullPointer)
    } else {
        Ok(())
    }
}

fn opt(v: u32) -> Option<usize> {
    (v != 0).then_some(v as usize)
}

fn into_c_string(s: String, out: *mut *mut c_char) -> Result<(), KncStatus> {
    let c = CString::new(s).map_err(|_| KncStatus::Numeric)?;
    // SAFETY: caller checked `out` for null.
    unsafe { *out = c.into_raw() };
    Ok(())
}

/// Builds the counting series of `family` (for example "modular") to `order`.
/// `k`, `lambda` and `tau` of 0 select the family default.
///
/// # Safety
/// `family` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn knc_series_build(
    family: *const c_char,
    k: u32,
    lambda: u32,
    tau: u32,
    order: usize,
    out: *mut *mut KncSeries,
) -> KncStatus {
    guard(|| {
        null(family, "family")?;
        null(out, "out")?;
        let name = CStr::from_ptr(family).to_str().map_err(|_| {
            set_error("family is not UTF-8");
            KncStatus::InvalidArgument
        })?;
        let fam: Family = name.parse().map_err(from_error)?;
        if tau != 0 {
            let fixed = match fam {
                Family::Modular => 2,
                Family::CanonicalSkeleton | Family::ArcBivariate => 3,
                _ => 1,
            };
            if tau as usize != fixed {
                set_error(format!("{fam} has stack length at least {fixed}"));
                return Err(KncStatus::InvalidArgument);
            }
        }
        let params = Params { k: opt(k), lambda: opt(lambda), tau: opt(tau) };
        let inner = build_family(fam, params, order).map_err(from_error)?;
        let counts = inner.counts().map_err(from_error)?;
        *out = Box::into_raw(Box::new(KncSeries { inner, counts }));
        Ok(())
    })
}

/// # Safety
/// `series` must come from `knc_series_build` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn knc_series_free(series: *mut KncSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// # Safety
/// `series` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn knc_series_order(series: *const KncSeries, out: *mut usize) -> KncStatus {
    guard(|| {
        null(series, "series")?;
        null(out, "out")?;
        *out = (*series).inner.order();
        Ok(())
    })
}

unsafe fn coeff<'a>(series: *const KncSeries, n: usize) -> Result<&'a BigInt, KncStatus> {
    null(series, "series")?;
    let series = &*series;
    series.counts.get(n).ok_or_else(|| {
        set_error(format!("index {n} exceeds the truncation order"));
        KncStatus::OutOfRange
    })
}

/// Coefficient `n` as an unsigned 64-bit integer; `KNC_STATUS_OVERFLOW` if
/// it does not fit (use `knc_series_coeff_string` instead).
///
/// # Safety
/// `series` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn knc_series_coeff_u64(series: *const KncSeries, n: usize, out: *mut u64) -> KncStatus {
    guard(|| {
        null(out, "out")?;
        let c = coeff(series, n)?;
        *out = u64::try_from(c).map_err(|_| {
            set_error(format!("coefficient {n} does not fit in 64 bits"));
            KncStatus::Overflow
        })?;
        Ok(())
    })
}

/// Coefficient `n` in decimal. Free the result with `knc_string_free`.
///
/// # Safety
/// `series` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn knc_series_coeff_string(series: *const KncSeries, n: usize, out: *mut *mut c_char) -> KncStatus {
    guard(|| {
        null(out, "out")?;
        let c = coeff(series, n)?;
        into_c_string(c.to_string(), out)
    })
}

/// The series as CSV (`family,params,n,coefficient`). Free with `knc_string_free`.
///
/// # Safety
/// `series` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn knc_series_csv(series: *const KncSeries, out: *mut *mut c_char) -> KncStatus {
    guard(|| {
        null(series, "series")?;
        null(out, "out")?;
        into_c_string((*series).inner.to_csv(), out)
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn knc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Exponential growth rate 1/γ_k of modular diagrams, k in 2..=9 or larger.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn knc_modular_growth_rate(k: u32, out: *mut f64) -> KncStatus {
    guard(|| {
        null(out, "out")?;
        *out = match k {
            0 | 1 => {
                set_error("k must be at least 2");
                return Err(KncStatus::InvalidArgument);
            }
            2 => asymptotics::gamma2().map_err(from_error)?.1,
            _ => asymptotics::modular_growth_table([k as usize]).map_err(from_error)?[0].growth,
        };
        Ok(())
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn knc_skeleton_constants(out: *mut KncSkeletonConstants) -> KncStatus {
    guard(|| {
        null(out, "out")?;
        let c = asymptotics::skeleton_constants().map_err(from_error)?;
        *out = KncSkeletonConstants { r: c.r_closed, c: c.c, eta: c.eta.gamma, c_prime: c.c_prime };
        Ok(())
    })
}

/// Mean and variance constants of the arc count of canonical skeleton diagrams.
///
/// # Safety
/// `mu` and `sigma2` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn knc_clt_params(mu: *mut f64, sigma2: *mut f64) -> KncStatus {
    guard(|| {
        null(mu, "mu")?;
        null(sigma2, "sigma2")?;
        let p = asymptotics::clt_params().map_err(from_error)?;
        *mu = p.mu;
        *sigma2 = p.sigma2;
        Ok(())
    })
}

/// Message for the last failed call on this thread, or null. Free with
/// `knc_string_free`.
#[no_mangle]
pub extern "C" fn knc_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow_mut().take().map_or(ptr::null_mut(), CString::into_raw))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn knc_status_str(status: KncStatus) -> *const c_char {
    let s: &'static CStr = match status {
        KncStatus::Ok => c"ok",
        KncStatus::NullPointer => c"null pointer",
        KncStatus::InvalidArgument => c"invalid argument",
        KncStatus::OutOfRange => c"index out of range",
        KncStatus::Overflow => c"value does not fit",
        KncStatus::Numeric => c"numeric failure",
        KncStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}
