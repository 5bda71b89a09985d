//! C ABI over `robust-reserve`.
//!
//! Settings and distributions cross the boundary as opaque handles. Settings
//! come from `rr_setting_bounded` or `rr_setting_variance`, distributions from
//! `rr_distribution_from_json` or `rr_maxmin`; release them with the matching
//! `*_free`.
//! Every fallible call returns an [`RrStatus`]; on failure the message is
//! available from [`rr_last_error`] on the same thread. Panics are caught and
//! reported as [`RrStatus::Panic`].
//!
//! Strings returned to the caller are owned by it and must be released with
//! [`rr_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use robust_reserve::asymptotics::alpha_n;
use robust_reserve::simulate::monte_carlo_revenue;
use robust_reserve::solution::threat_revenue;
use robust_reserve::variance::gamma_n;
use robust_reserve::{expected_revenue, maxmin, AuctionSetting, Distribution, Error, TieRule};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidSetting = 2,
    InvalidDistribution = 3,
    InvalidArgument = 4,
    OutOfDomain = 5,
    Numerical = 6,
    Serialization = 7,
    InvalidUtf8 = 8,
    Panic = 9,
}

/// Tie rule for an atom exactly at the reserve.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RrTieRule {
    NoSaleAtReserve = 0,
    SaleAtReserve = 1,
}

impl From<RrTieRule> for TieRule {
    fn from(t: RrTieRule) -> Self {
        match t {
            RrTieRule::NoSaleAtReserve => TieRule::NoSaleAtReserve,
            RrTieRule::SaleAtReserve => TieRule::SaleAtReserve,
        }
    }
}

/// Opaque auction setting.
pub struct RrSetting(AuctionSetting);

/// Opaque value distribution.
pub struct RrDistribution(Distribution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> RrStatus {
    match e {
        Error::InvalidSetting(_) | Error::WrongConstraint(_) => RrStatus::InvalidSetting,
        Error::InvalidDistribution(_) => RrStatus::InvalidDistribution,
        Error::InvalidArgument(_) | Error::InfeasibleConfig(_) => RrStatus::InvalidArgument,
        Error::RhoOutOfRange { .. } | Error::QuantileDomain { .. } => RrStatus::OutOfDomain,
        Error::Numerical(_) | Error::Quadrature { .. } => RrStatus::Numerical,
        Error::Serialization(_) => RrStatus::Serialization,
    }
}

/// Runs `body`, translating errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), RrStatus>) -> RrStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => RrStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            RrStatus::Panic
        }
    }
}

trait IntoStatus<T> {
    fn status(self) -> Result<T, RrStatus>;
}

impl<T> IntoStatus<T> for robust_reserve::Result<T> {
    fn status(self) -> Result<T, RrStatus> {
        self.map_err(|e| {
            set_error(e.to_string());
            status_of(&e)
        })
    }
}

fn null(what: &str) -> RrStatus {
    set_error(format!("{what} is null"));
    RrStatus::NullPointer
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, RrStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), RrStatus> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Writes a value allocated only once `out` is known to be usable.
unsafe fn write_with<T>(out: *mut T, what: &str, make: impl FnOnce() -> Result<T, RrStatus>) -> Result<(), RrStatus> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(make()?);
    Ok(())
}

fn to_c_string(s: String) -> Result<*mut c_char, RrStatus> {
    CString::new(s).map(CString::into_raw).map_err(|e| {
        set_error(e.to_string());
        RrStatus::Serialization
    })
}

/// Message for the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn rr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Setting with values in `[0, vmax]`.
///
/// # Safety
/// `out` must be null or point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn rr_setting_bounded(
    bidders: u32,
    cost: f64,
    mean: f64,
    vmax: f64,
    out: *mut *mut RrSetting,
) -> RrStatus {
    guard(|| {
        let s = AuctionSetting::bounded(bidders, cost, mean, vmax).status()?;
        write_with(out, "out", || Ok(Box::into_raw(Box::new(RrSetting(s)))))
    })
}

/// Setting with variance at most `sigma^2`.
///
/// # Safety
/// `out` must be null or point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn rr_setting_variance(
    bidders: u32,
    cost: f64,
    mean: f64,
    sigma: f64,
    out: *mut *mut RrSetting,
) -> RrStatus {
    guard(|| {
        let s = AuctionSetting::variance(bidders, cost, mean, sigma).status()?;
        write_with(out, "out", || Ok(Box::into_raw(Box::new(RrSetting(s)))))
    })
}

/// # Safety
/// `setting` must be null or a handle from `rr_setting_*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rr_setting_free(setting: *mut RrSetting) {
    if !setting.is_null() {
        drop(Box::from_raw(setting));
    }
}

/// Maxmin revenue, uniqueness of the maxmin price and the worst-case distribution.
///
/// `worst_case` may be null when the distribution is not wanted.
///
/// # Safety
/// `setting` must be a live handle; output pointers must be writable or, for `worst_case`, null.
#[no_mangle]
pub unsafe extern "C" fn rr_maxmin(
    setting: *const RrSetting,
    revenue: *mut f64,
    unique: *mut bool,
    worst_case: *mut *mut RrDistribution,
) -> RrStatus {
    guard(|| {
        let s = deref(setting, "setting")?;
        if revenue.is_null() || unique.is_null() {
            return Err(null("revenue or unique"));
        }
        let sol = maxmin(&s.0).status()?;
        write(revenue, sol.maxmin_revenue, "revenue")?;
        write(unique, sol.unique, "unique")?;
        if !worst_case.is_null() {
            worst_case.write(Box::into_raw(Box::new(RrDistribution(sol.worst_case))));
        }
        Ok(())
    })
}

/// Full maxmin solution as a JSON document.
///
/// # Safety
/// `setting` must be a live handle and `out` writable; free the string with `rr_string_free`.
#[no_mangle]
pub unsafe extern "C" fn rr_maxmin_json(setting: *const RrSetting, out: *mut *mut c_char) -> RrStatus {
    guard(|| {
        let s = deref(setting, "setting")?;
        let sol = maxmin(&s.0).status()?;
        let text = serde_json::to_string(&sol).map_err(|e| {
            set_error(e.to_string());
            RrStatus::Serialization
        })?;
        write_with(out, "out", || to_c_string(text))
    })
}

/// Revenue at reserve `r` under the threat distribution for `r`.
///
/// # Safety
/// `setting` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rr_threat_revenue(setting: *const RrSetting, r: f64, out: *mut f64) -> RrStatus {
    guard(|| {
        let s = deref(setting, "setting")?;
        write(out, threat_revenue(r, &s.0).status()?, "out")
    })
}

/// Parses a distribution from its JSON form.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rr_distribution_from_json(json: *const c_char, out: *mut *mut RrDistribution) -> RrStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| {
            set_error(e.to_string());
            RrStatus::InvalidUtf8
        })?;
        let d = Distribution::from_json(text).status()?;
        write_with(out, "out", || Ok(Box::into_raw(Box::new(RrDistribution(d)))))
    })
}

/// # Safety
/// `dist` must be a live handle and `out` writable; free the string with `rr_string_free`.
#[no_mangle]
pub unsafe extern "C" fn rr_distribution_to_json(dist: *const RrDistribution, out: *mut *mut c_char) -> RrStatus {
    guard(|| {
        let d = deref(dist, "dist")?;
        let text = d.0.to_json().status()?;
        write_with(out, "out", || to_c_string(text))
    })
}

/// # Safety
/// `dist` must be a live handle; `mean` and `variance` writable.
#[no_mangle]
pub unsafe extern "C" fn rr_distribution_moments(
    dist: *const RrDistribution,
    mean: *mut f64,
    variance: *mut f64,
) -> RrStatus {
    guard(|| {
        let d = deref(dist, "dist")?;
        let (m, v) = d.0.moments().status()?;
        write(mean, m, "mean")?;
        write(variance, v, "variance")
    })
}

/// # Safety
/// `dist` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rr_distribution_free(dist: *mut RrDistribution) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

/// Expected seller revenue of `dist` at reserve `r`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rr_expected_revenue(
    dist: *const RrDistribution,
    r: f64,
    setting: *const RrSetting,
    tie: RrTieRule,
    out: *mut f64,
) -> RrStatus {
    guard(|| {
        let d = deref(dist, "dist")?;
        let s = deref(setting, "setting")?;
        write(out, expected_revenue(&d.0, r, &s.0, tie.into()).status()?, "out")
    })
}

/// Simulated revenue and its standard error.
///
/// # Safety
/// Handles must be live and the outputs writable.
#[no_mangle]
pub unsafe extern "C" fn rr_monte_carlo_revenue(
    dist: *const RrDistribution,
    r: f64,
    setting: *const RrSetting,
    tie: RrTieRule,
    samples: usize,
    seed: u64,
    estimate: *mut f64,
    std_error: *mut f64,
) -> RrStatus {
    guard(|| {
        let d = deref(dist, "dist")?;
        let s = deref(setting, "setting")?;
        let (est, se) = monte_carlo_revenue(&d.0, r, &s.0, tie.into(), samples, seed).status()?;
        write(estimate, est, "estimate")?;
        write(std_error, se, "std_error")
    })
}

/// Bounded-values gap coefficient.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rr_alpha_n(n: u32, out: *mut f64) -> RrStatus {
    guard(|| {
        if n < 2 {
            set_error(format!("need at least 2 bidders, got {n}"));
            return Err(RrStatus::InvalidArgument);
        }
        write(out, alpha_n(n), "out")
    })
}

/// Variance-bound gap coefficient.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rr_gamma_n(n: u32, out: *mut f64) -> RrStatus {
    guard(|| {
        if n < 2 {
            set_error(format!("need at least 2 bidders, got {n}"));
            return Err(RrStatus::InvalidArgument);
        }
        write(out, gamma_n(n), "out")
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
