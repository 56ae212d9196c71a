//! C ABI over the chiralflow engine.
//!
//! States and current sets are opaque heap handles. Every fallible call
//! returns a [`CfStatus`] and writes its result through an out-pointer; on
//! failure the message is kept per thread and can be fetched with
//! [`cf_last_error`]. Strings handed out by this library must be released
//! with [`cf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use chiralflow::fock::State;
use chiralflow::n2::{make_currents, Current, CurrentSet};
use chiralflow::report::Report;
use chiralflow::series::parse_weight;
use chiralflow::suite::{self, Params};
use chiralflow::window::Sector;
use chiralflow::{flow, modes, text, Error};

/// Result codes. `CF_STATUS_OK` is zero.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    IndexOutOfRange = 4,
    NotCreation = 5,
    InvalidArgument = 6,
    Precondition = 7,
    Closure = 8,
    /// A check ran and reported FAIL; the report is still written.
    CheckFailed = 9,
    Panic = 10,
}

/// The four N=2 currents.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CfCurrent {
    L = 0,
    J = 1,
    Q = 2,
    G = 3,
}

/// Opaque finite linear combination of Fock monomials.
pub struct CfState(State);

/// Opaque N=2 current set at a fixed rank.
pub struct CfCurrents(CurrentSet);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> CfStatus {
    match e {
        Error::Parse { .. } => CfStatus::Parse,
        Error::IndexOutOfRange { .. } => CfStatus::IndexOutOfRange,
        Error::NotCreation(_) => CfStatus::NotCreation,
        Error::InvalidArgument(_) => CfStatus::InvalidArgument,
        Error::Precondition(_) => CfStatus::Precondition,
        Error::Closure { .. } => CfStatus::Closure,
    }
}

struct Fail(CfStatus);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        set_error(e.to_string());
        Fail(status_of(&e))
    }
}

fn null(what: &str) -> Fail {
    set_error(format!("null pointer: {}", what));
    Fail(CfStatus::NullPointer)
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<CfStatus, Fail>) -> CfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Fail(s))) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {}", msg));
            CfStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{} is not valid UTF-8", what));
        Fail(CfStatus::InvalidUtf8)
    })
}

unsafe fn state_arg<'a>(p: *const CfState, what: &str) -> Result<&'a State, Fail> {
    p.as_ref().map(|s| &s.0).ok_or_else(|| null(what))
}

unsafe fn currents_arg<'a>(p: *const CfCurrents) -> Result<&'a CurrentSet, Fail> {
    p.as_ref().map(|c| &c.0).ok_or_else(|| null("currents"))
}

unsafe fn put_state(out: *mut *mut CfState, s: State) -> Result<CfStatus, Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(CfState(s)));
    Ok(CfStatus::Ok)
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<CfStatus, Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = CString::new(s.replace('\0', " ")).unwrap().into_raw();
    Ok(CfStatus::Ok)
}

/// Message of the last failed call on this thread, or NULL. The caller
/// owns the returned string.
#[no_mangle]
pub extern "C" fn cf_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(m) => m.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a state such as `"1 b[1,-1] c[1,-1] |0>"`. With `rank > 0` the
/// mode indices are checked against it.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cf_state_parse(text: *const c_char, rank: u32, out: *mut *mut CfState) -> CfStatus {
    guard(|| {
        let t = str_arg(text, "text")?;
        let s = if rank > 0 {
            text::parse_state_at_rank(t, rank)?
        } else {
            text::parse_state(t)?
        };
        put_state(out, s)
    })
}

/// Canonical multi-line text form.
///
/// # Safety
/// `s` must be a live state handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cf_state_format(s: *const CfState, out: *mut *mut c_char) -> CfStatus {
    guard(|| put_string(out, text::format_state(state_arg(s, "state")?)))
}

/// Exact equality of two states.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cf_state_equal(a: *const CfState, b: *const CfState, out: *mut bool) -> CfStatus {
    guard(|| {
        let eq = state_arg(a, "a")? == state_arg(b, "b")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = eq;
        Ok(CfStatus::Ok)
    })
}

/// # Safety
/// `s` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cf_state_free(s: *mut CfState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// `a_(n) t`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cf_field_coeff(
    a: *const CfState,
    n: i64,
    t: *const CfState,
    out: *mut *mut CfState,
) -> CfStatus {
    guard(|| {
        let r = modes::field_coeff(state_arg(a, "a")?, n, state_arg(t, "t")?);
        put_state(out, r)
    })
}

/// Normally ordered product `:ab: = a_(-1) b`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cf_nop(a: *const CfState, b: *const CfState, out: *mut *mut CfState) -> CfStatus {
    guard(|| put_state(out, modes::nop(state_arg(a, "a")?, state_arg(b, "b")?)))
}

/// Builds the N=2 currents at `rank` with the frozen sign convention.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cf_currents_new(rank: u32, out: *mut *mut CfCurrents) -> CfStatus {
    guard(|| {
        if rank == 0 {
            return Err(Error::InvalidArgument("rank must be at least 1".into()).into());
        }
        let cs = make_currents(rank)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Box::into_raw(Box::new(CfCurrents(cs)));
        Ok(CfStatus::Ok)
    })
}

/// # Safety
/// `c` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cf_currents_free(c: *mut CfCurrents) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Copies one current out as a state.
///
/// # Safety
/// `c` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cf_currents_get(
    c: *const CfCurrents,
    which: CfCurrent,
    out: *mut *mut CfState,
) -> CfStatus {
    guard(|| {
        let cur = match which {
            CfCurrent::L => Current::L,
            CfCurrent::J => Current::J,
            CfCurrent::Q => Current::Q,
            CfCurrent::G => Current::G,
        };
        put_state(out, currents_arg(c)?.get(cur).clone())
    })
}

/// The vacuum images `Omega+` (`minus == false`) or `Omega-`.
///
/// # Safety
/// `c` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cf_currents_omega(c: *const CfCurrents, minus: bool, out: *mut *mut CfState) -> CfStatus {
    guard(|| {
        let cs = currents_arg(c)?;
        put_state(out, if minus { cs.omega_minus.clone() } else { cs.omega_plus.clone() })
    })
}

unsafe fn apply(c: *const CfCurrents, s: *const CfState, out: *mut *mut CfState, tau: bool) -> CfStatus {
    guard(|| {
        let cs = currents_arg(c)?;
        let st = state_arg(s, "state")?;
        st.check_rank(cs.rank)?;
        let r = if tau { flow::tau_apply(cs, st) } else { flow::sigma_apply(cs, st) };
        put_state(out, r)
    })
}

/// Spectral flow `sigma` applied to a state.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cf_sigma_apply(c: *const CfCurrents, s: *const CfState, out: *mut *mut CfState) -> CfStatus {
    apply(c, s, out, false)
}

/// Spectral flow `tau` applied to a state.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cf_tau_apply(c: *const CfCurrents, s: *const CfState, out: *mut *mut CfState) -> CfStatus {
    apply(c, s, out, true)
}

fn run_check(name: &str, p: &Params) -> chiralflow::Result<Report> {
    match name {
        "verify.n2" => suite::verify_n2(p),
        "verify.omega" => suite::verify_omega(p),
        "verify.borcherds" => suite::verify_borcherds(p),
        "verify.twist" => suite::verify_twist_report(p),
        "flow.constancy" => suite::flow_constancy(p),
        "flow.inverse" => suite::flow_inverse(p),
        "flow.intertwine" => suite::flow_intertwine(p),
        "flow.transparency" => suite::flow_transparency(p),
        "flow.locality" => suite::flow_locality(p),
        "character.dims" => suite::character_dims(p),
        "character.trace" => suite::character_trace(p),
        "character.ellipticity" => suite::character_ellipticity(p),
        other => Err(Error::InvalidArgument(format!("unknown check '{}'", other))),
    }
}

/// Runs a named check (`"verify.n2"`, `"flow.inverse"`, ...) and writes its
/// JSON report. `hmax` is an exact rational such as `"3/2"`; `sector` is
/// `"fermionic"`, `"full"` or `"full:<g>"`; either may be NULL for the
/// default. Returns `CF_STATUS_CHECK_FAILED` when the report says FAIL.
///
/// # Safety
/// String arguments must be NULL or NUL-terminated; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn cf_check(
    name: *const c_char,
    rank: u32,
    hmax: *const c_char,
    kmax: i64,
    mode_range: i64,
    sector: *const c_char,
    n: i64,
    out_json: *mut *mut c_char,
) -> CfStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        if rank == 0 {
            return Err(Error::InvalidArgument("rank must be at least 1".into()).into());
        }
        let mut p = Params {
            rank,
            kmax,
            mode_range,
            n,
            ..Params::default()
        };
        if !hmax.is_null() {
            p.hmax = parse_weight(str_arg(hmax, "hmax")?)?;
        }
        if !sector.is_null() {
            p.sector = str_arg(sector, "sector")?.parse::<Sector>()?;
        }
        let report = run_check(name, &p)?;
        let failed = report.is_failure();
        put_string(out_json, report.to_json())?;
        Ok(if failed { CfStatus::CheckFailed } else { CfStatus::Ok })
    })
}
