//! C ABI over `foamtft`: theories are opaque handles, results come back as
//! status codes, and strings returned to the caller are released with
//! [`ftft_string_free`].
//!
//! Every function catches panics and reports them as
//! [`FtftStatus::Internal`]. The message of the last failure on the calling
//! thread is available from [`ftft_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use foamtft::evaluate::Evaluator;
use foamtft::frobenius::{verify_graph_cardy, GraphCardyBundle};
use foamtft::groupcover::{build_bundle, build_bundle_unverified};
use foamtft::rational::format_q;
use foamtft::text::{parse_cover, parse_labels, parse_surfaces, parse_theory, resolve_labels, write_theory};
use foamtft::Error;

/// Status codes; the numbering matches the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FtftStatus {
    Ok = 0,
    VerificationFailed = 1,
    Parse = 2,
    Io = 3,
    MissingClass = 4,
    NotComposable = 5,
    InvalidInput = 6,
    Degenerate = 7,
    NullArgument = 8,
    InvalidUtf8 = 9,
    Internal = 70,
}

/// An opaque graph-Cardy-Frobenius theory.
pub struct FtftTheory {
    bundle: GraphCardyBundle,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> FtftStatus {
    match foamtft::cli::exit_code(e) {
        1 => FtftStatus::VerificationFailed,
        2 => FtftStatus::Parse,
        3 => FtftStatus::Io,
        4 => FtftStatus::MissingClass,
        5 => FtftStatus::NotComposable,
        6 => FtftStatus::InvalidInput,
        7 => FtftStatus::Degenerate,
        _ => FtftStatus::Internal,
    }
}

struct Fail(FtftStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FtftStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            FtftStatus::Ok
        }
        Ok(Err(Fail(s, m))) => {
            set_error(&m);
            s
        }
        Err(_) => {
            set_error("panic inside foamtft");
            FtftStatus::Internal
        }
    }
}

/// # Safety
/// `p` is null or a NUL-terminated string.
unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(FtftStatus::NullArgument, "null string argument".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(FtftStatus::InvalidUtf8, "argument is not UTF-8".into()))
}

fn give(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `out` is null or writable.
unsafe fn store<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(FtftStatus::NullArgument, "null output pointer".into()));
    }
    out.write(v);
    Ok(())
}

/// # Safety
/// `t` is null or a live handle from this library.
unsafe fn theory<'a>(t: *const FtftTheory) -> Result<&'a FtftTheory, Fail> {
    t.as_ref()
        .ok_or_else(|| Fail(FtftStatus::NullArgument, "null theory handle".into()))
}

/// Parses a theory in the text format.
///
/// # Safety
/// `text_in` is a NUL-terminated string; `out` is writable. On success
/// `*out` owns a handle to release with [`ftft_theory_free`].
#[no_mangle]
pub unsafe extern "C" fn ftft_theory_parse(text_in: *const c_char, out: *mut *mut FtftTheory) -> FtftStatus {
    guard(|| {
        let bundle = parse_theory(text(text_in)?)?;
        store(out, Box::into_raw(Box::new(FtftTheory { bundle })))
    })
}

/// Builds a theory from the text of a cover file (groups, actions, palette
/// and working set). With `unverified` nonzero the crosscap checks are not
/// enforced.
///
/// # Safety
/// As [`ftft_theory_parse`].
#[no_mangle]
pub unsafe extern "C" fn ftft_theory_build(
    cover_text: *const c_char,
    unverified: c_int,
    out: *mut *mut FtftTheory,
) -> FtftStatus {
    guard(|| {
        let spec = parse_cover(text(cover_text)?)?;
        let bundle = if unverified != 0 {
            build_bundle_unverified(&spec.cover, &spec.working)?
        } else {
            build_bundle(&spec.cover, &spec.working)?
        };
        store(out, Box::into_raw(Box::new(FtftTheory { bundle })))
    })
}

/// Releases a theory. Null is ignored.
///
/// # Safety
/// `t` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ftft_theory_free(t: *mut FtftTheory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Canonical text of the theory.
///
/// # Safety
/// `t` is a live handle; `out` is writable and receives a string to release
/// with [`ftft_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ftft_theory_serialize(t: *const FtftTheory, out: *mut *mut c_char) -> FtftStatus {
    guard(|| {
        let s = write_theory(&theory(t)?.bundle);
        store(out, give(s))
    })
}

/// Runs every axiom check. `*all_hold` is set to 1 when all pass and 0
/// otherwise; `report` may be null, else it receives the report text.
///
/// # Safety
/// `t` is a live handle; `all_hold` is writable; `report` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn ftft_theory_verify(
    t: *const FtftTheory,
    all_hold: *mut c_int,
    report: *mut *mut c_char,
) -> FtftStatus {
    guard(|| {
        let r = verify_graph_cardy(&theory(t)?.bundle)?;
        store(all_hold, c_int::from(r.is_ok()))?;
        if !report.is_null() {
            report.write(give(r.to_string()));
        }
        Ok(())
    })
}

/// Evaluates the single film or foam of `surface_text` with the labels of
/// `labels_text` (may be null when nothing needs a label). `*value` receives
/// the result as `p/q`.
///
/// # Safety
/// `t` is a live handle; the strings are NUL-terminated or, for
/// `labels_text`, null; `value` is writable.
#[no_mangle]
pub unsafe extern "C" fn ftft_eval(
    t: *const FtftTheory,
    surface_text: *const c_char,
    labels_text: *const c_char,
    value: *mut *mut c_char,
) -> FtftStatus {
    guard(|| {
        let b = &theory(t)?.bundle;
        let foams = parse_surfaces(text(surface_text)?)?;
        if foams.len() != 1 {
            return Err(Fail(
                FtftStatus::InvalidInput,
                format!("expected one film or foam, found {}", foams.len()),
            ));
        }
        let entries = if labels_text.is_null() {
            Vec::new()
        } else {
            parse_labels(text(labels_text)?)?
        };
        let lf = resolve_labels(b, &foams[0].foam, &entries)?;
        let v = Evaluator::new(b)?.eval_foam(&lf)?;
        store(value, give(format_q(&v)))
    })
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library.
#[no_mangle]
pub extern "C" fn ftft_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` is null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ftft_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn ftft_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
