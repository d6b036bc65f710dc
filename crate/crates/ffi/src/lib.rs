//! C interface to `treechar`.
//!
//! Groups are opaque handles created by `tc_group_from_catalog` or
//! `tc_group_from_text` and released with `tc_group_free`. Every fallible
//! call returns a `TcStatus`; on failure `tc_last_error` describes the
//! problem for the calling thread. Strings handed out by the library are
//! released with `tc_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use treechar::canonical::chi1;
use treechar::catalog;
use treechar::groupfile;
use treechar::irs::{psi_level, psip_level, Bracket, EstimateOptions, IntervalEstimate, Mode, Value};
use treechar::setspec::parse_setspec;
use treechar::{Error, Group};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TcStatus {
    Ok = 0,
    InternalError = 1,
    InputError = 2,
    ResourceError = 3,
    NullPointer = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TcMode {
    Exact = 0,
    Mc = 1,
    Auto = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TcBracket {
    Upper = 0,
    Lower = 1,
    ExactIdentity = 2,
    Heuristic = 3,
}

/// An opaque group handle.
pub struct TcGroup {
    group: Group,
}

/// A level estimate. `value_text` is `"p/q"` for exact values and a decimal
/// otherwise; it is owned by the estimate and released by
/// `tc_estimate_clear`.
#[repr(C)]
#[derive(Debug)]
pub struct TcEstimate {
    pub value: f64,
    pub radius: f64,
    pub exact: bool,
    pub bracket: TcBracket,
    pub level: u32,
    pub samples: u64,
    pub seed: u64,
    pub value_text: *mut c_char,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> TcStatus {
    if e.is_input() {
        TcStatus::InputError
    } else if e.is_resource() {
        TcStatus::ResourceError
    } else {
        TcStatus::InternalError
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard<F>(f: F) -> TcStatus
where
    F: FnOnce() -> Result<(), (TcStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside treechar");
            TcStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (TcStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (TcStatus, String)> {
    if p.is_null() {
        return Err((TcStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (TcStatus::InputError, format!("{what} is not valid UTF-8")))
}

unsafe fn group_arg<'a>(p: *const TcGroup) -> Result<&'a Group, (TcStatus, String)> {
    p.as_ref()
        .map(|g| &g.group)
        .ok_or((TcStatus::NullPointer, "group handle is null".into()))
}

fn new_string(s: &str) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message for the last failed call on this thread. Valid until the next
/// call on the same thread.
#[no_mangle]
pub extern "C" fn tc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn tc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Loads a catalog group by name.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_group_from_catalog(name: *const c_char, out: *mut *mut TcGroup) -> TcStatus {
    guard(|| {
        if out.is_null() {
            return Err((TcStatus::NullPointer, "out is null".into()));
        }
        let name = str_arg(name, "name")?;
        let group = catalog::group(name).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(TcGroup { group }));
        Ok(())
    })
}

/// Parses a group definition in the text format.
///
/// # Safety
/// `name` and `text` must be NUL-terminated strings and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_group_from_text(
    name: *const c_char,
    text: *const c_char,
    out: *mut *mut TcGroup,
) -> TcStatus {
    guard(|| {
        if out.is_null() {
            return Err((TcStatus::NullPointer, "out is null".into()));
        }
        let name = str_arg(name, "name")?;
        let text = str_arg(text, "text")?;
        let group = groupfile::parse(name, text).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(TcGroup { group }));
        Ok(())
    })
}

/// Releases a group handle. Null is ignored.
///
/// # Safety
/// `group` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tc_group_free(group: *mut TcGroup) {
    if !group.is_null() {
        drop(Box::from_raw(group));
    }
}

/// Tree degree of the group, or 0 for a null handle.
///
/// # Safety
/// `group` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tc_group_degree(group: *const TcGroup) -> u32 {
    group.as_ref().map(|g| g.group.degree() as u32).unwrap_or(0)
}

/// Exact fixed-point measure of `word`, written to `*out` as a `"p/q"`
/// string to be released with `tc_string_free`.
///
/// # Safety
/// `group` must be a live handle, `word` a NUL-terminated string and `out`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_chi1(group: *const TcGroup, word: *const c_char, out: *mut *mut c_char) -> TcStatus {
    guard(|| {
        if out.is_null() {
            return Err((TcStatus::NullPointer, "out is null".into()));
        }
        let g = group_arg(group)?;
        let w = g.parse_word(str_arg(word, "word")?).map_err(lib_err)?;
        let v = chi1(g, &w).map_err(lib_err)?;
        *out = new_string(&v.to_string());
        Ok(())
    })
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn level_estimate(
    pointwise: bool,
    group: *const TcGroup,
    set: *const c_char,
    word: *const c_char,
    level: u32,
    mode: TcMode,
    samples: u64,
    seed: u64,
    out: *mut TcEstimate,
) -> TcStatus {
    guard(|| {
        if out.is_null() {
            return Err((TcStatus::NullPointer, "out is null".into()));
        }
        if level == 0 {
            return Err((TcStatus::InputError, "level must be at least 1".into()));
        }
        let g = group_arg(group)?;
        let c = parse_setspec(str_arg(set, "set")?, g.degree()).map_err(lib_err)?;
        let w = g.parse_word(str_arg(word, "word")?).map_err(lib_err)?;
        let opts = EstimateOptions {
            mode: match mode {
                TcMode::Exact => Mode::Exact,
                TcMode::Mc => Mode::Mc,
                TcMode::Auto => Mode::Auto,
            },
            samples,
            seed: Some(seed),
            ..Default::default()
        };
        let n = level as usize;
        let est = if pointwise {
            psip_level(g, &c, &w, n, &opts)
        } else {
            psi_level(g, &c, &w, n, &opts)
        }
        .map_err(lib_err)?;
        *out = to_c(&est);
        Ok(())
    })
}

fn to_c(e: &IntervalEstimate) -> TcEstimate {
    TcEstimate {
        value: e.value.to_f64(),
        radius: e.radius,
        exact: matches!(e.value, Value::Exact(_)),
        bracket: match e.bracket {
            Bracket::Upper => TcBracket::Upper,
            Bracket::Lower => TcBracket::Lower,
            Bracket::ExactIdentity => TcBracket::ExactIdentity,
            Bracket::Heuristic => TcBracket::Heuristic,
        },
        level: e.level as u32,
        samples: e.samples.unwrap_or(0),
        seed: e.seed.unwrap_or(0),
        value_text: new_string(&e.value.to_string()),
    }
}

/// Setwise-fixed fraction of the level-`level` orbit of `set`. In Monte
/// Carlo mode `samples` and `seed` drive the sampler; otherwise they are
/// ignored unless `TC_MODE_AUTO` falls back to sampling.
///
/// # Safety
/// `group` must be a live handle, `set` and `word` NUL-terminated strings
/// and `out` a valid pointer. Release `out` with `tc_estimate_clear`.
#[no_mangle]
pub unsafe extern "C" fn tc_psi(
    group: *const TcGroup,
    set: *const c_char,
    word: *const c_char,
    level: u32,
    mode: TcMode,
    samples: u64,
    seed: u64,
    out: *mut TcEstimate,
) -> TcStatus {
    level_estimate(false, group, set, word, level, mode, samples, seed, out)
}

/// Pointwise-trivial fraction of the level orbit. Arguments as `tc_psi`.
///
/// # Safety
/// As `tc_psi`.
#[no_mangle]
pub unsafe extern "C" fn tc_psip(
    group: *const TcGroup,
    set: *const c_char,
    word: *const c_char,
    level: u32,
    mode: TcMode,
    samples: u64,
    seed: u64,
    out: *mut TcEstimate,
) -> TcStatus {
    level_estimate(true, group, set, word, level, mode, samples, seed, out)
}

/// Releases the text owned by an estimate and nulls it.
///
/// # Safety
/// `est` must be null or point to an estimate filled by this library.
#[no_mangle]
pub unsafe extern "C" fn tc_estimate_clear(est: *mut TcEstimate) {
    if let Some(e) = est.as_mut() {
        tc_string_free(e.value_text);
        e.value_text = ptr::null_mut();
    }
}
