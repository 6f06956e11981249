//! C ABI for opcalc.
//!
//! Handles are opaque; every `*_new`/producer has a matching `*_free`.
//! Strings handed out are owned by the caller and go back through
//! [`opcalc_string_free`]. Status codes mirror the CLI exit codes.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use opcalc::cobar::{self, Certificate, Color, Which};
use opcalc::swisscheese::{self, E1Table};
use opcalc::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpcalcStatus {
    Ok = 0,
    MathFailure = 1,
    InputError = 2,
    CutoffOverflow = 3,
    NullPointer = 4,
    Panic = 5,
}

/// Opaque nonformality certificate.
pub struct OpcalcCertificate(Certificate);

/// Opaque E1 dimension table.
pub struct OpcalcE1Table(E1Table);

thread_local! {
    static LAST_ERROR: RefCell<Option<String>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> OpcalcStatus {
    match e {
        Error::Input(_) => OpcalcStatus::InputError,
        Error::Cutoff(_) => OpcalcStatus::CutoffOverflow,
        Error::Math(_) | Error::Internal(_) => OpcalcStatus::MathFailure,
    }
}

fn guarded(f: impl FnOnce() -> Result<(), Error>) -> OpcalcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OpcalcStatus::Ok,
        Ok(Err(e)) => {
            let s = status_of(&e);
            set_error(e.to_string());
            s
        }
        Err(_) => {
            set_error("panic inside opcalc".into());
            OpcalcStatus::Panic
        }
    }
}

fn to_c(s: String) -> *mut c_char {
    // interior NULs cannot occur in our JSON/CSV, but don't trust that blindly
    CString::new(s.replace('\0', "")).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

unsafe fn from_c<'a>(s: *const c_char) -> Result<&'a str, Error> {
    if s.is_null() {
        return Err(Error::Input("null string".into()));
    }
    CStr::from_ptr(s).to_str().map_err(|e| Error::Input(format!("not utf-8: {e}")))
}

/// Frees a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn opcalc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. Caller frees.
#[no_mangle]
pub extern "C" fn opcalc_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().clone()).map(to_c).unwrap_or(ptr::null_mut())
}

/// Runs the CLI in-process. `argv` excludes the program name. The rendered
/// output goes to `*output` (caller frees). Returns the exit code.
///
/// # Safety
/// `argv` must point to `argc` valid C strings; `output` may be null.
#[no_mangle]
pub unsafe extern "C" fn opcalc_run(argc: usize, argv: *const *const c_char, output: *mut *mut c_char) -> i32 {
    let mut args = vec!["opcalc".to_string()];
    if argc > 0 && argv.is_null() {
        return OpcalcStatus::NullPointer as i32;
    }
    for i in 0..argc {
        match from_c(*argv.add(i)) {
            Ok(s) => args.push(s.to_string()),
            Err(e) => {
                set_error(e.to_string());
                return OpcalcStatus::InputError as i32;
            }
        }
    }
    let out = match catch_unwind(|| opcalc::cli::run(args)) {
        Ok(o) => o,
        Err(_) => {
            set_error("panic inside opcalc".into());
            return OpcalcStatus::Panic as i32;
        }
    };
    if !output.is_null() {
        *output = to_c(out.output);
    }
    out.code
}

/// Builds the nonformality certificate for `operad` ("S" or "sc").
///
/// # Safety
/// `operad` is a valid C string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn opcalc_certificate_new(operad: *const c_char, out: *mut *mut OpcalcCertificate) -> OpcalcStatus {
    if out.is_null() {
        return OpcalcStatus::NullPointer;
    }
    *out = ptr::null_mut();
    guarded(|| {
        let which = Which::parse(from_c(operad)?)?;
        let c = cobar::nonformality_witness(which)?;
        *out = Box::into_raw(Box::new(OpcalcCertificate(c)));
        Ok(())
    })
}

/// # Safety
/// `c` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn opcalc_certificate_free(c: *mut OpcalcCertificate) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// 1 if every check passed, 0 otherwise (also for null).
///
/// # Safety
/// `c` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn opcalc_certificate_is_nonformal(c: *const OpcalcCertificate) -> i32 {
    c.as_ref().map_or(0, |c| c.0.is_nonformal() as i32)
}

/// # Safety
/// `c` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn opcalc_certificate_check_count(c: *const OpcalcCertificate) -> usize {
    c.as_ref().map_or(0, |c| c.0.checks.len())
}

/// 1 pass, 0 fail, -1 out of range / null.
///
/// # Safety
/// `c` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn opcalc_certificate_check_passed(c: *const OpcalcCertificate, i: usize) -> i32 {
    c.as_ref().and_then(|c| c.0.checks.get(i)).map_or(-1, |x| x.pass as i32)
}

/// Name of check `i`, or null. Caller frees.
///
/// # Safety
/// `c` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn opcalc_certificate_check_name(c: *const OpcalcCertificate, i: usize) -> *mut c_char {
    c.as_ref().and_then(|c| c.0.checks.get(i)).map_or(ptr::null_mut(), |x| to_c(x.name.clone()))
}

/// Whole certificate as JSON. Caller frees.
///
/// # Safety
/// `c` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn opcalc_certificate_json(c: *const OpcalcCertificate) -> *mut c_char {
    match c.as_ref() {
        Some(c) => serde_json::to_string_pretty(&c.0).map_or(ptr::null_mut(), to_c),
        None => ptr::null_mut(),
    }
}

/// E1 dimension table of Cobar(sc) for (c^k, o^n → out); `out` is 'c' or 'o'.
///
/// # Safety
/// `table` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn opcalc_e1_table_new(
    k: usize,
    n: usize,
    out: c_char,
    min_degree: i64,
    max_degree: i64,
    tree_bound: usize,
    table: *mut *mut OpcalcE1Table,
) -> OpcalcStatus {
    if table.is_null() {
        return OpcalcStatus::NullPointer;
    }
    *table = ptr::null_mut();
    guarded(|| {
        let color = match out as u8 {
            b'c' => Color::C,
            b'o' => Color::O,
            x => return Err(Error::Input(format!("output color must be 'c' or 'o', got {:?}", x as char))),
        };
        let t = swisscheese::e1_dimension_table(k, n, color, min_degree, max_degree, tree_bound)?;
        *table = Box::into_raw(Box::new(OpcalcE1Table(t)));
        Ok(())
    })
}

/// # Safety
/// `t` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn opcalc_e1_table_free(t: *mut OpcalcE1Table) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `t` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn opcalc_e1_table_row_count(t: *const OpcalcE1Table) -> usize {
    t.as_ref().map_or(0, |t| t.0.rows.len())
}

/// Reads row `i`. Both routes are reported; they agree by construction.
///
/// # Safety
/// `t` is null or a live handle; the out pointers are valid.
#[no_mangle]
pub unsafe extern "C" fn opcalc_e1_table_row(
    t: *const OpcalcE1Table,
    i: usize,
    degree: *mut i64,
    route_trees: *mut u64,
    route_cobar: *mut u64,
) -> OpcalcStatus {
    if degree.is_null() || route_trees.is_null() || route_cobar.is_null() {
        return OpcalcStatus::NullPointer;
    }
    let Some(t) = t.as_ref() else { return OpcalcStatus::NullPointer };
    match t.0.rows.get(i) {
        Some(r) => {
            *degree = r.degree;
            *route_trees = r.route_trees;
            *route_cobar = r.route_cobar;
            OpcalcStatus::Ok
        }
        None => {
            set_error(format!("row {i} out of range"));
            OpcalcStatus::InputError
        }
    }
}

/// # Safety
/// `t` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn opcalc_e1_table_euler(t: *const OpcalcE1Table) -> i64 {
    t.as_ref().map_or(0, |t| t.0.euler_characteristic())
}

/// Table as CSV. Caller frees.
///
/// # Safety
/// `t` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn opcalc_e1_table_csv(t: *const OpcalcE1Table) -> *mut c_char {
    t.as_ref().map_or(ptr::null_mut(), |t| to_c(t.0.to_csv()))
}
