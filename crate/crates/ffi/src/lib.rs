//! C ABI over `impvals`.
//!
//! A session owns one parsed function. Every call returns an [`ImpStatus`];
//! on failure the message is available from [`imp_last_error`] on the same
//! thread. Strings come back through caller buffers: pass a buffer and its
//! length, and `needed` receives the length including the NUL. A NULL or short
//! buffer yields `IMP_STATUS_BUFFER_TOO_SMALL` and nothing is written.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use impvals::engine::{Func, Manager, VarId};
use impvals::error::Error;
use impvals::frontend::{parse_dimacs, parse_formula, VarMap};
use impvals::values::{EvalOptions, Measure};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImpStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    UnknownVariable = 4,
    UnknownMeasure = 5,
    LimitExceeded = 6,
    CounterError = 7,
    BufferTooSmall = 8,
    Internal = 9,
}

/// Opaque handle: a manager and one function in it.
pub struct ImpSession {
    manager: Manager,
    f: Func,
    names: VarMap,
    n_limit: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

fn status_of(e: &Error) -> ImpStatus {
    match e {
        Error::Formula(_) | Error::Dimacs(_) => ImpStatus::ParseError,
        Error::UnknownVariable(_) => ImpStatus::UnknownVariable,
        Error::UnknownMeasure(_) | Error::Measure(_) | Error::InvalidWeights(_) => ImpStatus::UnknownMeasure,
        Error::LimitExceeded { .. } => ImpStatus::LimitExceeded,
        Error::Counter(_) => ImpStatus::CounterError,
        Error::Engine(_) => ImpStatus::Internal,
    }
}

fn fail(status: ImpStatus, msg: impl Into<String>) -> ImpStatus {
    set_error(msg);
    status
}

/// Runs `body`, turning panics into `Internal`.
fn guard(body: impl FnOnce() -> Result<(), (ImpStatus, String)>) -> ImpStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ImpStatus::Ok,
        Ok(Err((s, msg))) => fail(s, msg),
        Err(_) => fail(ImpStatus::Internal, "panic inside impvals"),
    }
}

fn from_lib(e: Error) -> (ImpStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, (ImpStatus, String)> {
    if p.is_null() {
        return Err((ImpStatus::NullArgument, "null string argument".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (ImpStatus::InvalidUtf8, "argument is not UTF-8".into()))
}

unsafe fn write_str(s: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> Result<(), (ImpStatus, String)> {
    let n = s.len() + 1;
    if !needed.is_null() {
        *needed = n;
    }
    if buf.is_null() || len < n {
        return Err((ImpStatus::BufferTooSmall, format!("need {n} bytes, got {len}")));
    }
    std::ptr::copy_nonoverlapping(s.as_ptr(), buf.cast::<u8>(), s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

unsafe fn session_out(
    out: *mut *mut ImpSession,
    build: impl FnOnce() -> Result<ImpSession, Error>,
) -> ImpStatus {
    if out.is_null() {
        return fail(ImpStatus::NullArgument, "null session pointer");
    }
    *out = std::ptr::null_mut();
    guard(|| {
        let s = build().map_err(from_lib)?;
        *out = Box::into_raw(Box::new(s));
        Ok(())
    })
}

/// Parses a propositional formula such as `x | (y ^ !z)`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn imp_session_from_formula(text: *const c_char, out: *mut *mut ImpSession) -> ImpStatus {
    let text = match read_str(text) {
        Ok(t) => t,
        Err((s, m)) => return fail(s, m),
    };
    session_out(out, || {
        let (phi, names) = parse_formula(text)?;
        let mut manager = Manager::new(names.len());
        let f = phi.to_func(&mut manager)?;
        Ok(ImpSession {
            manager,
            f,
            names,
            n_limit: impvals::games::DEFAULT_N_LIMIT,
        })
    })
}

/// Parses DIMACS CNF text; variables are named `x1..xn`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn imp_session_from_dimacs(text: *const c_char, out: *mut *mut ImpSession) -> ImpStatus {
    let text = match read_str(text) {
        Ok(t) => t,
        Err((s, m)) => return fail(s, m),
    };
    session_out(out, || {
        let doc = parse_dimacs(text)?;
        let mut manager = Manager::new(doc.n_vars);
        let f = doc.to_func(&mut manager)?;
        Ok(ImpSession {
            manager,
            f,
            names: VarMap::numbered(doc.n_vars),
            n_limit: impvals::games::DEFAULT_N_LIMIT,
        })
    })
}

/// # Safety
/// `session` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn imp_session_free(session: *mut ImpSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Number of variables, 0 for NULL.
///
/// # Safety
/// `session` must be NULL or a live session.
#[no_mangle]
pub unsafe extern "C" fn imp_session_num_vars(session: *const ImpSession) -> usize {
    session.as_ref().map_or(0, |s| s.names.len())
}

/// Largest support the HKR games accept.
///
/// # Safety
/// `session` must be NULL or a live session.
#[no_mangle]
pub unsafe extern "C" fn imp_session_set_n_limit(session: *mut ImpSession, n_limit: usize) -> ImpStatus {
    match session.as_mut() {
        Some(s) => {
            s.n_limit = n_limit;
            ImpStatus::Ok
        }
        None => fail(ImpStatus::NullArgument, "null session"),
    }
}

/// Name of variable `index` (0-based).
///
/// # Safety
/// `session` must be a live session; `buf` must hold `len` bytes or be NULL.
#[no_mangle]
pub unsafe extern "C" fn imp_var_name(
    session: *const ImpSession,
    index: usize,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> ImpStatus {
    let Some(s) = session.as_ref() else {
        return fail(ImpStatus::NullArgument, "null session");
    };
    guard(|| {
        if index >= s.names.len() {
            return Err((ImpStatus::UnknownVariable, format!("no variable at index {index}")));
        }
        write_str(&s.names.name(VarId::from(index)), buf, len, needed)
    })
}

/// Index of the variable called `name`.
///
/// # Safety
/// `session` must be a live session, `name` a NUL-terminated string, `index` valid.
#[no_mangle]
pub unsafe extern "C" fn imp_var_index(session: *const ImpSession, name: *const c_char, index: *mut usize) -> ImpStatus {
    let Some(s) = session.as_ref() else {
        return fail(ImpStatus::NullArgument, "null session");
    };
    if index.is_null() {
        return fail(ImpStatus::NullArgument, "null index pointer");
    }
    guard(|| {
        let name = read_str(name)?;
        let v = s
            .names
            .get(name)
            .ok_or_else(|| (ImpStatus::UnknownVariable, format!("unknown variable {name:?}")))?;
        *index = v.index();
        Ok(())
    })
}

unsafe fn evaluate(
    session: *mut ImpSession,
    measure: *const c_char,
    index: usize,
) -> Result<impvals::measures::Value, (ImpStatus, String)> {
    let s = session
        .as_mut()
        .ok_or_else(|| (ImpStatus::NullArgument, "null session".to_string()))?;
    let measure: Measure = read_str(measure)?.parse().map_err(from_lib)?;
    if index >= s.names.len() {
        return Err((ImpStatus::UnknownVariable, format!("no variable at index {index}")));
    }
    let opts = EvalOptions { n_limit: s.n_limit };
    measure
        .evaluate(&mut s.manager, s.f, VarId::from(index), &opts)
        .map_err(from_lib)
}

/// Importance of variable `index` under `measure` (e.g. `influence`,
/// `blame:exp`, `mblame:frac`, `cgm:dominating:shapley`), written as an exact
/// fraction like `5/8`. Float-valued measures give a decimal.
///
/// # Safety
/// `session` must be a live session, `measure` a NUL-terminated string, `buf`
/// must hold `len` bytes or be NULL.
#[no_mangle]
pub unsafe extern "C" fn imp_value(
    session: *mut ImpSession,
    measure: *const c_char,
    index: usize,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> ImpStatus {
    guard(|| {
        let v = evaluate(session, measure, index)?;
        write_str(&v.exact_string(), buf, len, needed)
    })
}

/// Same as [`imp_value`] but as a double.
///
/// # Safety
/// `session` must be a live session, `measure` a NUL-terminated string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn imp_value_f64(
    session: *mut ImpSession,
    measure: *const c_char,
    index: usize,
    out: *mut f64,
) -> ImpStatus {
    if out.is_null() {
        return fail(ImpStatus::NullArgument, "null output pointer");
    }
    guard(|| {
        *out = evaluate(session, measure, index)?.to_f64();
        Ok(())
    })
}

/// Message of the last failure on this thread. Valid until the next call
/// into the library from this thread.
#[no_mangle]
pub extern "C" fn imp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn imp_status_name(status: ImpStatus) -> *const c_char {
    let s: &'static CStr = match status {
        ImpStatus::Ok => c"ok",
        ImpStatus::NullArgument => c"null argument",
        ImpStatus::InvalidUtf8 => c"invalid utf-8",
        ImpStatus::ParseError => c"parse error",
        ImpStatus::UnknownVariable => c"unknown variable",
        ImpStatus::UnknownMeasure => c"unknown measure",
        ImpStatus::LimitExceeded => c"limit exceeded",
        ImpStatus::CounterError => c"counter error",
        ImpStatus::BufferTooSmall => c"buffer too small",
        ImpStatus::Internal => c"internal error",
    };
    s.as_ptr()
}

#[no_mangle]
pub extern "C" fn imp_version() -> *const c_char {
    static V: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    V.as_ptr().cast()
}
