//! C interface to the charwave solver.
//!
//! Solutions are opaque handles created by [`cw_solve_toml`] and released
//! with [`cw_solution_free`]. Every fallible call returns a [`CwStatus`];
//! on failure the message is kept per thread and can be read back with
//! [`cw_last_error_message`].
//!
//! The header `include/charwave.h` is generated from this file at build
//! time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufWriter;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use charwave::assembly::{characteristic_jump, classify_case, evaluate, solve, CaseKind, Solution};
use charwave::cauchy::Side;
use charwave::cli::config::Config;
use charwave::cli::output::write_csv;
use charwave::verify::{check_definition1, ToleranceProfile};
use charwave::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed TOML or invalid problem, window, grid or Picard settings.
    Config = 3,
    Expression = 4,
    NonConvergence = 5,
    Coverage = 6,
    OutOfWindow = 7,
    Io = 8,
    InvalidArgument = 9,
    /// A Rust panic was caught at the boundary.
    Panic = 10,
}

/// Which of the three jump cases the data falls in.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CwCase {
    Continuous = 0,
    MidpointJump = 1,
    GeneralJump = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CwSide {
    /// The characteristic `x = x0 - a t`.
    Left = 0,
    /// The characteristic `x = x0 + a t`.
    Right = 1,
}

/// Solution value and first derivatives at a point.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CwPoint {
    pub u: f64,
    pub ut: f64,
    pub ux: f64,
    /// 1, 2 or 3.
    pub region: u8,
}

/// Node layout: node `(n, i)` is at `t = n dt`, `x = x0 + i dx`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CwGrid {
    pub a: f64,
    pub x0: f64,
    pub dt: f64,
    pub dx: f64,
    pub nt: usize,
    pub i_lo: i64,
    pub i_hi: i64,
}

/// Opaque solution handle.
pub struct CwSolution {
    inner: Solution,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(CwStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidSpec(_) | Error::InvalidGrid(_) | Error::InvalidPicard(_) | Error::NotLinear => {
                CwStatus::Config
            }
            Error::Expression { .. } => CwStatus::Expression,
            Error::NonConvergence { .. } => CwStatus::NonConvergence,
            Error::Coverage(_) => CwStatus::Coverage,
            Error::OutOfWindow { .. } | Error::TooCloseToCharacteristic { .. } => CwStatus::OutOfWindow,
            Error::Geometry(_) => CwStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(CwStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `body`, turning errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> CwStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CwStatus::Ok
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
            CwStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(CwStatus::InvalidUtf8, format!("`{what}`: {e}")))
}

unsafe fn handle<'a>(p: *const CwSolution) -> Result<&'a Solution, Failure> {
    p.as_ref().map(|s| &s.inner).ok_or_else(|| null("solution"))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

fn config(toml: &str) -> Result<Config, Failure> {
    let cfg = Config::from_toml_str(toml).map_err(|e| Failure(CwStatus::Config, e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

fn case_code(case: CaseKind) -> CwCase {
    match case {
        CaseKind::Continuous => CwCase::Continuous,
        CaseKind::MidpointJump => CwCase::MidpointJump,
        CaseKind::GeneralJump => CwCase::GeneralJump,
    }
}

/// Solves the problem described by the TOML configuration `toml` (the same
/// format the command line reads). On success `*out` receives a handle to
/// be released with `cw_solution_free`; on failure it is set to null.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cw_solve_toml(toml: *const c_char, out: *mut *mut CwSolution) -> CwStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let cfg = config(text(toml, "toml")?)?;
        let spec = cfg.spec()?;
        let inner = solve(&spec, &cfg.grid_params(), &cfg.picard_params())?;
        *out = Box::into_raw(Box::new(CwSolution { inner }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `sol` must come from `cw_solve_toml` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cw_solution_free(sol: *mut CwSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// # Safety
/// `sol` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cw_solution_grid(sol: *const CwSolution, out: *mut CwGrid) -> CwStatus {
    guard(|| {
        let g = *handle(sol)?.grid();
        *out_ref(out, "out")? = CwGrid {
            a: g.a,
            x0: g.x0,
            dt: g.dt,
            dx: g.dx,
            nt: g.nt,
            i_lo: g.i_lo,
            i_hi: g.i_hi,
        };
        Ok(())
    })
}

/// Interpolated solution at `(t, x)` inside the window.
///
/// # Safety
/// `sol` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cw_evaluate(sol: *const CwSolution, t: f64, x: f64, out: *mut CwPoint) -> CwStatus {
    guard(|| {
        let e = evaluate(handle(sol)?, t, x)?;
        *out_ref(out, "out")? = CwPoint { u: e.u, ut: e.ut, ux: e.ux, region: e.region.number() };
        Ok(())
    })
}

/// # Safety
/// `sol` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cw_solution_case(sol: *const CwSolution, out: *mut CwCase) -> CwStatus {
    guard(|| {
        *out_ref(out, "out")? = case_code(handle(sol)?.case());
        Ok(())
    })
}

/// Measured jump of `u` across one characteristic at time `t > 0`.
///
/// # Safety
/// `sol` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cw_jump(sol: *const CwSolution, t: f64, side: CwSide, out: *mut f64) -> CwStatus {
    guard(|| {
        let side = match side {
            CwSide::Left => Side::Left,
            CwSide::Right => Side::Right,
        };
        *out_ref(out, "out")? = characteristic_jump(handle(sol)?, t, side)?;
        Ok(())
    })
}

/// Runs the solution checks with the default tolerances. `*passed` is
/// set either way; the status is `CW_STATUS_OK` unless an argument is bad.
///
/// # Safety
/// `sol` must be a live handle and `passed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cw_verify(sol: *const CwSolution, passed: *mut bool) -> CwStatus {
    guard(|| {
        let report = check_definition1(handle(sol)?, &ToleranceProfile::default());
        *out_ref(passed, "passed")? = report.passed;
        Ok(())
    })
}

/// Writes the window nodes as CSV to `path`.
///
/// # Safety
/// `sol` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cw_write_csv(sol: *const CwSolution, path: *const c_char) -> CwStatus {
    guard(|| {
        let sol = handle(sol)?;
        let path = text(path, "path")?;
        let io = |e: std::io::Error| Failure(CwStatus::Io, format!("{path}: {e}"));
        let mut file = BufWriter::new(File::create(path).map_err(io)?);
        write_csv(sol, &mut file).map_err(io)
    })
}

/// Classifies the data of a TOML configuration without solving.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cw_classify_toml(toml: *const c_char, out: *mut CwCase) -> CwStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let spec = config(text(toml, "toml")?)?.spec()?;
        *out = case_code(classify_case(&spec)?);
        Ok(())
    })
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// always NUL-terminated when `len > 0`) and returns the full length
/// without the terminator. Returns 0 when the last call succeeded. `buf`
/// may be null to query the length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cw_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
