//! C ABI over the `sdbc` solver.
//!
//! Every call returns an [`SdbcStatus`]. On failure the message is kept per
//! thread and read back with [`sdbc_last_error`]. Handles are opaque and owned
//! by the caller, who releases them with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use sdbc::bnb::{solve, SolveConfig, SolveResult};
use sdbc::constraints::CutCaps;
use sdbc::model::{gen_synthetic, Assignment, GraphModel, SyntheticConfig};
use sdbc::uai::{read_uai, TableMode};
use sdbc::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdbcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidModel = 3,
    Parse = 4,
    Unsupported = 5,
    Numerical = 6,
    BufferTooSmall = 7,
    Panic = 8,
    Other = 9,
}

/// A pairwise model under construction or loaded from text.
pub struct SdbcModel(GraphModel);

/// The outcome of a solve.
pub struct SdbcResult(SolveResult);

/// Solver options. Initialise with [`sdbc_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SdbcOptions {
    /// Wall-clock budget in seconds; negative means no limit.
    pub budget_sec: f64,
    /// Non-zero restricts bounding to the base constraints.
    pub no_cuts: i32,
    pub seed: u64,
    pub gamma0_scale: f64,
    pub delta: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SdbcStatus {
    match e {
        Error::InvalidModel(_) | Error::InvalidAssignment(_) | Error::InvalidDomain(_) => SdbcStatus::InvalidModel,
        Error::Config(_) | Error::Dimension(_) => SdbcStatus::InvalidArgument,
        Error::Parse { .. } => SdbcStatus::Parse,
        Error::UnsupportedOrder { .. } => SdbcStatus::Unsupported,
        Error::Numerical(_) | Error::InconsistentPrimal(_) => SdbcStatus::Numerical,
        _ => SdbcStatus::Other,
    }
}

struct Fail(SdbcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(SdbcStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SdbcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SdbcStatus::Ok
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            SdbcStatus::Panic
        }
    }
}

unsafe fn slice_in<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn store<T>(out: *mut *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn sdbc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Model with `n` nodes, `labels[p]` states each and all potentials zero.
///
/// # Safety
/// `labels` must point to `n` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdbc_model_new(labels: *const usize, n: usize, out: *mut *mut SdbcModel) -> SdbcStatus {
    guard(|| {
        let labels = slice_in(labels, n, "labels")?.to_vec();
        store(out, SdbcModel(GraphModel::new(labels)?))
    })
}

/// Parses UAI `MARKOV` text. Non-zero `raw_energy` reads tables as energies.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdbc_model_from_uai(
    text: *const c_char,
    raw_energy: i32,
    out: *mut *mut SdbcModel,
) -> SdbcStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Fail(SdbcStatus::Parse, format!("text is not UTF-8: {e}")))?;
        let mode = if raw_energy != 0 {
            TableMode::RawEnergy
        } else {
            TableMode::Potentials
        };
        store(out, SdbcModel(read_uai(s, mode)?))
    })
}

/// Synthetic model with Gaussian potentials.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdbc_model_generate(
    n: usize,
    h: usize,
    kappa: f64,
    omega: f64,
    seed: u64,
    out: *mut *mut SdbcModel,
) -> SdbcStatus {
    guard(|| {
        let cfg = SyntheticConfig {
            n,
            h,
            kappa,
            omega,
            seed,
        };
        store(out, SdbcModel(gen_synthetic(&cfg)?))
    })
}

/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sdbc_model_free(model: *mut SdbcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn sdbc_model_num_nodes(model: *const SdbcModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.num_nodes())
}

/// # Safety
/// `model` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn sdbc_model_num_edges(model: *const SdbcModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.num_edges())
}

/// Replaces the unary energies of node `p`.
///
/// # Safety
/// `model` must be a valid handle; `values` must point to `len` values.
#[no_mangle]
pub unsafe extern "C" fn sdbc_model_set_unary(
    model: *mut SdbcModel,
    p: usize,
    values: *const f64,
    len: usize,
) -> SdbcStatus {
    guard(|| {
        let m = model.as_mut().ok_or_else(|| null("model"))?;
        if p >= m.0.num_nodes() {
            return Err(Fail(SdbcStatus::InvalidArgument, format!("node {p} out of range")));
        }
        m.0.set_unary(p, slice_in(values, len, "values")?.to_vec())?;
        Ok(())
    })
}

/// Adds edge `(p, q)` with a row-major `labels[p] x labels[q]` energy table.
///
/// # Safety
/// `model` must be a valid handle; `table` must point to `len` values.
#[no_mangle]
pub unsafe extern "C" fn sdbc_model_add_edge(
    model: *mut SdbcModel,
    p: usize,
    q: usize,
    table: *const f64,
    len: usize,
) -> SdbcStatus {
    guard(|| {
        let m = model.as_mut().ok_or_else(|| null("model"))?;
        m.0.add_edge(p, q, slice_in(table, len, "table")?.to_vec())?;
        Ok(())
    })
}

/// Energy of the assignment `x`.
///
/// # Safety
/// `model` must be a valid handle; `x` must point to `len` labels; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn sdbc_model_energy(
    model: *const SdbcModel,
    x: *const usize,
    len: usize,
    out: *mut f64,
) -> SdbcStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let x = Assignment(slice_in(x, len, "assignment")?.to_vec());
        let e = m.0.energy(&x)?;
        *out.as_mut().ok_or_else(|| null("out"))? = e;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn sdbc_options_default() -> SdbcOptions {
    let b = SolveConfig::default().bound;
    SdbcOptions {
        budget_sec: -1.0,
        no_cuts: 0,
        seed: b.seed,
        gamma0_scale: b.gamma0_scale,
        delta: b.delta,
    }
}

/// Runs branch-and-bound. `options` may be null for defaults.
///
/// # Safety
/// `model` must be a valid handle; `options` valid or null; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sdbc_solve(
    model: *const SdbcModel,
    options: *const SdbcOptions,
    out: *mut *mut SdbcResult,
) -> SdbcStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let o = options.as_ref().copied().unwrap_or_else(|| sdbc_options_default());
        if o.budget_sec.is_nan() {
            return Err(Fail(SdbcStatus::InvalidArgument, "budget is NaN".into()));
        }
        let mut cfg = SolveConfig::default();
        cfg.budget_sec = (o.budget_sec >= 0.0 && o.budget_sec.is_finite()).then_some(o.budget_sec);
        cfg.bound.seed = o.seed;
        cfg.bound.gamma0_scale = o.gamma0_scale;
        cfg.bound.delta = o.delta;
        if o.no_cuts != 0 {
            cfg.bound.cut_caps = CutCaps::none();
        }
        store(out, SdbcResult(solve(&m.0, &cfg)?))
    })
}

/// # Safety
/// `result` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sdbc_result_free(result: *mut SdbcResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Incumbent energy; `+inf` when no assignment was found.
///
/// # Safety
/// `result` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn sdbc_result_upper_bound(result: *const SdbcResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.0.gub)
}

/// Certified lower bound on the optimum.
///
/// # Safety
/// `result` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn sdbc_result_lower_bound(result: *const SdbcResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.0.glb)
}

/// 1 if the incumbent is certified optimal, else 0.
///
/// # Safety
/// `result` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn sdbc_result_exact(result: *const SdbcResult) -> i32 {
    result.as_ref().map_or(0, |r| r.0.exact as i32)
}

/// 1 if the budget ran out, else 0.
///
/// # Safety
/// `result` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn sdbc_result_timed_out(result: *const SdbcResult) -> i32 {
    result.as_ref().map_or(0, |r| r.0.timed_out as i32)
}

/// Number of bounded nodes.
///
/// # Safety
/// `result` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn sdbc_result_nodes(result: *const SdbcResult) -> usize {
    result.as_ref().map_or(0, |r| r.0.nodes)
}

/// Copies the incumbent into `buf`. `written` receives the node count, also
/// when the buffer is too small.
///
/// # Safety
/// `result` must be a valid handle; `buf` must hold `cap` values; `written`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdbc_result_assignment(
    result: *const SdbcResult,
    buf: *mut usize,
    cap: usize,
    written: *mut usize,
) -> SdbcStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        let written = written.as_mut().ok_or_else(|| null("written"))?;
        let x = r
            .0
            .incumbent
            .as_ref()
            .ok_or_else(|| Fail(SdbcStatus::Other, "no incumbent: the budget expired first".into()))?;
        *written = x.len();
        if cap < x.len() {
            return Err(Fail(
                SdbcStatus::BufferTooSmall,
                format!("buffer holds {cap}, need {}", x.len()),
            ));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        slice::from_raw_parts_mut(buf, x.len()).copy_from_slice(x.as_slice());
        Ok(())
    })
}
