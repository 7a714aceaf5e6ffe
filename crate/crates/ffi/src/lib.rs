//! C ABI over `borel_stein`.
//!
//! Every fallible function returns a [`BsStatus`] and writes results through out-pointers.
//! On failure a message is stored per thread and can be read with
//! [`bs_last_error_message`]. Laws and Stein tables are opaque handles that must be released
//! with their `_free` function.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use borel_stein::concentration::{
    exact_tail, lower_tail_bound, optimize_delta, upper_tail_bound, Side, UpperTailParams,
};
use borel_stein::lawkit::{convolve, tv_distance, TruncatedLaw};
use borel_stein::queue::{bound_qbd1, bound_qbd2, ServiceModel};
use borel_stein::sizebias::size_bias;
use borel_stein::stein::{solve_f, SteinTable, TestFunction};
use borel_stein::{BorelParams, Error};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument is outside its domain (lambda, eps, index, delta, ...).
    InvalidArgument = 2,
    /// The parameters are valid but the bound does not apply (lambda >= 1/2 for qbd2).
    OutOfRange = 3,
    /// Window overflow, quadrature failure, or a divergent series.
    NumericFailure = 4,
    /// The output buffer is too small; the required length was written.
    BufferTooSmall = 5,
    /// An internal panic was caught at the boundary.
    Panic = 6,
}

/// Tail side for [`bs_exact_tail`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsSide {
    Lower = 0,
    Upper = 1,
}

/// Opaque finite-window law.
pub struct BsLaw(TruncatedLaw);

/// Opaque Stein coefficient table.
pub struct BsSteinTable(SteinTable);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> BsStatus {
    match e {
        Error::LambdaOutOfRange(_) => BsStatus::OutOfRange,
        Error::WindowOverflow { .. }
        | Error::QuadratureFailure { .. }
        | Error::SumDivergenceGuard(_)
        | Error::UnresolvedTail { .. } => BsStatus::NumericFailure,
        _ => BsStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard<F>(f: F) -> BsStatus
where
    F: FnOnce() -> Result<(), BsStatus>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            BsStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            BsStatus::Panic
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, BsStatus>;
}

impl<T> OrStatus<T> for borel_stein::Result<T> {
    fn or_status(self) -> Result<T, BsStatus> {
        self.map_err(|e| {
            set_error(e.to_string());
            status_of(&e)
        })
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), BsStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        Err(BsStatus::NullPointer)
    } else {
        Ok(())
    }
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), BsStatus> {
    non_null(out, what)?;
    out.write(value);
    Ok(())
}

unsafe fn law_ref<'a>(law: *const BsLaw) -> Result<&'a TruncatedLaw, BsStatus> {
    non_null(law, "law")?;
    Ok(&(*law).0)
}

fn boxed_law(law: TruncatedLaw) -> *mut BsLaw {
    Box::into_raw(Box::new(BsLaw(law)))
}

/// Message for the last failure on this thread; empty after a success. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn bs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// `ln P(Z = j)` for `Z ~ Borel(lambda)`, `j >= 1`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bs_borel_log_pmf(lambda: f64, j: u64, out: *mut f64) -> BsStatus {
    guard(|| {
        let v = BorelParams::new(lambda)
            .and_then(|p| p.log_pmf(j))
            .or_status()?;
        write(out, v, "out")
    })
}

/// Borel law on the smallest window with tail mass at most `eps`.
///
/// # Safety
/// `out` must be valid for writes. The handle written there must be freed with
/// [`bs_law_free`].
#[no_mangle]
pub unsafe extern "C" fn bs_borel_law_new(lambda: f64, eps: f64, out: *mut *mut BsLaw) -> BsStatus {
    guard(|| {
        non_null(out, "out")?;
        let law = BorelParams::new(lambda)
            .and_then(|p| p.law(eps))
            .or_status()?;
        write(out, boxed_law(law), "out")
    })
}

/// Law with `P(start + i) = probs[i]` and mass `tail` above the window.
///
/// # Safety
/// `probs` must point to `len` readable values and `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bs_law_new(
    start: u64,
    probs: *const f64,
    len: usize,
    tail: f64,
    out: *mut *mut BsLaw,
) -> BsStatus {
    guard(|| {
        non_null(probs, "probs")?;
        non_null(out, "out")?;
        let values = std::slice::from_raw_parts(probs, len).to_vec();
        let law = TruncatedLaw::with_start(start, values, tail).or_status()?;
        write(out, boxed_law(law), "out")
    })
}

/// Releases a law handle. Null is ignored.
///
/// # Safety
/// `law` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bs_law_free(law: *mut BsLaw) {
    if !law.is_null() {
        drop(Box::from_raw(law));
    }
}

/// First support point, window length and tail mass.
///
/// # Safety
/// `law` must be a live handle; each out-pointer must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bs_law_shape(
    law: *const BsLaw,
    start: *mut u64,
    len: *mut usize,
    tail: *mut f64,
) -> BsStatus {
    guard(|| {
        let l = law_ref(law)?;
        if !start.is_null() {
            start.write(l.start());
        }
        if !len.is_null() {
            len.write(l.probs().len());
        }
        if !tail.is_null() {
            tail.write(l.tail_mass());
        }
        Ok(())
    })
}

/// `P(j)`, zero outside the window.
///
/// # Safety
/// `law` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bs_law_prob(law: *const BsLaw, j: u64, out: *mut f64) -> BsStatus {
    guard(|| {
        let l = law_ref(law)?;
        write(out, l.prob(j), "out")
    })
}

/// Copies the window probabilities into `buf`. If `cap` is too small nothing is copied,
/// `*written` receives the required length and `BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `buf` must be valid for `cap` writes and `written` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn bs_law_copy_probs(
    law: *const BsLaw,
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> BsStatus {
    guard(|| {
        let l = law_ref(law)?;
        non_null(written, "written")?;
        let probs = l.probs();
        written.write(probs.len());
        if cap < probs.len() {
            set_error(format!("buffer holds {cap} values, {} needed", probs.len()));
            return Err(BsStatus::BufferTooSmall);
        }
        non_null(buf, "buf")?;
        ptr::copy_nonoverlapping(probs.as_ptr(), buf, probs.len());
        Ok(())
    })
}

/// Rigorous bracket on the total variation distance.
///
/// # Safety
/// `a` and `b` must be live handles; `lower` and `upper` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bs_law_tv_distance(
    a: *const BsLaw,
    b: *const BsLaw,
    lower: *mut f64,
    upper: *mut f64,
) -> BsStatus {
    guard(|| {
        let tv = tv_distance(law_ref(a)?, law_ref(b)?);
        write(lower, tv.lower, "lower")?;
        write(upper, tv.upper, "upper")
    })
}

/// Law of the independent sum.
///
/// # Safety
/// `a` and `b` must be live handles and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bs_law_convolve(
    a: *const BsLaw,
    b: *const BsLaw,
    out: *mut *mut BsLaw,
) -> BsStatus {
    guard(|| {
        non_null(out, "out")?;
        let c = convolve(law_ref(a)?, law_ref(b)?);
        write(out, boxed_law(c), "out")
    })
}

/// Size-biased law, `P(W* = j) ∝ j P(W = j)`.
///
/// # Safety
/// `law` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bs_law_size_bias(law: *const BsLaw, out: *mut *mut BsLaw) -> BsStatus {
    guard(|| {
        non_null(out, "out")?;
        let b = size_bias(law_ref(law)?).or_status()?;
        write(out, boxed_law(b), "out")
    })
}

/// Stein coefficient table `a[k][m]` for `2 <= k <= m <= size`.
///
/// # Safety
/// `out` must be valid for writes; free the handle with [`bs_stein_table_free`].
#[no_mangle]
pub unsafe extern "C" fn bs_stein_table_new(
    lambda: f64,
    size: usize,
    out: *mut *mut BsSteinTable,
) -> BsStatus {
    guard(|| {
        non_null(out, "out")?;
        let t = BorelParams::new(lambda)
            .and_then(|p| SteinTable::build(&p, size))
            .or_status()?;
        write(out, Box::into_raw(Box::new(BsSteinTable(t))), "out")
    })
}

/// Releases a table handle. Null is ignored.
///
/// # Safety
/// `table` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bs_stein_table_free(table: *mut BsSteinTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// `a[k][m]`; zero for `m < k`.
///
/// # Safety
/// `table` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bs_stein_table_get(
    table: *const BsSteinTable,
    k: usize,
    m: usize,
    out: *mut f64,
) -> BsStatus {
    guard(|| {
        non_null(table, "table")?;
        let t = &(*table).0;
        if k < 2 || m > t.size() {
            set_error(format!(
                "(k, m) = ({k}, {m}) outside 2 <= k, m <= {}",
                t.size()
            ));
            return Err(BsStatus::InvalidArgument);
        }
        write(out, t.get(k, m), "out")
    })
}

/// Solves the Stein equation for `h` given on `1..=size`, writing `f(1..=size)` to `f_out`.
///
/// # Safety
/// `h` must point to `len` readable values and `f_out` to `len` writable values, where `len`
/// equals the table size.
#[no_mangle]
pub unsafe extern "C" fn bs_stein_solve(
    table: *const BsSteinTable,
    h: *const f64,
    len: usize,
    f_out: *mut f64,
) -> BsStatus {
    guard(|| {
        non_null(table, "table")?;
        non_null(h, "h")?;
        non_null(f_out, "f_out")?;
        let t = &(*table).0;
        let values = std::slice::from_raw_parts(h, len).to_vec();
        let sol = TestFunction::new(values)
            .and_then(|h| solve_f(&h, t))
            .or_status()?;
        ptr::copy_nonoverlapping(sol.values().as_ptr(), f_out, len);
        Ok(())
    })
}

unsafe fn service_from(service: *const c_char) -> Result<ServiceModel, BsStatus> {
    non_null(service, "service")?;
    let s = CStr::from_ptr(service).to_str().map_err(|_| {
        set_error("service string is not UTF-8");
        BsStatus::InvalidArgument
    })?;
    s.parse().or_status()
}

/// `λ² Var(S) / (1-λ)`. `service` is e.g. `"exponential"`, `"gamma:4"`, `"uniform:0.5"` or
/// `"two-point:0.5:0.5"`.
///
/// # Safety
/// `service` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bs_queue_bound_qbd1(
    lambda: f64,
    service: *const c_char,
    out: *mut f64,
) -> BsStatus {
    guard(|| {
        let s = service_from(service)?;
        write(out, bound_qbd1(lambda, &s).or_status()?, "out")
    })
}

/// `λ² E[S|S-1|] / (1-2λ)`; `OUT_OF_RANGE` for `λ >= 1/2`.
///
/// # Safety
/// `service` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bs_queue_bound_qbd2(
    lambda: f64,
    service: *const c_char,
    out: *mut f64,
) -> BsStatus {
    guard(|| {
        let s = service_from(service)?;
        write(out, bound_qbd2(lambda, &s).or_status()?, "out")
    })
}

/// `exp(-t²/2)`.
#[no_mangle]
pub extern "C" fn bs_lower_tail_bound(t: f64) -> f64 {
    lower_tail_bound(t)
}

/// Upper tail bound for a fixed `delta`, with the resulting `gamma` and `K`.
///
/// # Safety
/// `out` must be valid for writes; `gamma` and `k` may be null.
#[no_mangle]
pub unsafe extern "C" fn bs_upper_tail_bound(
    lambda: f64,
    delta: f64,
    t: f64,
    out: *mut f64,
    gamma: *mut f64,
    k: *mut f64,
) -> BsStatus {
    guard(|| {
        let p = UpperTailParams::new(lambda, delta).or_status()?;
        if !(t > 0.0) {
            set_error(format!("t must be positive, got {t}"));
            return Err(BsStatus::InvalidArgument);
        }
        write(out, upper_tail_bound(&p, t), "out")?;
        if !gamma.is_null() {
            gamma.write(p.gamma);
        }
        if !k.is_null() {
            k.write(p.k);
        }
        Ok(())
    })
}

/// `delta` minimizing the upper tail bound at `t`, and the bound.
///
/// # Safety
/// Both out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bs_optimize_delta(
    lambda: f64,
    t: f64,
    delta_out: *mut f64,
    bound_out: *mut f64,
) -> BsStatus {
    guard(|| {
        let (d, b) = optimize_delta(lambda, t).or_status()?;
        write(delta_out, d, "delta_out")?;
        write(bound_out, b, "bound_out")
    })
}

/// Exact standardized tail, in `[value, value + err]`.
///
/// # Safety
/// Both out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bs_exact_tail(
    lambda: f64,
    t: f64,
    side: BsSide,
    value: *mut f64,
    err: *mut f64,
) -> BsStatus {
    guard(|| {
        let side = match side {
            BsSide::Lower => Side::Lower,
            BsSide::Upper => Side::Upper,
        };
        let tail = BorelParams::new(lambda)
            .and_then(|p| exact_tail(&p, t, side))
            .or_status()?;
        write(value, tail.value, "value")?;
        write(err, tail.err, "err")
    })
}
