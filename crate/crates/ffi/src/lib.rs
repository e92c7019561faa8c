//! C interface to the drainage model.
//!
//! Every fallible call returns a [`DrainageStatus`] and writes its result
//! through an out-pointer. Handles are opaque and owned by the caller, who
//! releases them with the matching `_free` function. The text of the most
//! recent error on the calling thread is available from
//! [`drainage_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use drainage::analytic::{gamma_exact, sigma2_exact, y_tail};
use drainage::dynamics::PathRecord;
use drainage::{Error, LatticePoint, Model, ModelParams};

/// Result codes shared by all functions.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DrainageStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    DimensionMismatch = 3,
    SearchExceeded = 4,
    OutOfRange = 5,
    TooLarge = 6,
    Io = 7,
    Panic = 8,
}

/// Environment and successor rule for fixed `(d, p, seed)`.
pub struct DrainageModel(Model);

/// Vertices of a traced path.
pub struct DrainagePath(PathRecord);

/// Outcome of running two walkers until they meet or pass the level cap.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DrainageCoalescence {
    pub n_steps: u64,
    pub t_at_coalescence: i64,
    pub hit_cap: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> DrainageStatus {
    match err {
        Error::InvalidParameter { .. } => DrainageStatus::InvalidParameter,
        Error::DimensionMismatch { .. } => DrainageStatus::DimensionMismatch,
        Error::SearchExceeded { .. } => DrainageStatus::SearchExceeded,
        Error::OutOfRange(_) => DrainageStatus::OutOfRange,
        Error::TooLarge { .. } => DrainageStatus::TooLarge,
        Error::Io(_) => DrainageStatus::Io,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), DrainageStatus>>(f: F) -> DrainageStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DrainageStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_last_error("panic inside the drainage library".into());
            DrainageStatus::Panic
        }
    }
}

fn fail(err: Error) -> DrainageStatus {
    let s = status_of(&err);
    set_last_error(err.to_string());
    s
}

fn null(what: &str) -> DrainageStatus {
    set_last_error(format!("{what} is null"));
    DrainageStatus::NullPointer
}

unsafe fn model_ref<'a>(model: *const DrainageModel) -> Result<&'a Model, DrainageStatus> {
    model.as_ref().map(|m| &m.0).ok_or_else(|| null("model"))
}

unsafe fn point_from(coords: *const i64, d: usize) -> Result<LatticePoint, DrainageStatus> {
    if coords.is_null() {
        return Err(null("coords"));
    }
    Ok(LatticePoint::new(slice::from_raw_parts(coords, d)))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), DrainageStatus> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn drainage_status_message(status: DrainageStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        DrainageStatus::Ok => b"ok\0",
        DrainageStatus::NullPointer => b"null pointer argument\0",
        DrainageStatus::InvalidParameter => b"invalid parameter\0",
        DrainageStatus::DimensionMismatch => b"dimension mismatch\0",
        DrainageStatus::SearchExceeded => b"no open vertex within the search height\0",
        DrainageStatus::OutOfRange => b"argument outside the traced range\0",
        DrainageStatus::TooLarge => b"request too large\0",
        DrainageStatus::Io => b"i/o error\0",
        DrainageStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Message of the last failed call on this thread, or null if none.
///
/// # Safety
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub unsafe extern "C" fn drainage_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates a model. A `max_search_height` of 0 selects the default.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn drainage_model_new(
    d: usize,
    p: f64,
    seed: u64,
    max_search_height: u32,
    out: *mut *mut DrainageModel,
) -> DrainageStatus {
    guard(|| {
        let params = if max_search_height == 0 {
            ModelParams::new(d, p, seed)
        } else {
            ModelParams::with_search_height(d, p, seed, max_search_height)
        }
        .map_err(fail)?;
        write(out, Box::into_raw(Box::new(DrainageModel(Model::new(params)))))
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must come from [`drainage_model_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn drainage_model_free(model: *mut DrainageModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Label `U_w` of the vertex with `d` coordinates at `coords`.
///
/// # Safety
/// `model` must be a live handle, `coords` must point to `d` values and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn drainage_uniform_at(model: *const DrainageModel, coords: *const i64, d: usize, out: *mut f64) -> DrainageStatus {
    guard(|| {
        let m = model_ref(model)?;
        let w = point_from(coords, d)?;
        write(out, m.uniform_at(&w).map_err(fail)?)
    })
}

/// Whether the vertex at `coords` is open.
///
/// # Safety
/// Same requirements as [`drainage_uniform_at`].
#[no_mangle]
pub unsafe extern "C" fn drainage_is_open(model: *const DrainageModel, coords: *const i64, d: usize, out: *mut bool) -> DrainageStatus {
    guard(|| {
        let m = model_ref(model)?;
        let w = point_from(coords, d)?;
        write(out, m.is_open(&w).map_err(fail)?)
    })
}

/// Successor of the vertex at `coords`, written to `out_coords` (`d`
/// values), with the level increment in `out_jump`.
///
/// # Safety
/// `model` must be a live handle, `coords` and `out_coords` must each hold
/// `d` values and `out_jump` must be writable.
#[no_mangle]
pub unsafe extern "C" fn drainage_successor(
    model: *const DrainageModel,
    coords: *const i64,
    d: usize,
    out_coords: *mut i64,
    out_jump: *mut u32,
) -> DrainageStatus {
    guard(|| {
        let m = model_ref(model)?;
        let w = point_from(coords, d)?;
        if out_coords.is_null() || out_jump.is_null() {
            return Err(null("output pointer"));
        }
        let step = m.successor(&w).map_err(fail)?;
        slice::from_raw_parts_mut(out_coords, d).copy_from_slice(step.next.coords());
        write(out_jump, step.level_jump)
    })
}

/// Traces the path from `coords` until its level reaches `horizon` above
/// the start.
///
/// # Safety
/// `model` must be a live handle, `coords` must hold `d` values and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn drainage_trace(
    model: *const DrainageModel,
    coords: *const i64,
    d: usize,
    horizon: i64,
    out: *mut *mut DrainagePath,
) -> DrainageStatus {
    guard(|| {
        let m = model_ref(model)?;
        let w = point_from(coords, d)?;
        let rec = m.trace(&w, horizon).map_err(fail)?;
        write(out, Box::into_raw(Box::new(DrainagePath(rec))))
    })
}

/// Number of vertices on a path, including the start. Zero for null.
///
/// # Safety
/// `path` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn drainage_path_len(path: *const DrainagePath) -> usize {
    path.as_ref().map_or(0, |p| p.0.vertices.len())
}

/// Copies vertex `index` of a path into `out_coords`, which must hold `d`
/// values for the path's dimension.
///
/// # Safety
/// `path` must be a live handle and `out_coords` must have room for `d`
/// values.
#[no_mangle]
pub unsafe extern "C" fn drainage_path_vertex(path: *const DrainagePath, index: usize, out_coords: *mut i64) -> DrainageStatus {
    guard(|| {
        let p = path.as_ref().ok_or_else(|| null("path"))?;
        if out_coords.is_null() {
            return Err(null("output pointer"));
        }
        let v = p.0.vertices.get(index).ok_or_else(|| fail(Error::OutOfRange(format!("vertex {index}"))))?;
        slice::from_raw_parts_mut(out_coords, v.d()).copy_from_slice(v.coords());
        Ok(())
    })
}

/// First spatial coordinate of the interpolated path at level `t`.
///
/// # Safety
/// `path` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn drainage_path_at(path: *const DrainagePath, t: f64, out: *mut f64) -> DrainageStatus {
    guard(|| {
        let p = path.as_ref().ok_or_else(|| null("path"))?;
        write(out, p.0.path_at(t).map_err(fail)?)
    })
}

/// Releases a path. Null is ignored.
///
/// # Safety
/// `path` must come from [`drainage_trace`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn drainage_path_free(path: *mut DrainagePath) {
    if !path.is_null() {
        drop(Box::from_raw(path));
    }
}

/// Runs walkers from `(0,0)` and `(x,0)` in a planar model until they meet
/// or the common level exceeds `t_cap`.
///
/// # Safety
/// `model` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn drainage_pair_coalescence(
    model: *const DrainageModel,
    x: i64,
    t_cap: i64,
    out: *mut DrainageCoalescence,
) -> DrainageStatus {
    guard(|| {
        let m = model_ref(model)?;
        let r = m.pair_coalescence(x, t_cap).map_err(fail)?;
        write(out, DrainageCoalescence { n_steps: r.n_steps, t_at_coalescence: r.t_at_coalescence, hit_cap: r.hit_cap })
    })
}

fn check_p(p: f64) -> Result<(), DrainageStatus> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(fail(Error::invalid("p", format!("must lie in (0,1), got {p}"))))
    }
}

/// `P{Y_1 > m}` in the planar model.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn drainage_y_tail(p: f64, m: u32, out: *mut f64) -> DrainageStatus {
    guard(|| {
        check_p(p)?;
        write(out, y_tail(p, m))
    })
}

/// Mean level increment `gamma(p)` in the planar model.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn drainage_gamma_exact(p: f64, out: *mut f64) -> DrainageStatus {
    guard(|| write(out, gamma_exact(p).map_err(fail)?))
}

/// Variance `sigma^2(p)` of the spatial increment in the planar model.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn drainage_sigma2_exact(p: f64, out: *mut f64) -> DrainageStatus {
    guard(|| write(out, sigma2_exact(p).map_err(fail)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_error_has_a_distinct_code() {
        let errs = [
            Error::invalid("p", "x"),
            Error::DimensionMismatch { expected: 2, got: 3 },
            Error::SearchExceeded { from: LatticePoint::origin(2), limit: 1 },
            Error::OutOfRange("t".into()),
            Error::TooLarge { vertices: 2, limit: 1 },
            Error::Io(std::io::Error::other("x")),
        ];
        let mut codes: Vec<i32> = errs.iter().map(|e| status_of(e) as i32).collect();
        codes.dedup();
        assert_eq!(codes, vec![2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn panics_become_a_status() {
        let prev = std::panic::take_hook();
        std::panic::set_hook(Box::new(|_| {}));
        let s = guard(|| panic!("boom"));
        std::panic::set_hook(prev);
        assert_eq!(s, DrainageStatus::Panic);
    }
}
