//! C ABI over the `heis` library.
//!
//! Graphs are handed out as opaque `HeisGraph` pointers and released with
//! `heis_graph_free`. Every fallible call returns a `HeisStatus`; on failure
//! `heis_last_error_message` describes the last error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use heis::eigen::sector_spectrum;
use heis::foel::{energy_level, foel_check};
use heis::graph::{load_graph, make_box, make_lambda, make_ring};
use heis::{Graph, HeisError};

/// Opaque graph handle.
pub struct HeisGraph {
    inner: Graph,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeisStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SizeLimit = 3,
    Parse = 4,
    Convergence = 5,
    Numerical = 6,
    Labeling = 7,
    Domain = 8,
    Io = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &HeisError) -> HeisStatus {
    match err {
        HeisError::Argument(_) => HeisStatus::InvalidArgument,
        HeisError::Size(_) => HeisStatus::SizeLimit,
        HeisError::Parse { .. } => HeisStatus::Parse,
        HeisError::Convergence { .. } => HeisStatus::Convergence,
        HeisError::Numerical(_) => HeisStatus::Numerical,
        HeisError::Labeling { .. } => HeisStatus::Labeling,
        HeisError::Domain(_) => HeisStatus::Domain,
        HeisError::Io(_) => HeisStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (HeisStatus, String)>) -> HeisStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HeisStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside the heis library");
            HeisStatus::Panic
        }
    }
}

fn lift<T>(r: heis::Result<T>) -> Result<T, (HeisStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (HeisStatus, String) {
    (HeisStatus::NullPointer, format!("{what} is null"))
}

fn emit_graph(r: heis::Result<Graph>, out: *mut *mut HeisGraph) -> HeisStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let g = lift(r)?;
        unsafe { *out = Box::into_raw(Box::new(HeisGraph { inner: g })) };
        Ok(())
    })
}

/// Message of the last failed call on this thread. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn heis_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn heis_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Box `{1..l}^d` with nearest-neighbour edges.
#[no_mangle]
pub extern "C" fn heis_graph_box(d: usize, l: usize, out: *mut *mut HeisGraph) -> HeisStatus {
    emit_graph(make_box(d, l), out)
}

/// The `n`-vertex member of the lexicographically grown box family.
#[no_mangle]
pub extern "C" fn heis_graph_lambda(d: usize, n: usize, out: *mut *mut HeisGraph) -> HeisStatus {
    emit_graph(make_lambda(d, n), out)
}

#[no_mangle]
pub extern "C" fn heis_graph_ring(l: usize, out: *mut *mut HeisGraph) -> HeisStatus {
    emit_graph(make_ring(l), out)
}

/// Loads an edge-list file (`u v [J]` per line).
///
/// # Safety
/// `path` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn heis_graph_load(path: *const c_char, out: *mut *mut HeisGraph) -> HeisStatus {
    if path.is_null() {
        set_error("path is null");
        return HeisStatus::NullPointer;
    }
    let path = match unsafe { CStr::from_ptr(path) }.to_str() {
        Ok(p) => p.to_owned(),
        Err(e) => {
            set_error(&format!("path is not UTF-8: {e}"));
            return HeisStatus::InvalidArgument;
        }
    };
    emit_graph(load_graph(path), out)
}

/// Releases a graph. Null is ignored.
///
/// # Safety
/// `g` must come from a `heis_graph_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn heis_graph_free(g: *mut HeisGraph) {
    if !g.is_null() {
        drop(unsafe { Box::from_raw(g) });
    }
}

/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn heis_graph_vertex_count(g: *const HeisGraph) -> usize {
    unsafe { g.as_ref() }.map_or(0, |g| g.inner.vertex_count())
}

/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn heis_graph_edge_count(g: *const HeisGraph) -> usize {
    unsafe { g.as_ref() }.map_or(0, |g| g.inner.edge_count())
}

/// Lowest energy with spin deviate `n`; `+inf` when `n > |V|/2`.
///
/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn heis_energy_level(g: *const HeisGraph, n: usize, out: *mut f64) -> HeisStatus {
    guard(|| {
        let g = unsafe { g.as_ref() }.ok_or_else(|| null("graph"))?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let e = lift(energy_level(&g.inner, n))?;
        unsafe { *out = e };
        Ok(())
    })
}

/// Checks `E_{n'} >= E_n` for all `n' >= n` (strictly `>` when `strict`).
/// `out_margin` receives `min_{n'>n} E_{n'} - E_n`, or `+inf` if `n` is the
/// top level. Either output pointer may be null.
///
/// # Safety
/// `g` must be a live graph handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn heis_foel_check(
    g: *const HeisGraph,
    n: usize,
    strict: bool,
    tol: f64,
    out_holds: *mut bool,
    out_margin: *mut f64,
) -> HeisStatus {
    guard(|| {
        let g = unsafe { g.as_ref() }.ok_or_else(|| null("graph"))?;
        let v = lift(foel_check(&g.inner, n, strict, tol))?;
        if !v.complete {
            return Err((HeisStatus::Numerical, v.error.unwrap_or_default()));
        }
        if let Some(h) = unsafe { out_holds.as_mut() } {
            *h = v.holds;
        }
        if let Some(m) = unsafe { out_margin.as_mut() } {
            *m = v.min_margin.unwrap_or(f64::INFINITY);
        }
        Ok(())
    })
}

/// Ascending eigenvalues of the `n`-magnon sector. `out_len` always
/// receives the sector dimension; if `cap` is smaller nothing is copied and
/// `BufferTooSmall` is returned.
///
/// # Safety
/// `g` must be a live graph handle, `buf` valid for `cap` writes (or null
/// when `cap` is 0), and `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn heis_sector_spectrum(
    g: *const HeisGraph,
    n: usize,
    buf: *mut f64,
    cap: usize,
    out_len: *mut usize,
) -> HeisStatus {
    guard(|| {
        let g = unsafe { g.as_ref() }.ok_or_else(|| null("graph"))?;
        if out_len.is_null() {
            return Err(null("length pointer"));
        }
        let spec = lift(sector_spectrum(&g.inner, n))?;
        let values: Vec<f64> = spec
            .levels
            .iter()
            .flat_map(|l| std::iter::repeat_n(l.energy, l.multiplicity))
            .collect();
        unsafe { *out_len = values.len() };
        if cap < values.len() {
            return Err((HeisStatus::BufferTooSmall, format!("buffer holds {cap}, need {}", values.len())));
        }
        if buf.is_null() && !values.is_empty() {
            return Err(null("buffer"));
        }
        if !values.is_empty() {
            unsafe { std::ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len()) };
        }
        Ok(())
    })
}
