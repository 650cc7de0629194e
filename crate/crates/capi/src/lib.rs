//! C ABI for the matchlab graph matching pipeline.
//!
//! Conventions: opaque handles (`MlGraph`, `MlMatchResult`) created and
//! freed by this library, status codes for every fallible call, no panics
//! across the boundary. Matrices cross the boundary as row-major `n * n`
//! f64 buffers. A `null` output pointer is reported as
//! `ML_STATUS_NULL_POINTER`; every constructor writes `null` to its output
//! on failure.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use ndarray::Array2;

use matchlab::assignment::Permutation;
use matchlab::error::Error;
use matchlab::faq::{faq_match, Init, MatchOptions, MatchResult};
use matchlab::harness::load_graph;
use matchlab::matchability::accuracy;
use matchlab::usvt::{center, usvt_estimate, ThresholdRule, UsvtOptions};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidSpec = 3,
    Dimension = 4,
    NonFinite = 5,
    SizeLimit = 6,
    Io = 7,
    Parse = 8,
    Numeric = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

/// Opaque symmetric matrix handle (adjacency, weights, or an estimate).
pub struct MlGraph {
    data: Array2<f64>,
}

/// Opaque match result handle.
pub struct MlMatchResult {
    result: MatchResult,
}

fn status_of(err: &Error) -> MlStatus {
    match err {
        Error::InvalidSpec(_) | Error::InfeasibleCorrelation { .. } => MlStatus::InvalidSpec,
        Error::Dimension { .. } => MlStatus::Dimension,
        Error::NonFinite => MlStatus::NonFinite,
        Error::NoConvergence(_) => MlStatus::Numeric,
        Error::SizeLimit { .. } => MlStatus::SizeLimit,
        Error::Parse { .. } | Error::SelfLoop { .. } => MlStatus::Parse,
        Error::Io(_) => MlStatus::Io,
        Error::Config(_) | Error::InvalidArgument(_) | Error::EmptyInput(_) => {
            MlStatus::InvalidArgument
        }
    }
}

fn guarded(body: impl FnOnce() -> MlStatus) -> MlStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => MlStatus::Panic,
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn ml_status_message(status: MlStatus) -> *const c_char {
    let message: &'static [u8] = match status {
        MlStatus::Ok => b"ok\0",
        MlStatus::NullPointer => b"null pointer argument\0",
        MlStatus::InvalidArgument => b"invalid argument\0",
        MlStatus::InvalidSpec => b"model specification invalid or infeasible\0",
        MlStatus::Dimension => b"dimension mismatch\0",
        MlStatus::NonFinite => b"non-finite entries\0",
        MlStatus::SizeLimit => b"problem size exceeds the exact-enumeration limit\0",
        MlStatus::Io => b"I/O error\0",
        MlStatus::Parse => b"parse error\0",
        MlStatus::Numeric => b"numerical failure\0",
        MlStatus::BufferTooSmall => b"output buffer too small\0",
        MlStatus::Panic => b"internal panic\0",
    };
    message.as_ptr() as *const c_char
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn ml_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Builds a graph handle from a row-major `n * n` buffer.
///
/// # Safety
/// `data` must point to at least `n * n` readable f64 values; `out` must be
/// a valid location to store the handle.
#[no_mangle]
pub unsafe extern "C" fn ml_graph_new_dense(
    n: usize,
    data: *const f64,
    out: *mut *mut MlGraph,
) -> MlStatus {
    if out.is_null() {
        return MlStatus::NullPointer;
    }
    unsafe { *out = ptr::null_mut() };
    if data.is_null() {
        return MlStatus::NullPointer;
    }
    guarded(|| {
        let slice = unsafe { std::slice::from_raw_parts(data, n * n) };
        if slice.iter().any(|x| !x.is_finite()) {
            return MlStatus::NonFinite;
        }
        let matrix = Array2::from_shape_vec((n, n), slice.to_vec()).expect("shape");
        unsafe { *out = Box::into_raw(Box::new(MlGraph { data: matrix })) };
        MlStatus::Ok
    })
}

/// Loads an edge-list file (`u v` or `u v w` per line, 0-based ids).
/// `n_hint = 0` means infer the size from the largest vertex id.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ml_graph_load_edge_list(
    path: *const c_char,
    weighted: bool,
    n_hint: usize,
    out: *mut *mut MlGraph,
) -> MlStatus {
    if out.is_null() {
        return MlStatus::NullPointer;
    }
    unsafe { *out = ptr::null_mut() };
    if path.is_null() {
        return MlStatus::NullPointer;
    }
    guarded(|| {
        let path = match unsafe { CStr::from_ptr(path) }.to_str() {
            Ok(s) => PathBuf::from(s),
            Err(_) => return MlStatus::InvalidArgument,
        };
        let hint = if n_hint == 0 { None } else { Some(n_hint) };
        match load_graph(&path, weighted, hint) {
            Ok(matrix) => {
                unsafe { *out = Box::into_raw(Box::new(MlGraph { data: matrix })) };
                MlStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Samples a correlated homogeneous pair: marginals `p`/`q`, correlation
/// `rho`, deterministic in `seed`.
///
/// # Safety
/// `out_a` and `out_b` must be valid locations to store the handles.
#[no_mangle]
pub unsafe extern "C" fn ml_sample_pair(
    n: usize,
    p: f64,
    q: f64,
    rho: f64,
    seed: u64,
    out_a: *mut *mut MlGraph,
    out_b: *mut *mut MlGraph,
) -> MlStatus {
    if out_a.is_null() || out_b.is_null() {
        return MlStatus::NullPointer;
    }
    unsafe {
        *out_a = ptr::null_mut();
        *out_b = ptr::null_mut();
    }
    guarded(|| {
        let spec = matchlab::corr_er::CorrSpec::homogeneous(n, p, q, rho);
        match spec.sample_pair(seed) {
            Ok(pair) => {
                unsafe {
                    *out_a = Box::into_raw(Box::new(MlGraph { data: pair.a }));
                    *out_b = Box::into_raw(Box::new(MlGraph { data: pair.b }));
                }
                MlStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Vertex count of a graph handle (0 for null).
///
/// # Safety
/// `graph` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ml_graph_n(graph: *const MlGraph) -> usize {
    if graph.is_null() {
        return 0;
    }
    unsafe { &*graph }.data.nrows()
}

/// Reads one entry.
///
/// # Safety
/// `graph` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ml_graph_get(
    graph: *const MlGraph,
    i: usize,
    j: usize,
    out: *mut f64,
) -> MlStatus {
    if graph.is_null() || out.is_null() {
        return MlStatus::NullPointer;
    }
    let g = unsafe { &*graph };
    if i >= g.data.nrows() || j >= g.data.ncols() {
        return MlStatus::InvalidArgument;
    }
    unsafe { *out = g.data[[i, j]] };
    MlStatus::Ok
}

/// Copies the dense row-major matrix into `buf` (`len >= n * n`).
///
/// # Safety
/// `graph` must be a live handle; `buf` must point to `len` writable f64s.
#[no_mangle]
pub unsafe extern "C" fn ml_graph_copy_dense(
    graph: *const MlGraph,
    buf: *mut f64,
    len: usize,
) -> MlStatus {
    if graph.is_null() || buf.is_null() {
        return MlStatus::NullPointer;
    }
    let g = unsafe { &*graph };
    let needed = g.data.nrows() * g.data.ncols();
    if len < needed {
        return MlStatus::BufferTooSmall;
    }
    let out = unsafe { std::slice::from_raw_parts_mut(buf, needed) };
    for (dst, src) in out.iter_mut().zip(g.data.iter()) {
        *dst = *src;
    }
    MlStatus::Ok
}

/// Frees a graph handle (null is a no-op).
///
/// # Safety
/// `graph` must be null or a live handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ml_graph_free(graph: *mut MlGraph) {
    if !graph.is_null() {
        drop(unsafe { Box::from_raw(graph) });
    }
}

fn usvt_centered(
    graph: &MlGraph,
    rule: ThresholdRule,
    clip: bool,
    hollow: bool,
) -> Result<Array2<f64>, Error> {
    let opts = UsvtOptions {
        threshold_rule: rule,
        clip_to_unit: clip,
        hollow_output: hollow,
    };
    let estimate = usvt_estimate(&graph.data.view(), &opts)?;
    center(&graph.data.view(), &estimate.q_hat.view())
}

/// Singular value thresholding estimate with an explicit threshold; writes a
/// new graph handle holding the estimate and optionally the retained rank.
///
/// # Safety
/// `graph` must be a live handle; `out` must be valid; `out_rank` may be null.
#[no_mangle]
pub unsafe extern "C" fn ml_usvt_estimate(
    graph: *const MlGraph,
    threshold: f64,
    clip_to_unit: bool,
    hollow_output: bool,
    out: *mut *mut MlGraph,
    out_rank: *mut usize,
) -> MlStatus {
    if out.is_null() {
        return MlStatus::NullPointer;
    }
    unsafe { *out = ptr::null_mut() };
    if graph.is_null() {
        return MlStatus::NullPointer;
    }
    guarded(|| {
        let g = unsafe { &*graph };
        let opts = UsvtOptions {
            threshold_rule: ThresholdRule::Explicit(threshold),
            clip_to_unit,
            hollow_output,
        };
        match usvt_estimate(&g.data.view(), &opts) {
            Ok(estimate) => {
                if !out_rank.is_null() {
                    unsafe { *out_rank = estimate.retained_rank };
                }
                unsafe {
                    *out = Box::into_raw(Box::new(MlGraph {
                        data: estimate.q_hat,
                    }))
                };
                MlStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Centers `graph` by an explicit-threshold USVT estimate of itself,
/// returning `graph - q_hat` as a new handle.
///
/// # Safety
/// `graph` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ml_usvt_center(
    graph: *const MlGraph,
    threshold: f64,
    clip_to_unit: bool,
    hollow_output: bool,
    out: *mut *mut MlGraph,
) -> MlStatus {
    if out.is_null() {
        return MlStatus::NullPointer;
    }
    unsafe { *out = ptr::null_mut() };
    if graph.is_null() {
        return MlStatus::NullPointer;
    }
    guarded(|| {
        let g = unsafe { &*graph };
        match usvt_centered(g, ThresholdRule::Explicit(threshold), clip_to_unit, hollow_output) {
            Ok(matrix) => {
                unsafe { *out = Box::into_raw(Box::new(MlGraph { data: matrix })) };
                MlStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Entrywise difference `a - q_hat` as a new handle.
///
/// # Safety
/// `a` and `q_hat` must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ml_center(
    a: *const MlGraph,
    q_hat: *const MlGraph,
    out: *mut *mut MlGraph,
) -> MlStatus {
    if out.is_null() {
        return MlStatus::NullPointer;
    }
    unsafe { *out = ptr::null_mut() };
    if a.is_null() || q_hat.is_null() {
        return MlStatus::NullPointer;
    }
    guarded(|| {
        let a = unsafe { &*a };
        let q = unsafe { &*q_hat };
        match center(&a.data.view(), &q.data.view()) {
            Ok(matrix) => {
                unsafe { *out = Box::into_raw(Box::new(MlGraph { data: matrix })) };
                MlStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Frank-Wolfe graph matching. `init_identity` starts at the identity
/// permutation, otherwise at the flat doubly stochastic matrix; `restarts`
/// counts total starts (extra starts are seeded random interior points).
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ml_match(
    a: *const MlGraph,
    b: *const MlGraph,
    max_iters: usize,
    rel_tol: f64,
    init_identity: bool,
    restarts: usize,
    seed: u64,
    out: *mut *mut MlMatchResult,
) -> MlStatus {
    if out.is_null() {
        return MlStatus::NullPointer;
    }
    unsafe { *out = ptr::null_mut() };
    if a.is_null() || b.is_null() {
        return MlStatus::NullPointer;
    }
    guarded(|| {
        let a = unsafe { &*a };
        let b = unsafe { &*b };
        let init = if init_identity {
            Init::Permutation(Permutation::identity(a.data.nrows()))
        } else {
            Init::Barycenter
        };
        let opts = MatchOptions {
            max_iters,
            rel_tol,
            init,
            restarts,
            seed,
        };
        match faq_match(&a.data.view(), &b.data.view(), &opts) {
            Ok(result) => {
                unsafe { *out = Box::into_raw(Box::new(MlMatchResult { result })) };
                MlStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// `||A - P B P^T||_F^2` of a match result.
///
/// # Safety
/// `result` must be a live handle (NaN is returned for null).
#[no_mangle]
pub unsafe extern "C" fn ml_match_objective(result: *const MlMatchResult) -> f64 {
    if result.is_null() {
        return f64::NAN;
    }
    unsafe { &*result }.result.objective
}

/// `-tr(A P B P^T)` of a match result.
///
/// # Safety
/// `result` must be a live handle (NaN is returned for null).
#[no_mangle]
pub unsafe extern "C" fn ml_match_trace_objective(result: *const MlMatchResult) -> f64 {
    if result.is_null() {
        return f64::NAN;
    }
    unsafe { &*result }.result.trace_objective
}

/// Frank-Wolfe iterations of the winning start (0 for null).
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ml_match_iterations(result: *const MlMatchResult) -> usize {
    if result.is_null() {
        return 0;
    }
    unsafe { &*result }.result.iterations
}

/// Whether the winning start converged before the iteration cap.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ml_match_converged(result: *const MlMatchResult) -> bool {
    if result.is_null() {
        return false;
    }
    unsafe { &*result }.result.converged
}

/// Copies the matched permutation (vertex `i` of A maps to `buf[i]` of B).
///
/// # Safety
/// `result` must be a live handle; `buf` must point to `len` writable u64s.
#[no_mangle]
pub unsafe extern "C" fn ml_match_permutation(
    result: *const MlMatchResult,
    buf: *mut u64,
    len: usize,
) -> MlStatus {
    if result.is_null() || buf.is_null() {
        return MlStatus::NullPointer;
    }
    let r = unsafe { &*result };
    let image = r.result.permutation.image();
    if len < image.len() {
        return MlStatus::BufferTooSmall;
    }
    let out = unsafe { std::slice::from_raw_parts_mut(buf, image.len()) };
    for (dst, &src) in out.iter_mut().zip(image.iter()) {
        *dst = src as u64;
    }
    MlStatus::Ok
}

/// Fraction of vertices matched to themselves; `core = 0` scores all
/// vertices, otherwise only the first `core`.
///
/// # Safety
/// `result` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ml_match_accuracy_vs_identity(
    result: *const MlMatchResult,
    core: usize,
    out: *mut f64,
) -> MlStatus {
    if result.is_null() || out.is_null() {
        return MlStatus::NullPointer;
    }
    let r = unsafe { &*result };
    let n = r.result.permutation.n();
    if core > n {
        return MlStatus::InvalidArgument;
    }
    let restriction = if core == 0 { None } else { Some(core) };
    let truth = Permutation::identity(n);
    unsafe { *out = accuracy(&r.result.permutation, &truth, restriction) };
    MlStatus::Ok
}

/// Frees a match result handle (null is a no-op).
///
/// # Safety
/// `result` must be null or a live handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ml_match_free(result: *mut MlMatchResult) {
    if !result.is_null() {
        drop(unsafe { Box::from_raw(result) });
    }
}
