//! C ABI over `spechc`.
//!
//! Graphs and trees cross the boundary as opaque handles owned by the
//! caller and released with the matching `_free` function. Every fallible
//! call returns a [`SpechcStatus`]; on failure the message is available from
//! [`spechc_last_error`] on the same thread until the next failing call.
//! Strings returned to the caller are released with [`spechc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use spechc::algorithms::{run, AlgoConfig, Algorithm};
use spechc::graph::{build_graph_with, DuplicatePolicy, Graph};
use spechc::tree::{dasgupta_cost, HcTree};
use spechc::Error;

/// Opaque graph handle.
pub struct SpechcGraph(Graph);

/// Opaque hierarchical clustering tree handle.
pub struct SpechcTree(HcTree);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpechcStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad edge data: weights, self-loops, duplicates.
    InvalidGraph = 2,
    /// Bad parameter: k, gamma, eta.
    InvalidArgument = 3,
    Disconnected = 4,
    NoConvergence = 5,
    /// Tree and graph disagree on the vertex set.
    LeafMismatch = 6,
    Io = 7,
    Internal = 8,
    Panic = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SpechcStatus {
    match e {
        Error::NonPositiveWeight { .. }
        | Error::SelfLoop(_)
        | Error::DuplicateEdge(..)
        | Error::VertexOutOfRange { .. }
        | Error::EmptySet => SpechcStatus::InvalidGraph,
        Error::BadConfig(_)
        | Error::BadClusterCount(_)
        | Error::KTooLarge { .. }
        | Error::RankDeficient { .. }
        | Error::BadBeta(_)
        | Error::TooLarge { .. } => SpechcStatus::InvalidArgument,
        Error::Disconnected => SpechcStatus::Disconnected,
        Error::NoConvergence { .. } => SpechcStatus::NoConvergence,
        Error::LeafMismatch(_) | Error::UnknownVertex(_) => SpechcStatus::LeafMismatch,
        Error::Io(_) | Error::Parse { .. } | Error::GraphLoad { .. } | Error::ConfigParse(_) => SpechcStatus::Io,
        _ => SpechcStatus::Internal,
    }
}

/// Runs `f`, turning errors and panics into a status plus the thread-local
/// message.
fn guard(f: impl FnOnce() -> Result<(), SpechcStatus>) -> SpechcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpechcStatus::Ok,
        Ok(Err(s)) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            SpechcStatus::Panic
        }
    }
}

fn fail(e: Error) -> SpechcStatus {
    set_last_error(e.to_string());
    status_of(&e)
}

fn null(what: &str) -> SpechcStatus {
    set_last_error(format!("{what} is null"));
    SpechcStatus::NullPointer
}

/// Message for the last failing call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn spechc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a graph from `m` edges `(us[i], vs[i], ws[i])`. Vertex ids are
/// arbitrary `u64` values, compacted in order of first appearance.
/// Repeated pairs are rejected unless `merge_duplicates` is set.
///
/// # Safety
/// `us`, `vs` and `ws` must each point to `m` readable values; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn spechc_graph_from_edges(
    us: *const u64,
    vs: *const u64,
    ws: *const f64,
    m: usize,
    merge_duplicates: bool,
    out: *mut *mut SpechcGraph,
) -> SpechcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if m > 0 && (us.is_null() || vs.is_null() || ws.is_null()) {
            return Err(null("edge array"));
        }
        let edges: Vec<(u64, u64, f64)> = if m == 0 {
            Vec::new()
        } else {
            let (us, vs, ws) = unsafe {
                (std::slice::from_raw_parts(us, m), std::slice::from_raw_parts(vs, m), std::slice::from_raw_parts(ws, m))
            };
            (0..m).map(|i| (us[i], vs[i], ws[i])).collect()
        };
        let policy = if merge_duplicates { DuplicatePolicy::Merge } else { DuplicatePolicy::Reject };
        let g = build_graph_with(&edges, policy).map_err(fail)?;
        unsafe { *out = Box::into_raw(Box::new(SpechcGraph(g))) };
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spechc_graph_free(g: *mut SpechcGraph) {
    if !g.is_null() {
        drop(unsafe { Box::from_raw(g) });
    }
}

/// Vertex count; 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn spechc_graph_n(g: *const SpechcGraph) -> usize {
    unsafe { g.as_ref() }.map_or(0, |g| g.0.n())
}

/// Edge count; 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn spechc_graph_m(g: *const SpechcGraph) -> usize {
    unsafe { g.as_ref() }.map_or(0, |g| g.0.m())
}

/// Original id of compacted vertex `index`; tree leaves use compacted ids.
///
/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn spechc_graph_vertex_id(g: *const SpechcGraph, index: usize, out: *mut u64) -> SpechcStatus {
    guard(|| {
        let g = unsafe { g.as_ref() }.ok_or_else(|| null("graph"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if index >= g.0.n() {
            return Err(fail(Error::VertexOutOfRange { vertex: index, n: g.0.n() }));
        }
        unsafe { *out = g.0.label(index) };
        Ok(())
    })
}

unsafe fn run_into(
    g: *const SpechcGraph,
    cfg: AlgoConfig,
    out_tree: *mut *mut SpechcTree,
    out_cost: *mut f64,
) -> SpechcStatus {
    guard(|| {
        let g = unsafe { g.as_ref() }.ok_or_else(|| null("graph"))?;
        if out_tree.is_null() {
            return Err(null("out_tree"));
        }
        let out = run(&g.0, &cfg).map_err(fail)?;
        if !out_cost.is_null() {
            unsafe { *out_cost = out.cost };
        }
        unsafe { *out_tree = Box::into_raw(Box::new(SpechcTree(out.tree))) };
        Ok(())
    })
}

fn optional(x: f64) -> Option<f64> {
    (x > 0.0).then_some(x)
}

/// Spectral clustering into `k` parts, degree bucketing and recursive
/// sparsest cut. `gamma <= 0` derives the bucket exponent from the weights.
/// `out_cost` may be null.
///
/// # Safety
/// `g` must be a live graph handle; `out_tree` writable; `out_cost` null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn spechc_spec_wrsc(
    g: *const SpechcGraph,
    k: usize,
    gamma: f64,
    seed: u64,
    out_tree: *mut *mut SpechcTree,
    out_cost: *mut f64,
) -> SpechcStatus {
    let cfg = AlgoConfig { gamma: optional(gamma), ..AlgoConfig::new(Algorithm::SpecWrsc, k, seed) };
    unsafe { run_into(g, cfg, out_tree, out_cost) }
}

/// Caterpillar variant. `eta <= 0` sweeps the bucket ratio.
///
/// # Safety
/// As for [`spechc_spec_wrsc`].
#[no_mangle]
pub unsafe extern "C" fn spechc_caterpillar(
    g: *const SpechcGraph,
    k: usize,
    eta: f64,
    seed: u64,
    out_tree: *mut *mut SpechcTree,
    out_cost: *mut f64,
) -> SpechcStatus {
    let cfg = AlgoConfig { eta: optional(eta), ..AlgoConfig::new(Algorithm::SpecCaterpillar, k, seed) };
    unsafe { run_into(g, cfg, out_tree, out_cost) }
}

/// Agglomerative average linkage.
///
/// # Safety
/// As for [`spechc_spec_wrsc`].
#[no_mangle]
pub unsafe extern "C" fn spechc_average_linkage(
    g: *const SpechcGraph,
    out_tree: *mut *mut SpechcTree,
    out_cost: *mut f64,
) -> SpechcStatus {
    unsafe { run_into(g, AlgoConfig::new(Algorithm::AverageLinkage, 1, 0), out_tree, out_cost) }
}

/// Dasgupta cost of `t` on `g`.
///
/// # Safety
/// `g` and `t` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn spechc_dasgupta_cost(
    g: *const SpechcGraph,
    t: *const SpechcTree,
    out: *mut f64,
) -> SpechcStatus {
    guard(|| {
        let g = unsafe { g.as_ref() }.ok_or_else(|| null("graph"))?;
        let t = unsafe { t.as_ref() }.ok_or_else(|| null("tree"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let c = dasgupta_cost(&g.0, &t.0).map_err(fail)?;
        unsafe { *out = c };
        Ok(())
    })
}

/// Leaf count; 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live tree handle.
#[no_mangle]
pub unsafe extern "C" fn spechc_tree_leaves(t: *const SpechcTree) -> usize {
    unsafe { t.as_ref() }.map_or(0, |t| t.0.n_leaves())
}

/// Height in edges; 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live tree handle.
#[no_mangle]
pub unsafe extern "C" fn spechc_tree_height(t: *const SpechcTree) -> usize {
    unsafe { t.as_ref() }.map_or(0, |t| t.0.height())
}

/// Tree as a JSON document, released with [`spechc_string_free`].
///
/// # Safety
/// `t` must be a live tree handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn spechc_tree_to_json(t: *const SpechcTree, out: *mut *mut c_char) -> SpechcStatus {
    guard(|| {
        let t = unsafe { t.as_ref() }.ok_or_else(|| null("tree"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = CString::new(t.0.to_json()).expect("json has no nul");
        unsafe { *out = s.into_raw() };
        Ok(())
    })
}

/// Parses a tree produced by [`spechc_tree_to_json`].
///
/// # Safety
/// `json` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn spechc_tree_from_json(json: *const c_char, out: *mut *mut SpechcTree) -> SpechcStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = unsafe { CStr::from_ptr(json) }
            .to_str()
            .map_err(|e| fail(Error::MalformedTree(format!("not UTF-8: {e}"))))?;
        let t = HcTree::from_json(text).map_err(fail)?;
        unsafe { *out = Box::into_raw(Box::new(SpechcTree(t))) };
        Ok(())
    })
}

/// # Safety
/// `t` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spechc_tree_free(t: *mut SpechcTree) {
    if !t.is_null() {
        drop(unsafe { Box::from_raw(t) });
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spechc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&Error::Disconnected), SpechcStatus::Disconnected);
        assert_eq!(status_of(&Error::SelfLoop(3)), SpechcStatus::InvalidGraph);
        assert_eq!(status_of(&Error::BadClusterCount(9)), SpechcStatus::InvalidArgument);
        assert_eq!(status_of(&Error::EmptyForest), SpechcStatus::Internal);
    }

    #[test]
    fn panics_become_status() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, SpechcStatus::Panic);
        let msg = unsafe { CStr::from_ptr(spechc_last_error()) }.to_str().unwrap();
        assert_eq!(msg, "panic: boom");
    }
}
