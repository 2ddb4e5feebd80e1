//! C interface to the kne library.
//!
//! Graphs and models are opaque heap handles released with their `_free`
//! function. Every fallible call returns a [`KneStatus`]; on failure the
//! message is available from [`kne_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufWriter;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kne::graph::load_edge_list;
use kne::{generate_walks, train, EmbeddingModel, Embeddings, Error, Graph, KernelFamily, KernelSpec, TrainConfig, WalkConfig};

/// Result codes of every fallible call.
#[allow(non_camel_case_types)]
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KneStatus {
    KNE_OK = 0,
    KNE_ERR_NULL_POINTER = 1,
    KNE_ERR_INVALID_ARGUMENT = 2,
    KNE_ERR_IO = 3,
    KNE_ERR_PARSE = 4,
    KNE_ERR_DATA = 5,
    KNE_ERR_DIMENSION = 6,
    KNE_ERR_NUMERICAL = 7,
    KNE_ERR_PANIC = 8,
}

pub const KNE_KERNEL_GAUSS: u32 = 0;
pub const KNE_KERNEL_SCH: u32 = 1;

/// An undirected graph.
pub struct KneGraph {
    graph: Graph,
}

/// Trained center embeddings with their node tokens.
pub struct KneModel {
    model: EmbeddingModel,
    tokens: Vec<String>,
}

/// Walk and training settings; fill with [`kne_train_options_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct KneTrainOptions {
    pub num_walks: u32,
    pub walk_length: u32,
    pub window: u32,
    pub p: f64,
    pub q: f64,
    pub dim: u32,
    pub negatives: u32,
    pub epochs: u32,
    pub lr: f64,
    /// `KNE_KERNEL_GAUSS` or `KNE_KERNEL_SCH`.
    pub kernel: u32,
    /// σ² for the Gaussian kernel, α for Schoenberg.
    pub kernel_param: f64,
    pub seed: u64,
    pub threads: u32,
    /// Nonzero: single worker, bit-reproducible.
    pub deterministic: u8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NULs replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> KneStatus {
    match e {
        Error::Io { .. } => KneStatus::KNE_ERR_IO,
        Error::Parse { .. } => KneStatus::KNE_ERR_PARSE,
        Error::Data(_) => KneStatus::KNE_ERR_DATA,
        Error::InvalidArgument(_) => KneStatus::KNE_ERR_INVALID_ARGUMENT,
        Error::DimensionMismatch { .. } => KneStatus::KNE_ERR_DIMENSION,
        Error::Numerical(_) => KneStatus::KNE_ERR_NUMERICAL,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard<F: FnOnce() -> Result<(), (KneStatus, String)>>(f: F) -> KneStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KneStatus::KNE_OK,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            KneStatus::KNE_ERR_PANIC
        }
    }
}

fn lift(e: Error) -> (KneStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (KneStatus, String) {
    (KneStatus::KNE_ERR_NULL_POINTER, format!("{what} is NULL"))
}

unsafe fn path_arg<'a>(path: *const c_char) -> Result<&'a str, (KneStatus, String)> {
    if path.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(path)
        .to_str()
        .map_err(|_| (KneStatus::KNE_ERR_INVALID_ARGUMENT, "path is not valid UTF-8".into()))
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn kne_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kne_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads a whitespace-separated edge list.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kne_graph_load(path: *const c_char, out: *mut *mut KneGraph) -> KneStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = path_arg(path)?;
        let graph = load_edge_list(path).map_err(lift)?;
        *out = Box::into_raw(Box::new(KneGraph { graph }));
        Ok(())
    })
}

/// Builds a graph on nodes `0..n` from `m` edges `(src[i], dst[i])`. Node
/// tokens are the decimal ids.
///
/// # Safety
/// `src` and `dst` must point to `m` readable values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn kne_graph_from_edges(
    src: *const u32,
    dst: *const u32,
    m: usize,
    n: usize,
    out: *mut *mut KneGraph,
) -> KneStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if m > 0 && (src.is_null() || dst.is_null()) {
            return Err(null("edge array"));
        }
        let (s, d) = if m == 0 {
            (&[][..], &[][..])
        } else {
            (std::slice::from_raw_parts(src, m), std::slice::from_raw_parts(dst, m))
        };
        if let Some(&bad) = s.iter().chain(d).find(|&&v| v as usize >= n) {
            return Err((KneStatus::KNE_ERR_INVALID_ARGUMENT, format!("node id {bad} out of range for {n} nodes")));
        }
        let edges: Vec<(u32, u32)> = s.iter().copied().zip(d.iter().copied()).collect();
        let graph = Graph::from_edges((0..n).map(|i| i.to_string()).collect(), &edges).map_err(lift)?;
        *out = Box::into_raw(Box::new(KneGraph { graph }));
        Ok(())
    })
}

/// Largest connected component as a new graph.
///
/// # Safety
/// `graph` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kne_graph_lcc(graph: *const KneGraph, out: *mut *mut KneGraph) -> KneStatus {
    guard(|| {
        let g = graph.as_ref().ok_or_else(|| null("graph"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Box::into_raw(Box::new(KneGraph {
            graph: g.graph.largest_connected_component(),
        }));
        Ok(())
    })
}

/// Node count, or 0 for NULL.
///
/// # Safety
/// `graph` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kne_graph_node_count(graph: *const KneGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.node_count())
}

/// Undirected edge count, or 0 for NULL.
///
/// # Safety
/// `graph` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kne_graph_edge_count(graph: *const KneGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.edge_count())
}

/// # Safety
/// `graph` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn kne_graph_free(graph: *mut KneGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Default settings: 80 walks of length 10, window 10, p = q = 1, d = 128,
/// 5 negatives, one epoch, lr 0.025, Gaussian σ² = 2, seed 0, one thread.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kne_train_options_default(out: *mut KneTrainOptions) {
    let w = WalkConfig::default();
    let t = TrainConfig::default();
    if let Some(o) = out.as_mut() {
        *o = KneTrainOptions {
            num_walks: w.walks_per_node as u32,
            walk_length: w.walk_length as u32,
            window: w.window as u32,
            p: w.p,
            q: w.q,
            dim: t.dim as u32,
            negatives: t.negatives as u32,
            epochs: t.epochs as u32,
            lr: t.lr0,
            kernel: KNE_KERNEL_GAUSS,
            kernel_param: 2.0,
            seed: t.seed,
            threads: 1,
            deterministic: 1,
        };
    }
}

fn kernel_spec(kernel: u32, param: f64) -> Result<KernelSpec, (KneStatus, String)> {
    let family = match kernel {
        KNE_KERNEL_GAUSS => KernelFamily::Gauss,
        KNE_KERNEL_SCH => KernelFamily::Sch,
        other => return Err((KneStatus::KNE_ERR_INVALID_ARGUMENT, format!("unknown kernel {other}"))),
    };
    KernelSpec::new(family, param).map_err(lift)
}

/// Generates walks on `graph` and trains embeddings.
///
/// # Safety
/// `graph` must be a live handle; `options` NULL (defaults) or valid;
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kne_train(
    graph: *const KneGraph,
    options: *const KneTrainOptions,
    out: *mut *mut KneModel,
) -> KneStatus {
    guard(|| {
        let g = graph.as_ref().ok_or_else(|| null("graph"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let o = match options.as_ref() {
            Some(o) => *o,
            None => {
                let mut d = std::mem::zeroed();
                kne_train_options_default(&mut d);
                d
            }
        };
        let kernel = kernel_spec(o.kernel, o.kernel_param)?;
        let deterministic = o.deterministic != 0 || o.threads <= 1;
        let threads = if deterministic { 1 } else { o.threads as usize };
        let walk = WalkConfig {
            walks_per_node: o.num_walks as usize,
            walk_length: o.walk_length as usize,
            p: o.p,
            q: o.q,
            window: o.window as usize,
            seed: o.seed,
            threads,
        };
        let cfg = TrainConfig {
            dim: o.dim as usize,
            negatives: o.negatives as usize,
            lr0: o.lr,
            lr_min: None,
            epochs: o.epochs as usize,
            window: o.window as usize,
            seed: o.seed,
            threads,
            deterministic,
        };
        let corpus = generate_walks(&g.graph, &walk).map_err(lift)?;
        let (model, _) = train(&corpus, &cfg, kernel).map_err(lift)?;
        *out = Box::into_raw(Box::new(KneModel {
            model,
            tokens: g.graph.tokens().to_vec(),
        }));
        Ok(())
    })
}

/// Embedding dimension, or 0 for NULL.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kne_model_dim(model: *const KneModel) -> usize {
    model.as_ref().map_or(0, |m| m.model.dim())
}

/// Number of embedded nodes, or 0 for NULL.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kne_model_node_count(model: *const KneModel) -> usize {
    model.as_ref().map_or(0, |m| m.model.node_count())
}

/// Copies the row-major `node_count × dim` center embeddings into `buf`,
/// which must hold exactly `len` doubles with `len == node_count · dim`.
///
/// # Safety
/// `model` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn kne_model_copy_embeddings(model: *const KneModel, buf: *mut f64, len: usize) -> KneStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let src = m.model.centers();
        if len != src.len() {
            return Err(lift(Error::DimensionMismatch { left: len, right: src.len() }));
        }
        std::slice::from_raw_parts_mut(buf, len).copy_from_slice(src);
        Ok(())
    })
}

/// Writes the center embeddings in word2vec text format.
///
/// # Safety
/// `model` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn kne_model_save(model: *const KneModel, path: *const c_char) -> KneStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let path = path_arg(path)?;
        let emb = Embeddings::from_model(&m.model, &m.tokens).map_err(lift)?;
        let file = File::create(path).map_err(|e| (KneStatus::KNE_ERR_IO, format!("{path}: {e}")))?;
        emb.write(BufWriter::new(file))
            .map_err(|e| (KneStatus::KNE_ERR_IO, format!("{path}: {e}")))
    })
}

/// # Safety
/// `model` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn kne_model_free(model: *mut KneModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Evaluates `κ(x, y)` for `d`-vectors.
///
/// # Safety
/// `x` and `y` must point to `d` readable doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn kne_kernel_eval(
    kernel: u32,
    param: f64,
    x: *const f64,
    y: *const f64,
    d: usize,
    out: *mut f64,
) -> KneStatus {
    guard(|| {
        if x.is_null() || y.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let spec = kernel_spec(kernel, param)?;
        let (x, y) = (std::slice::from_raw_parts(x, d), std::slice::from_raw_parts(y, d));
        *out = spec.eval(x, y).map_err(lift)?;
        Ok(())
    })
}
