//! C ABI over the `ising-wrc` library.
//!
//! Graphs live behind the opaque `IwGraph` handle. Every fallible call
//! returns an [`IwStatus`]; on failure the message is kept per thread and can
//! be copied out with [`iw_last_error_message`]. Panics never cross the
//! boundary and are reported as `IW_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ising_wrc::cftp::{cftp_sample, perfect_ising_sample, CftpOptions, DEFAULT_MAX_STEPS};
use ising_wrc::dynamics::run_chain_with;
use ising_wrc::exact::{enumerate_ising, DEFAULT_ENUM_CAP};
use ising_wrc::{generators, params_from_ising, ChainKind, ChainState, Dynamics, EdgeSubset, Error, RngStream, SpinConfig, WeightedGraph};

/// Status codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    CapExceeded = 4,
    NonCoalescence = 5,
    Io = 6,
    BufferTooSmall = 7,
    Internal = 8,
    Panic = 9,
}

/// Chains runnable through [`iw_run_chain`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IwChain {
    EfWrc = 0,
    EfSg = 1,
    SwIsing = 2,
    SwWrc = 3,
    SingleBond = 4,
}

impl From<IwChain> for ChainKind {
    fn from(c: IwChain) -> Self {
        match c {
            IwChain::EfWrc => ChainKind::EfWrc,
            IwChain::EfSg => ChainKind::EfSg,
            IwChain::SwIsing => ChainKind::SwIsing,
            IwChain::SwWrc => ChainKind::SwWrc,
            IwChain::SingleBond => ChainKind::SingleBond,
        }
    }
}

/// Opaque graph handle.
pub struct IwGraph(WeightedGraph);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> IwStatus {
    match e {
        Error::Parse { .. } => IwStatus::Parse,
        Error::CapExceeded { .. } => IwStatus::CapExceeded,
        Error::NonCoalescence { .. } => IwStatus::NonCoalescence,
        Error::Io(_) => IwStatus::Io,
        Error::InvalidParameter(_) | Error::InvalidGraph(_) | Error::DimensionMismatch { .. } => IwStatus::InvalidArgument,
        _ => IwStatus::Internal,
    }
}

struct Failure(IwStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(IwStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IwStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            IwStatus::Panic
        }
    }
}

unsafe fn graph_ref<'a>(g: *const IwGraph) -> Result<&'a WeightedGraph, Failure> {
    g.as_ref().map(|h| &h.0).ok_or_else(|| null("graph"))
}

unsafe fn out_slice<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn in_slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn store_graph(out: *mut *mut IwGraph, g: WeightedGraph) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(IwGraph(g)));
    Ok(())
}

/// Copy the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn iw_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn iw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parse a graph in the text format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iw_graph_parse(text: *const c_char, out: *mut *mut IwGraph) -> IwStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Failure(IwStatus::InvalidArgument, format!("text is not UTF-8: {e}")))?;
        store_graph(out, WeightedGraph::parse(s)?)
    })
}

/// Build a graph from arrays: `edges` holds `2 * m` endpoints, `lambda` has
/// `n` entries in `(0, 1]` and `beta` has `m` entries `> 1`.
///
/// # Safety
/// Arrays must have the stated lengths; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iw_graph_new(
    n: usize,
    m: usize,
    edges: *const u32,
    lambda: *const f64,
    beta: *const f64,
    out: *mut *mut IwGraph,
) -> IwStatus {
    guard(|| {
        let ends = in_slice(edges, 2 * m, "edges")?;
        let lambda = in_slice(lambda, n, "lambda")?.to_vec();
        let beta = in_slice(beta, m, "beta")?.to_vec();
        let edges = ends.chunks_exact(2).map(|c| (c[0] as usize, c[1] as usize)).collect();
        store_graph(out, WeightedGraph::new(n, edges, lambda, beta)?)
    })
}

/// `width × height` grid with uniform parameters.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iw_graph_grid(width: usize, height: usize, beta: f64, lambda: f64, out: *mut *mut IwGraph) -> IwStatus {
    guard(|| store_graph(out, generators::grid(width, height, beta, lambda)?))
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `g` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn iw_graph_free(g: *mut IwGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Vertex count, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn iw_graph_vertex_count(g: *const IwGraph) -> usize {
    g.as_ref().map_or(0, |h| h.0.n())
}

/// Edge count, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn iw_graph_edge_count(g: *const IwGraph) -> usize {
    g.as_ref().map_or(0, |h| h.0.m())
}

/// `ln Z_Ising` by enumeration over at most `cap` configurations
/// (`cap == 0` uses the library default).
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iw_log_partition_function(g: *const IwGraph, cap: u64, out: *mut f64) -> IwStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let cap = if cap == 0 { DEFAULT_ENUM_CAP } else { cap as u128 };
        *out = enumerate_ising(g, cap)?.ln_z;
        Ok(())
    })
}

fn cftp_options(max_steps: u64) -> CftpOptions {
    CftpOptions { max_steps: if max_steps == 0 { DEFAULT_MAX_STEPS } else { max_steps }, check_sandwich: false, ..CftpOptions::default() }
}

fn check_len(len: usize, expected: usize) -> Result<(), Failure> {
    if len < expected {
        return Err(Failure(IwStatus::BufferTooSmall, format!("buffer holds {len} entries, need {expected}")));
    }
    Ok(())
}

/// Perfect sample from the Ising distribution. Writes one 0/1 byte per
/// vertex into `spins` and the coalescence time into `coalescence_time`
/// (may be null). `max_steps == 0` uses the default abort threshold.
///
/// # Safety
/// `g` must be a live handle; `spins` must hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn iw_perfect_ising_sample(
    g: *const IwGraph,
    seed: u64,
    max_steps: u64,
    spins: *mut u8,
    len: usize,
    coalescence_time: *mut u64,
) -> IwStatus {
    guard(|| {
        let g = graph_ref(g)?;
        check_len(len, g.n())?;
        let buf = out_slice(spins, g.n(), "spins")?;
        let (sigma, outcome) = perfect_ising_sample(g, seed, &cftp_options(max_steps))?;
        write_bits(buf, |v| sigma.get(v));
        if let Some(t) = coalescence_time.as_mut() {
            *t = outcome.coalescence_time;
        }
        Ok(())
    })
}

/// Perfect sample from the weighted random-cluster distribution of the
/// Ising instance. Writes one 0/1 byte per edge.
///
/// # Safety
/// `g` must be a live handle; `edges` must hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn iw_perfect_wrc_sample(
    g: *const IwGraph,
    seed: u64,
    max_steps: u64,
    edges: *mut u8,
    len: usize,
    coalescence_time: *mut u64,
) -> IwStatus {
    guard(|| {
        let g = graph_ref(g)?;
        check_len(len, g.m())?;
        let buf = out_slice(edges, g.m(), "edges")?;
        let w = params_from_ising(g)?.wrc;
        let outcome = cftp_sample(g, &w, seed, &cftp_options(max_steps))?;
        write_bits(buf, |e| outcome.sample.get(e));
        if let Some(t) = coalescence_time.as_mut() {
            *t = outcome.coalescence_time;
        }
        Ok(())
    })
}

/// Run `steps` steps of a chain from the all-zero state. Spin chains write
/// `n` bytes into `state`, edge chains `m` bytes.
///
/// # Safety
/// `g` must be a live handle; `state` must hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn iw_run_chain(
    g: *const IwGraph,
    chain: IwChain,
    seed: u64,
    steps: u64,
    state: *mut u8,
    len: usize,
) -> IwStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let kind = ChainKind::from(chain);
        let start = match kind {
            ChainKind::SwIsing => ChainState::Spins(SpinConfig::empty(g.n())),
            _ => ChainState::Edges(EdgeSubset::empty(g.m())),
        };
        let width = start.width();
        check_len(len, width)?;
        let buf = out_slice(state, width, "state")?;
        let mut dynamics = Dynamics::from_ising(g)?;
        let mut rng = RngStream::new(seed);
        let end = run_chain_with(&mut dynamics, kind, start, steps, &mut rng, 0, |_, _| Ok(()))?;
        match &end {
            ChainState::Spins(s) => write_bits(buf, |i| s.get(i)),
            ChainState::Edges(s) => write_bits(buf, |i| s.get(i)),
        }
        Ok(())
    })
}

fn write_bits(buf: &mut [u8], bit: impl Fn(usize) -> bool) {
    for (i, b) in buf.iter_mut().enumerate() {
        *b = bit(i) as u8;
    }
}
