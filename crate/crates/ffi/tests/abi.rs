use std::ffi::{c_char, CStr, CString};
use std::ptr;

use ising_wrc::exact::enumerate_ising;
use ising_wrc::WeightedGraph;
use ising_wrc_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    unsafe {
        iw_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

const TRIANGLE: &str = "3 3\nv 0 0.5\nv 1 1\nv 2 0.25\ne 0 1 2\ne 1 2 1.5\ne 0 2 3\n";

fn parse(text: &str) -> *mut IwGraph {
    let c = CString::new(text).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { iw_graph_parse(c.as_ptr(), &mut g) }, IwStatus::Ok);
    g
}

#[test]
fn parse_and_partition_function() {
    let g = parse(TRIANGLE);
    unsafe {
        assert_eq!(iw_graph_vertex_count(g), 3);
        assert_eq!(iw_graph_edge_count(g), 3);
        let mut ln_z = 0.0;
        assert_eq!(iw_log_partition_function(g, 0, &mut ln_z), IwStatus::Ok);
        let expected = enumerate_ising(&WeightedGraph::parse(TRIANGLE).unwrap(), 1 << 10).unwrap().ln_z;
        assert!((ln_z - expected).abs() < 1e-12);

        assert_eq!(iw_log_partition_function(g, 4, &mut ln_z), IwStatus::CapExceeded);
        assert!(last_error().contains("cap"));
        iw_graph_free(g);
    }
}

#[test]
fn errors_are_reported_not_panicked() {
    let bad = CString::new("2 1\nv 0 0.5\nv 1 0.5\ne 0 0 2\n").unwrap();
    let mut g = ptr::null_mut();
    unsafe {
        let status = iw_graph_parse(bad.as_ptr(), &mut g);
        assert_ne!(status, IwStatus::Ok);
        assert!(g.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(iw_graph_parse(ptr::null(), &mut g), IwStatus::NullPointer);
        let mut x = 0.0;
        assert_eq!(iw_log_partition_function(ptr::null(), 0, &mut x), IwStatus::NullPointer);
        iw_graph_free(ptr::null_mut());
        assert_eq!(iw_graph_edge_count(ptr::null()), 0);
    }
}

#[test]
fn array_constructor_validates() {
    let edges = [0u32, 1];
    let lambda = [0.5, 0.5];
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(iw_graph_new(2, 1, edges.as_ptr(), lambda.as_ptr(), [2.0].as_ptr(), &mut g), IwStatus::Ok);
        iw_graph_free(g);
        let mut h = ptr::null_mut();
        assert_eq!(iw_graph_new(2, 1, edges.as_ptr(), lambda.as_ptr(), [0.5].as_ptr(), &mut h), IwStatus::InvalidArgument);
        assert!(h.is_null());
    }
}

#[test]
fn samples_are_seed_deterministic() {
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(iw_graph_grid(3, 2, 1.8, 0.7, &mut g), IwStatus::Ok);
        let (mut a, mut b) = ([9u8; 6], [9u8; 6]);
        let (mut ta, mut tb) = (0u64, 0u64);
        assert_eq!(iw_perfect_ising_sample(g, 11, 0, a.as_mut_ptr(), a.len(), &mut ta), IwStatus::Ok);
        assert_eq!(iw_perfect_ising_sample(g, 11, 0, b.as_mut_ptr(), b.len(), &mut tb), IwStatus::Ok);
        assert_eq!(a, b);
        assert_eq!(ta, tb);
        assert!(a.iter().all(|&x| x <= 1));

        let mut edges = [9u8; 7];
        assert_eq!(iw_perfect_wrc_sample(g, 3, 0, edges.as_mut_ptr(), edges.len(), ptr::null_mut()), IwStatus::Ok);
        assert!(edges.iter().all(|&x| x <= 1));

        let mut short = [0u8; 2];
        assert_eq!(iw_perfect_ising_sample(g, 1, 0, short.as_mut_ptr(), short.len(), ptr::null_mut()), IwStatus::BufferTooSmall);

        let mut state = [0u8; 7];
        for chain in [IwChain::EfWrc, IwChain::EfSg, IwChain::SwWrc, IwChain::SingleBond] {
            assert_eq!(iw_run_chain(g, chain, 5, 100, state.as_mut_ptr(), state.len()), IwStatus::Ok);
        }
        let mut spins = [0u8; 6];
        assert_eq!(iw_run_chain(g, IwChain::SwIsing, 5, 100, spins.as_mut_ptr(), spins.len()), IwStatus::Ok);
        iw_graph_free(g);
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(iw_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
