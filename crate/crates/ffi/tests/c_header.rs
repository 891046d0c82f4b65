//! Compiles a C program against the generated header and the static library.

use std::path::PathBuf;
use std::process::Command;

fn target_dir() -> PathBuf {
    // Test binaries live in <target>/<profile>/deps.
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/ising_wrc.h")).unwrap();
    for sym in [
        "iw_last_error_message",
        "iw_version",
        "iw_graph_parse",
        "iw_graph_new",
        "iw_graph_grid",
        "iw_graph_free",
        "iw_graph_vertex_count",
        "iw_graph_edge_count",
        "iw_log_partition_function",
        "iw_perfect_ising_sample",
        "iw_perfect_wrc_sample",
        "iw_run_chain",
        "typedef struct IwGraph IwGraph",
    ] {
        assert!(header.contains(sym), "header lacks {sym}");
    }
}

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libising_wrc_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let out = tempfile::tempdir().unwrap();
    let exe = out.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("cc available");
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status);
    let stdout = String::from_utf8(run.stdout).unwrap();
    let ln_z: f64 = stdout.split_whitespace().next().unwrap().parse().unwrap();
    // K2 with λ = 1/2, β = 2: Z = β + 2λ + βλ² = 3.5.
    assert!((ln_z - 3.5f64.ln()).abs() < 1e-9, "{stdout}");
}
