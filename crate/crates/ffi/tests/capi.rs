use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use drainage::analytic::gamma_exact;
use drainage::{LatticePoint, Model, ModelParams};
use drainage_ffi::*;

fn model(d: usize, p: f64, seed: u64) -> *mut DrainageModel {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { drainage_model_new(d, p, seed, 0, &mut m) }, DrainageStatus::Ok);
    m
}

#[test]
fn labels_and_successors_match_the_library() {
    let m = model(3, 0.4, 11);
    let native = Model::new(ModelParams::new(3, 0.4, 11).unwrap());
    for c in [[0i64, 0, 0], [5, -2, 7], [-1_000_000_000, 3, 1]] {
        let mut u = 0.0;
        let mut open = false;
        let mut next = [0i64; 3];
        let mut jump = 0u32;
        unsafe {
            assert_eq!(drainage_uniform_at(m, c.as_ptr(), 3, &mut u), DrainageStatus::Ok);
            assert_eq!(drainage_is_open(m, c.as_ptr(), 3, &mut open), DrainageStatus::Ok);
            assert_eq!(drainage_successor(m, c.as_ptr(), 3, next.as_mut_ptr(), &mut jump), DrainageStatus::Ok);
        }
        let w = LatticePoint::new(&c);
        assert_eq!(u, native.uniform_at(&w).unwrap());
        assert_eq!(open, u < 0.4);
        let step = native.successor(&w).unwrap();
        assert_eq!(&next[..], step.next.coords());
        assert_eq!(jump, step.level_jump);
    }
    unsafe { drainage_model_free(m) };
}

#[test]
fn traced_path_round_trips() {
    let m = model(2, 0.5, 3);
    let native = Model::new(ModelParams::new(2, 0.5, 3).unwrap()).trace(&LatticePoint::origin(2), 50).unwrap();
    let mut path = ptr::null_mut();
    unsafe {
        assert_eq!(drainage_trace(m, [0i64, 0].as_ptr(), 2, 50, &mut path), DrainageStatus::Ok);
        assert_eq!(drainage_path_len(path), native.vertices.len());
        for (i, v) in native.vertices.iter().enumerate() {
            let mut c = [0i64; 2];
            assert_eq!(drainage_path_vertex(path, i, c.as_mut_ptr()), DrainageStatus::Ok);
            assert_eq!(&c[..], v.coords());
        }
        let mut c = [0i64; 2];
        assert_eq!(drainage_path_vertex(path, native.vertices.len(), c.as_mut_ptr()), DrainageStatus::OutOfRange);
        let mut x = 0.0;
        assert_eq!(drainage_path_at(path, 12.5, &mut x), DrainageStatus::Ok);
        assert_eq!(x, native.path_at(12.5).unwrap());
        drainage_path_free(path);
        drainage_model_free(m);
    }
}

#[test]
fn errors_map_to_codes_and_messages() {
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(drainage_model_new(2, 1.5, 0, 0, &mut m), DrainageStatus::InvalidParameter);
        assert!(m.is_null());
        let msg = CStr::from_ptr(drainage_last_error()).to_str().unwrap();
        assert!(msg.contains('p'), "{msg}");

        let m = model(2, 0.001, 0);
        let mut u = 0.0;
        assert_eq!(drainage_uniform_at(m, [0i64, 0, 0].as_ptr(), 3, &mut u), DrainageStatus::DimensionMismatch);
        assert_eq!(drainage_uniform_at(m, ptr::null(), 2, &mut u), DrainageStatus::NullPointer);
        assert_eq!(drainage_uniform_at(ptr::null(), [0i64, 0].as_ptr(), 2, &mut u), DrainageStatus::NullPointer);
        drainage_model_free(m);

        let mut tight = ptr::null_mut();
        assert_eq!(drainage_model_new(2, 0.001, 0, 1, &mut tight), DrainageStatus::Ok);
        let (mut next, mut jump) = ([0i64; 2], 0u32);
        assert_eq!(
            drainage_successor(tight, [0i64, 0].as_ptr(), 2, next.as_mut_ptr(), &mut jump),
            DrainageStatus::SearchExceeded
        );
        drainage_model_free(tight);
        drainage_model_free(ptr::null_mut());
        drainage_path_free(ptr::null_mut());
        assert_eq!(drainage_path_len(ptr::null()), 0);

        let ok = CStr::from_ptr(drainage_status_message(DrainageStatus::Ok)).to_str().unwrap();
        assert_eq!(ok, "ok");
    }
}

#[test]
fn analytic_values_and_coalescence() {
    let mut g = 0.0;
    let mut s2 = 0.0;
    let mut tail = 0.0;
    unsafe {
        assert_eq!(drainage_gamma_exact(0.5, &mut g), DrainageStatus::Ok);
        assert_eq!(drainage_sigma2_exact(0.5, &mut s2), DrainageStatus::Ok);
        assert_eq!(drainage_y_tail(0.5, 1, &mut tail), DrainageStatus::Ok);
        assert_eq!(drainage_y_tail(0.0, 1, &mut tail), DrainageStatus::InvalidParameter);
    }
    assert_eq!(g, gamma_exact(0.5).unwrap());
    assert!((s2 - 0.8412274123402478).abs() < 1e-12);
    assert_eq!(tail, 0.5f64.powi(3));

    let m = model(2, 0.5, 21);
    let mut rec = DrainageCoalescence::default();
    unsafe {
        assert_eq!(drainage_pair_coalescence(m, 2, 1_000_000, &mut rec), DrainageStatus::Ok);
        assert_eq!(drainage_pair_coalescence(m, 0, 10, &mut rec), DrainageStatus::InvalidParameter);
        drainage_model_free(m);
    }
}

#[test]
fn header_declares_the_interface() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/drainage.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "typedef struct DrainageModel DrainageModel;",
        "typedef struct DrainagePath DrainagePath;",
        "DRAINAGE_STATUS_SEARCH_EXCEEDED = 4",
        "drainage_model_new(",
        "drainage_model_free(",
        "drainage_uniform_at(",
        "drainage_is_open(",
        "drainage_successor(",
        "drainage_trace(",
        "drainage_path_len(",
        "drainage_path_vertex(",
        "drainage_path_at(",
        "drainage_path_free(",
        "drainage_pair_coalescence(",
        "drainage_y_tail(",
        "drainage_gamma_exact(",
        "drainage_sigma2_exact(",
        "drainage_status_message(",
        "drainage_last_error(",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
    // the header must also be valid C when a compiler is present
    if let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-std=c99", "-x", "c"]).arg(&header).output() {
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    // skipped when no C compiler is installed
    let Ok(cc) = Command::new("cc").arg("--version").output() else { return };
    if !cc.status.success() {
        return;
    }
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap();
    assert!(lib_dir.join("libdrainage_ffi.a").exists());
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let out = Command::new("cc")
        .arg(root.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(root.join("include"))
        .arg(lib_dir.join("libdrainage_ffi.a"))
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success());

    let native = Model::new(ModelParams::new(2, 0.5, 3).unwrap()).trace(&LatticePoint::origin(2), 100).unwrap();
    let last = native.vertices.last().unwrap();
    let expected = format!("{} {} {} {:.6}\n", native.vertices.len(), last.coords()[0], last.coords()[1], gamma_exact(0.5).unwrap());
    assert_eq!(String::from_utf8_lossy(&run.stdout), expected);
}
