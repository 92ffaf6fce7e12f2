use std::ffi::{CStr, CString};
use std::ptr;

use sdbc_ffi::*;

const T3: &str = include_str!("../../core/tests/fixtures/t3.uai");

fn last_error() -> String {
    let p = sdbc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn solve_built_model_matches_brute_force() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(sdbc_model_new([2usize, 2, 2].as_ptr(), 3, &mut m), SdbcStatus::Ok);
        for (p, q, t) in [(0, 1, [1.0, 0.0, 0.0, 1.0]), (1, 2, [1.0, 0.0, 0.0, 1.0]), (0, 2, [0.0, 1.0, 1.0, 0.0])] {
            assert_eq!(sdbc_model_add_edge(m, p, q, t.as_ptr(), 4), SdbcStatus::Ok);
        }
        let mut best = f64::INFINITY;
        for k in 0..8usize {
            let x = [k & 1, (k >> 1) & 1, (k >> 2) & 1];
            let mut e = 0.0;
            assert_eq!(sdbc_model_energy(m, x.as_ptr(), 3, &mut e), SdbcStatus::Ok);
            best = best.min(e);
        }
        let mut r = ptr::null_mut();
        assert_eq!(sdbc_solve(m, ptr::null(), &mut r), SdbcStatus::Ok);
        assert_eq!(sdbc_result_exact(r), 1);
        assert!((sdbc_result_upper_bound(r) - best).abs() <= 1e-9);
        assert!(sdbc_result_lower_bound(r) <= best + 1e-6);
        let mut x = [0usize; 3];
        let mut n = 0;
        assert_eq!(sdbc_result_assignment(r, x.as_mut_ptr(), 3, &mut n), SdbcStatus::Ok);
        assert_eq!(n, 3);
        let mut e = 0.0;
        sdbc_model_energy(m, x.as_ptr(), 3, &mut e);
        assert_eq!(e, sdbc_result_upper_bound(r));
        sdbc_result_free(r);
        sdbc_model_free(m);
    }
}

#[test]
fn uai_text_round_trip() {
    let text = CString::new(T3).unwrap();
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(sdbc_model_from_uai(text.as_ptr(), 1, &mut m), SdbcStatus::Ok);
        assert_eq!((sdbc_model_num_nodes(m), sdbc_model_num_edges(m)), (3, 3));
        let mut r = ptr::null_mut();
        assert_eq!(sdbc_solve(m, ptr::null(), &mut r), SdbcStatus::Ok);
        assert!((sdbc_result_upper_bound(r) - 1.0).abs() <= 1e-5);
        sdbc_result_free(r);
        sdbc_model_free(m);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let bad = CString::new("MARKUP\n1\n2\n0\n").unwrap();
        let mut m = ptr::null_mut();
        assert_eq!(sdbc_model_from_uai(bad.as_ptr(), 1, &mut m), SdbcStatus::Parse);
        assert!(m.is_null());
        assert!(last_error().contains("line 1"));

        let triple = CString::new("MARKOV\n3\n2 2 2\n1\n3 0 1 2\n8\n0 0 0 0 0 0 0 0\n").unwrap();
        assert_eq!(sdbc_model_from_uai(triple.as_ptr(), 1, &mut m), SdbcStatus::Unsupported);

        assert_eq!(sdbc_model_new(ptr::null(), 2, &mut m), SdbcStatus::NullPointer);
        assert_eq!(sdbc_model_generate(4, 2, 9.0, 0.1, 0, &mut m), SdbcStatus::InvalidArgument);

        assert_eq!(sdbc_model_generate(4, 2, 3.0, 0.1, 0, &mut m), SdbcStatus::Ok);
        assert!(sdbc_last_error().is_null());
        let t = [0.0; 3];
        assert_eq!(sdbc_model_add_edge(m, 0, 1, t.as_ptr(), 3), SdbcStatus::InvalidModel);

        let mut r = ptr::null_mut();
        let mut o = sdbc_options_default();
        o.delta = 0.5;
        assert_eq!(sdbc_solve(m, &o, &mut r), SdbcStatus::InvalidArgument);
        o = sdbc_options_default();
        o.budget_sec = 0.0;
        assert_eq!(sdbc_solve(m, &o, &mut r), SdbcStatus::Ok);
        assert_eq!(sdbc_result_timed_out(r), 1);
        assert_eq!(sdbc_result_upper_bound(r), f64::INFINITY);
        let mut n = 0;
        let mut x = [0usize; 1];
        assert_eq!(sdbc_result_assignment(r, x.as_mut_ptr(), 1, &mut n), SdbcStatus::Other);
        sdbc_result_free(r);

        assert_eq!(sdbc_solve(m, ptr::null(), &mut r), SdbcStatus::Ok);
        assert_eq!(sdbc_result_assignment(r, x.as_mut_ptr(), 1, &mut n), SdbcStatus::BufferTooSmall);
        assert_eq!(n, 4);
        sdbc_result_free(r);
        sdbc_model_free(m);
        sdbc_model_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/sdbc.h")).unwrap();
    for name in [
        "typedef struct SdbcModel SdbcModel",
        "typedef struct SdbcResult SdbcResult",
        "SDBC_STATUS_OK = 0",
        "sdbc_solve(",
        "sdbc_last_error(",
        "sdbc_result_assignment(",
    ] {
        assert!(h.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let src = std::env::temp_dir().join(format!("sdbc_header_{}.c", std::process::id()));
    std::fs::write(
        &src,
        "#include \"sdbc.h\"\nint main(void) { SdbcOptions o = sdbc_options_default(); return o.no_cuts; }\n",
    )
    .unwrap();
    let status = match std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(format!("{dir}/include"))
        .arg(&src)
        .status()
    {
        Ok(s) => s,
        Err(e) => {
            eprintln!("skipping: no C compiler ({e})");
            return;
        }
    };
    std::fs::remove_file(&src).ok();
    assert!(status.success());
}
