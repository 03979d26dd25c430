use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use bpwa_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    unsafe { bpwa_last_error(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn reference() -> *mut BpwaModel {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { bpwa_model_new(&mut m) }, BpwaStatus::Ok);
    assert!(!m.is_null());
    m
}

#[test]
fn model_lifecycle_and_forcing() {
    let m = reference();
    let mut g = 0.0;
    assert_eq!(unsafe { bpwa_g_wave(m, 0.1, 1.0, &mut g) }, BpwaStatus::Ok);
    assert!(g > 0.0);
    let mut zero = 1.0;
    assert_eq!(unsafe { bpwa_g_wave(m, 0.0, 1.0, &mut zero) }, BpwaStatus::Ok);
    assert_eq!(zero, 0.0);
    unsafe { bpwa_model_free(m) };
    unsafe { bpwa_model_free(ptr::null_mut()) };
}

#[test]
fn null_pointers_are_reported() {
    let mut g = 0.0;
    assert_eq!(unsafe { bpwa_g_wave(ptr::null(), 0.1, 1.0, &mut g) }, BpwaStatus::NullPointer);
    assert!(last_error().contains("null"));
    let m = reference();
    assert_eq!(unsafe { bpwa_g_wave(m, 0.1, 1.0, ptr::null_mut()) }, BpwaStatus::NullPointer);
    assert_eq!(unsafe { bpwa_model_new(ptr::null_mut()) }, BpwaStatus::NullPointer);
    unsafe { bpwa_model_free(m) };
}

#[test]
fn config_text_and_bad_keys() {
    let text = CString::new("gamma = 30\ndelta2 = 0.2\n").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { bpwa_model_from_config(text.as_ptr(), &mut m) }, BpwaStatus::Ok);
    unsafe { bpwa_model_free(m) };
    let bad = CString::new("gama = 30\n").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { bpwa_model_from_config(bad.as_ptr(), &mut m) }, BpwaStatus::InvalidInput);
    assert!(m.is_null());
    assert!(last_error().contains("gama"));
}

#[test]
fn invalid_values_map_to_codes() {
    let mut h = 0.0;
    assert_eq!(unsafe { bpwa_kernel_impulse(-1.0, &mut h) }, BpwaStatus::InvalidInput);
    assert_eq!(unsafe { bpwa_kernel_impulse(0.0, &mut h) }, BpwaStatus::Ok);
    assert!((h - 0.18).abs() < 1e-12);
    let m = reference();
    let mut g = 0.0;
    assert_eq!(unsafe { bpwa_g_wave(m, 0.1, -1.0, &mut g) }, BpwaStatus::InvalidInput);
    unsafe { bpwa_model_free(m) };
}

#[test]
fn steady_states_buffer_protocol() {
    let m = reference();
    let mut n = 0usize;
    let s = unsafe { bpwa_steady_states(m, 0.1, 1.5, ptr::null_mut(), 0, &mut n) };
    assert!(n > 0);
    assert_eq!(s, BpwaStatus::BufferTooSmall);
    let mut buf = vec![BpwaSteadyState::default(); n];
    let mut n2 = 0usize;
    assert_eq!(unsafe { bpwa_steady_states(m, 0.1, 1.5, buf.as_mut_ptr(), n, &mut n2) }, BpwaStatus::Ok);
    assert_eq!(n, n2);
    assert!(buf.iter().all(|s| s.a0 > 0.0 && (0..=2).contains(&s.branch)));
    unsafe { bpwa_model_free(m) };
}

#[test]
fn simulate_intra_well_orbit() {
    let m = reference();
    let (mut motion, mut p) = (BpwaMotion::Diverged, 0.0);
    assert_eq!(unsafe { bpwa_simulate(m, 0.1, 1.5, &mut motion, &mut p) }, BpwaStatus::Ok);
    assert_eq!(motion, BpwaMotion::P1Intra);
    assert!(p > 0.0);
    let mut r = 0.0;
    assert_eq!(unsafe { bpwa_pd_residual(m, 0.05, 1.5, &mut r) }, BpwaStatus::Ok);
    assert!(r.is_finite());
    unsafe { bpwa_model_free(m) };
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(bpwa_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_generated_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/bpwa.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["bpwa_model_new", "bpwa_model_free", "bpwa_steady_states", "bpwa_simulate", "BPWA_STATUS_OK"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR"));
    let src = dir.join("use_header.c");
    std::fs::write(
        &src,
        "#include \"bpwa.h\"\nint main(void) { BpwaModel *m = 0; BpwaStatus s = bpwa_model_new(&m); bpwa_model_free(m); return (int)s; }\n",
    )
    .unwrap();
    let inc = header.parent().unwrap();
    match Command::new("cc").arg("-fsyntax-only").arg("-Wall").arg("-Werror").arg("-I").arg(inc).arg(&src).status() {
        Ok(st) => assert!(st.success(), "header does not compile"),
        Err(e) => eprintln!("no C compiler, syntax check skipped: {e}"),
    }
}
