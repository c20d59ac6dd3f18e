use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use qdicke_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(qd_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn scalars() {
    let mut x = 0.0;
    assert_eq!(qd_q_number(2.0, 2.0, &mut x), QdStatus::Ok);
    assert!((x - 2.5).abs() < 1e-15);
    assert_eq!(last_error(), "");
    assert_eq!(qd_q_number(2.0, -1.0, &mut x), QdStatus::Domain);
    assert!(last_error().contains("domain"), "{}", last_error());
    assert_eq!(qd_q_number(2.0, 2.0, ptr::null_mut()), QdStatus::NullPointer);
    assert_eq!(qd_ln_q_binomial(4, 2, 1.0, &mut x), QdStatus::Ok);
    assert!((x - 6f64.ln()).abs() < 1e-14);
    assert_eq!(qd_mean_field_hc(1000, 1.0, &mut x), QdStatus::Ok);
    assert!((x - 0.999).abs() < 1e-12);
    let version = unsafe { CStr::from_ptr(qd_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn schmidt_buffer_contract() {
    let mut buf = [0.0; 2];
    assert_eq!(qd_schmidt_spectrum(2, 1, 1, 2.0, buf.as_mut_ptr(), 2), QdStatus::Ok);
    assert!((buf[0] - 0.8).abs() < 1e-15 && (buf[1] - 0.2).abs() < 1e-15);
    assert_eq!(qd_schmidt_spectrum(4, 1, 3, 2.0, buf.as_mut_ptr(), 2), QdStatus::BufferTooSmall);
    assert_eq!(qd_schmidt_spectrum(2, 3, 1, 2.0, buf.as_mut_ptr(), 2), QdStatus::Domain);
    let mut s = 0.0;
    assert_eq!(qd_basis_entropy(2, 1, 1, 1.0, &mut s), QdStatus::Ok);
    assert_eq!(s, 1.0);
}

#[test]
fn state_handles() {
    let alphas = [0.0, 1.0, 0.0];
    let mut state = ptr::null_mut();
    assert_eq!(qd_state_new(alphas.as_ptr(), 3, &mut state), QdStatus::Ok);
    assert!(!state.is_null());
    let (mut n, mut s) = (0usize, 0.0);
    assert_eq!(qd_state_n(state, &mut n), QdStatus::Ok);
    assert_eq!(n, 2);
    assert_eq!(qd_state_entropy(state, 1, 1.0, &mut s), QdStatus::Ok);
    assert!((s - 1.0).abs() < 1e-14);
    assert_eq!(qd_state_entropy(state, 5, 1.0, &mut s), QdStatus::Domain);
    qd_state_free(state);
    qd_state_free(ptr::null_mut());

    let bad = [0.5, 0.5];
    let mut other = ptr::null_mut();
    assert_eq!(qd_state_new(bad.as_ptr(), 2, &mut other), QdStatus::Domain);
    assert!(other.is_null());
    assert_eq!(qd_state_new(ptr::null(), 2, &mut other), QdStatus::NullPointer);
    assert_eq!(qd_state_n(ptr::null(), &mut n), QdStatus::NullPointer);
}

#[test]
fn sweep_handles() {
    let mut sweep = ptr::null_mut();
    assert_eq!(qd_lmg_sweep(200, 100, 1.0, 0.5, 1.5, 41, 1.0, &mut sweep), QdStatus::Ok);
    let mut len = 0;
    assert_eq!(qd_sweep_len(sweep, &mut len), QdStatus::Ok);
    assert_eq!(len, 41);
    let mut row = QdSweepRow { h: 0.0, ground_energy: 0.0, entropy_bits: 0.0, gap: 0.0, degenerate: false, ok: false };
    assert_eq!(qd_sweep_row(sweep, 40, &mut row), QdStatus::Ok);
    assert!(row.ok && row.h == 1.5 && row.entropy_bits > 0.0);
    assert_eq!(qd_sweep_row(sweep, 41, &mut row), QdStatus::IndexOutOfRange);
    let mut cusp = QdCusp { h_c: 0.0, confidence: 0.0, step: 0.0 };
    assert_eq!(qd_sweep_cusp(sweep, &mut cusp), QdStatus::Ok);
    assert!((cusp.h_c - 1.0).abs() < 0.1, "{cusp:?}");
    qd_sweep_free(sweep);

    let mut failed = ptr::null_mut();
    assert_eq!(qd_lmg_sweep(1000, 500, 3.0, 0.0, 2.0, 11, 1.0, &mut failed), QdStatus::Range);
    assert!(last_error().contains("largest usable"));
    assert!(failed.is_null());
}

#[test]
fn no_cusp_is_reported() {
    // Without coupling the ground state is a product state at every field.
    let mut sweep = ptr::null_mut();
    assert_eq!(qd_lmg_sweep(20, 10, 1.0, 0.1, 1.0, 11, 0.0, &mut sweep), QdStatus::Ok);
    let mut cusp = QdCusp { h_c: 0.0, confidence: 0.0, step: 0.0 };
    assert_eq!(qd_sweep_cusp(sweep, &mut cusp), QdStatus::NoCusp);
    assert_eq!(cusp.h_c, 0.0);
    qd_sweep_free(sweep);
}

const C_PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "qdicke.h"

int main(void) {
    double p[2];
    if (qd_schmidt_spectrum(2, 1, 1, 2.0, p, 2) != QD_STATUS_OK) return 1;
    if (fabs(p[0] - 0.8) > 1e-15 || fabs(p[1] - 0.2) > 1e-15) return 2;
    double alphas[3] = {0.0, 1.0, 0.0};
    QdState *state = NULL;
    if (qd_state_new(alphas, 3, &state) != QD_STATUS_OK) return 3;
    double s = 0.0;
    if (qd_state_entropy(state, 1, 1.0, &s) != QD_STATUS_OK || fabs(s - 1.0) > 1e-14) return 4;
    qd_state_free(state);
    if (qd_q_number(1.0, -2.0, &s) != QD_STATUS_DOMAIN) return 5;
    printf("%s\n", qd_last_error());
    return 0;
}
"#;

/// Compiles a C client against the generated header and the static library.
#[test]
fn c_client_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libqdicke_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let work = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("ffi_c_client");
    std::fs::create_dir_all(&work).unwrap();
    let src = work.join("client.c");
    let bin = work.join("client");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&bin)
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success(), "C client failed to build");
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("domain error"));
}
