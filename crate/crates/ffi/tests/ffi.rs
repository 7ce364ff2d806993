use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use shrinkcut_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(shrinkcut_last_error()) }.to_string_lossy().into_owned()
}

fn small_config(n: usize) -> *mut ShrinkcutConfig {
    let cfg = shrinkcut_config_new(n, 1);
    unsafe {
        assert_eq!(shrinkcut_config_set(cfg, ShrinkcutSetting::Restarts, 2), ShrinkcutStatus::Ok);
        assert_eq!(shrinkcut_config_set(cfg, ShrinkcutSetting::MaxEvals, 40), ShrinkcutStatus::Ok);
        assert_eq!(shrinkcut_config_set(cfg, ShrinkcutSetting::Shots, 1000), ShrinkcutStatus::Ok);
    }
    cfg
}

#[test]
fn run_and_query() {
    let cfg = small_config(4);
    let dir = tempfile::tempdir().unwrap();
    let out_dir = CString::new(dir.path().to_str().unwrap()).unwrap();
    let mut run = ptr::null_mut();
    unsafe {
        assert_eq!(shrinkcut_run(cfg, out_dir.as_ptr(), &mut run), ShrinkcutStatus::Ok);
        let mut s = ShrinkcutSummary::default();
        assert_eq!(shrinkcut_run_summary(run, &mut s), ShrinkcutStatus::Ok);
        assert_eq!(s.maxcut_vertices, 10);
        assert_eq!(s.shrunk_vertices, 10 - s.separator_size + 1);
        assert_eq!(s.kappa, 12.0);
        assert!((s.expectation_cut - s.expectation_uncut).abs() < 1e-9);

        let mut len = 0;
        assert_eq!(shrinkcut_run_best_tour(run, ptr::null_mut(), 0, &mut len), ShrinkcutStatus::InvalidArgument);
        assert_eq!(len, 4);
        let mut tour = vec![usize::MAX; len];
        assert_eq!(shrinkcut_run_best_tour(run, tour.as_mut_ptr(), len, &mut len), ShrinkcutStatus::Ok);
        let mut sorted = tour.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2, 3]);

        let mut json = ptr::null_mut();
        assert_eq!(shrinkcut_run_report_json(run, &mut json), ShrinkcutStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        shrinkcut_string_free(json);
        assert_eq!(text, std::fs::read_to_string(dir.path().join("report.json")).unwrap());

        shrinkcut_run_free(run);
        shrinkcut_config_free(cfg);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut run = ptr::null_mut();
        assert_eq!(shrinkcut_run(ptr::null(), ptr::null(), &mut run), ShrinkcutStatus::NullPointer);
        assert!(!last_error().is_empty());

        let bad = shrinkcut_config_new(2, 0);
        assert_eq!(shrinkcut_run(bad, ptr::null(), &mut run), ShrinkcutStatus::StageFailed);
        assert!(run.is_null());
        assert!(last_error().contains("config"), "{}", last_error());
        shrinkcut_config_free(bad);

        let cfg = small_config(4);
        let missing = CString::new("/nonexistent/instance.json").unwrap();
        assert_eq!(shrinkcut_config_set_instance_file(cfg, missing.as_ptr()), ShrinkcutStatus::Ok);
        assert_eq!(shrinkcut_run(cfg, ptr::null(), &mut run), ShrinkcutStatus::Io);
        assert_eq!(shrinkcut_config_set(cfg, ShrinkcutSetting::TieBreak, 1), ShrinkcutStatus::Ok);
        assert_eq!(shrinkcut_config_set(cfg, ShrinkcutSetting::TieBreak, 2), ShrinkcutStatus::InvalidArgument);
        shrinkcut_config_free(cfg);

        let (mut n, mut nt) = (0, 0);
        assert_eq!(shrinkcut_sampling_overhead(0.01, 0.5, 1.0, &mut n, &mut nt), ShrinkcutStatus::Ok);
        assert_eq!((n, nt), (7, 7));
        assert_eq!(shrinkcut_sampling_overhead(2.0, 0.5, 1.0, &mut n, &mut nt), ShrinkcutStatus::InvalidArgument);
        assert_eq!(shrinkcut_sampling_overhead(0.1, 0.5, 1.0, ptr::null_mut(), &mut nt), ShrinkcutStatus::NullPointer);

        let (mut h, mut p) = (1.0, 1.0);
        assert_eq!(shrinkcut_verify_qpd(&mut h, &mut p), ShrinkcutStatus::Ok);
        assert!(h < 1e-12 && p < 1e-12);

        shrinkcut_config_free(ptr::null_mut());
        shrinkcut_run_free(ptr::null_mut());
        shrinkcut_string_free(ptr::null_mut());
    }
    let v = unsafe { CStr::from_ptr(shrinkcut_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include").join("shrinkcut.h")
}

#[test]
fn header_declares_the_api() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "shrinkcut_config_new",
        "shrinkcut_config_set",
        "shrinkcut_run",
        "shrinkcut_run_summary",
        "shrinkcut_run_free",
        "shrinkcut_last_error",
        "SHRINKCUT_STATUS_VERIFY_FAILED",
        "typedef struct ShrinkcutRun ShrinkcutRun;",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "shrinkcut.h"

int main(void) {
    double h, p;
    if (shrinkcut_verify_qpd(&h, &p) != SHRINKCUT_STATUS_OK) return 1;
    ShrinkcutConfig *cfg = shrinkcut_config_new(4, 1);
    shrinkcut_config_set(cfg, SHRINKCUT_SETTING_RESTARTS, 1);
    shrinkcut_config_set(cfg, SHRINKCUT_SETTING_MAX_EVALS, 20);
    shrinkcut_config_set(cfg, SHRINKCUT_SETTING_SHOTS, 0);
    ShrinkcutRun *run = NULL;
    if (shrinkcut_run(cfg, NULL, &run) != SHRINKCUT_STATUS_OK) {
        fprintf(stderr, "%s\n", shrinkcut_last_error());
        return 2;
    }
    ShrinkcutSummary s;
    shrinkcut_run_summary(run, &s);
    printf("%zu %g\n", s.shrunk_vertices, s.kappa);
    shrinkcut_run_free(run);
    shrinkcut_config_free(cfg);
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let profile_dir = tmp.parent().unwrap().join(if cfg!(debug_assertions) { "debug" } else { "release" });
    let lib = profile_dir.join("libshrinkcut_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let src = tmp.join("ffi_smoke.c");
    let exe = tmp.join("ffi_smoke");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c11")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut parts = stdout.split_whitespace();
    let shrunk: usize = parts.next().unwrap().parse().unwrap();
    assert!(shrunk >= 2);
    assert_eq!(parts.next(), Some("12"));
}
