use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use treechar_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

#[test]
fn chi1_through_handles() {
    unsafe {
        let mut g: *mut TcGroup = ptr::null_mut();
        assert_eq!(tc_group_from_catalog(c("basilica").as_ptr(), &mut g), TcStatus::Ok);
        assert_eq!(tc_group_degree(g), 2);
        let mut out = ptr::null_mut();
        assert_eq!(tc_chi1(g, c("a").as_ptr(), &mut out), TcStatus::Ok);
        assert_eq!(CStr::from_ptr(out).to_str().unwrap(), "1/2");
        tc_string_free(out);
        assert_eq!(tc_chi1(g, c("a q").as_ptr(), &mut out), TcStatus::InputError);
        assert!(CStr::from_ptr(tc_last_error()).to_str().unwrap().contains('q'));
        tc_group_free(g);
    }
}

#[test]
fn errors_and_nulls() {
    unsafe {
        let mut g: *mut TcGroup = ptr::null_mut();
        assert_eq!(tc_group_from_catalog(c("nope").as_ptr(), &mut g), TcStatus::InputError);
        assert!(g.is_null());
        assert_eq!(tc_group_from_catalog(ptr::null(), &mut g), TcStatus::NullPointer);
        let mut out = ptr::null_mut();
        assert_eq!(tc_chi1(ptr::null(), c("a").as_ptr(), &mut out), TcStatus::NullPointer);
        let text = c("degree = 2\na = perm[1 0] (e, e)\n");
        assert_eq!(tc_group_from_text(c("swap").as_ptr(), text.as_ptr(), &mut g), TcStatus::Ok);
        assert_eq!(tc_chi1(g, c("a").as_ptr(), &mut out), TcStatus::Ok);
        assert_eq!(CStr::from_ptr(out).to_str().unwrap(), "0");
        tc_string_free(out);
        tc_group_free(g);
        tc_group_free(ptr::null_mut());
        let bad = c("degree = 2\na = perm[1 0] (e)\n");
        assert_eq!(tc_group_from_text(c("x").as_ptr(), bad.as_ptr(), &mut g), TcStatus::InputError);
    }
}

#[test]
fn level_estimates() {
    unsafe {
        let mut g: *mut TcGroup = ptr::null_mut();
        assert_eq!(tc_group_from_catalog(c("autfin2").as_ptr(), &mut g), TcStatus::Ok);
        let mut e: TcEstimate = std::mem::zeroed();
        assert_eq!(
            tc_psip(g, c("cyl(0)").as_ptr(), c("b").as_ptr(), 1, TcMode::Exact, 0, 0, &mut e),
            TcStatus::Ok
        );
        assert!(e.exact);
        assert_eq!(CStr::from_ptr(e.value_text).to_str().unwrap(), "1/2");
        assert_eq!(e.bracket, TcBracket::Lower);
        tc_estimate_clear(&mut e);
        assert!(e.value_text.is_null());
        let set = c("thmb(seq=[2,4];stride=2)");
        assert_eq!(
            tc_psi(g, set.as_ptr(), c("t_00000").as_ptr(), 6, TcMode::Mc, 5000, 11, &mut e),
            TcStatus::Ok
        );
        assert!(!e.exact && e.radius > 0.0 && e.samples == 5000 && e.seed == 11);
        tc_estimate_clear(&mut e);
        assert_eq!(
            tc_psi(g, set.as_ptr(), c("a").as_ptr(), 4, TcMode::Exact, 0, 0, &mut e),
            TcStatus::Ok
        );
        tc_estimate_clear(&mut e);
        assert_eq!(
            tc_psi(g, set.as_ptr(), c("a").as_ptr(), 0, TcMode::Exact, 0, 0, &mut e),
            TcStatus::InputError
        );
        tc_group_free(g);
    }
}

#[test]
fn header_declares_every_export() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/treechar.h")).unwrap();
    let src = std::fs::read_to_string(dir.join("src/lib.rs")).unwrap();
    for line in src.lines().filter(|l| l.contains("extern \"C\" fn ")) {
        let name = line.split("fn ").nth(1).unwrap().split('(').next().unwrap();
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}

/// Compiles and runs a C program against the static library when a C
/// compiler is available.
#[test]
fn c_program_links() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let target = exe.parent().unwrap().parent().unwrap();
    let lib = target.join("libtreechar_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no static library or no C compiler");
        return;
    }
    let out_dir = tempfile::tempdir().unwrap();
    let bin = out_dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
