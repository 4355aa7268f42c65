use std::ffi::{c_char, c_int, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use foamtft_ffi::*;

const Z2: &str = "palette: a b c\ngroup Z2 builtin cyclic 2\n\
graph theta\nnodes: u v\nedge a : u v\nedge b : u v\nedge c : u v\n\
working: I_a I_b I_c theta theta*\n";

const TORUS: &str = "foam t\npatch a orientable genus 1 crosscaps 0\n";

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    ftft_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(ftft_last_error()).to_str().unwrap().to_string()
}

#[test]
fn build_serialize_parse_eval() {
    unsafe {
        let mut t: *mut FtftTheory = ptr::null_mut();
        assert_eq!(ftft_theory_build(c(Z2).as_ptr(), 0, &mut t), FtftStatus::Ok);
        let mut s: *mut c_char = ptr::null_mut();
        assert_eq!(ftft_theory_serialize(t, &mut s), FtftStatus::Ok);
        let text = take(s);

        let mut u: *mut FtftTheory = ptr::null_mut();
        assert_eq!(ftft_theory_parse(c(&text).as_ptr(), &mut u), FtftStatus::Ok);
        let mut ok: c_int = -1;
        let mut report: *mut c_char = ptr::null_mut();
        assert_eq!(ftft_theory_verify(u, &mut ok, &mut report), FtftStatus::Ok);
        assert_eq!(ok, 1);
        assert!(take(report).ends_with("all axioms hold\n"));

        let mut v: *mut c_char = ptr::null_mut();
        assert_eq!(ftft_eval(u, c(TORUS).as_ptr(), ptr::null(), &mut v), FtftStatus::Ok);
        assert_eq!(take(v), "2/1");
        assert_eq!(last_error(), "");
        ftft_theory_free(t);
        ftft_theory_free(u);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut t: *mut FtftTheory = ptr::null_mut();
        assert_eq!(ftft_theory_parse(c("bogus\n").as_ptr(), &mut t), FtftStatus::Parse);
        assert!(t.is_null());
        assert!(last_error().contains("line 1"));
        assert_eq!(ftft_theory_parse(ptr::null(), &mut t), FtftStatus::NullArgument);
        let z3 = Z2.replace("cyclic 2", "cyclic 3");
        assert_eq!(ftft_theory_build(c(&z3).as_ptr(), 0, &mut t), FtftStatus::VerificationFailed);
        assert_eq!(ftft_theory_build(c(&z3).as_ptr(), 1, &mut t), FtftStatus::Ok);
        let mut v: *mut c_char = ptr::null_mut();
        let bad = c("film f\ncompose: I_a I_b\n");
        assert_eq!(ftft_eval(t, bad.as_ptr(), ptr::null(), &mut v), FtftStatus::NotComposable);
        let film = c("film f\ncompose: I_a I_a\n");
        assert_eq!(ftft_eval(t, film.as_ptr(), ptr::null(), &mut v), FtftStatus::InvalidInput);
        assert!(last_error().contains("unlabeled"));
        let labels = c("label vertex q1 = #0\nlabel vertex q2 = #0\n");
        assert_eq!(ftft_eval(t, film.as_ptr(), labels.as_ptr(), &mut v), FtftStatus::Ok);
        assert_eq!(take(v), "1/1");
        assert_eq!(ftft_eval(ptr::null(), film.as_ptr(), labels.as_ptr(), &mut v), FtftStatus::NullArgument);
        ftft_theory_free(t);
        ftft_theory_free(ptr::null_mut());
        ftft_string_free(ptr::null_mut());
        assert_eq!(CStr::from_ptr(ftft_version()).to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}

#[test]
fn header_links_from_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/foamtft.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in [
        "ftft_theory_parse",
        "ftft_theory_build",
        "ftft_theory_free",
        "ftft_theory_serialize",
        "ftft_theory_verify",
        "ftft_eval",
        "ftft_last_error",
        "ftft_string_free",
        "ftft_version",
    ] {
        assert!(text.contains(&format!("{f}(")), "{f} missing from the header");
    }
    let lib_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    assert!(lib_dir.join("libfoamtft_ffi.a").is_file(), "static library not built in {}", lib_dir.display());
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("use.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let exe = tmp.path().join("use");
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(dir.join("include"))
        .arg(&src)
        .arg("-o")
        .arg(&exe)
        .arg(lib_dir.join("libfoamtft_ffi.a"))
        .args(["-lpthread", "-ldl", "-lm"])
        .output()
        .expect("a C compiler named cc");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout), "2/1\nparse 2\n");
}

const C_PROGRAM: &str = r#"#include <stdio.h>
#include "foamtft.h"

static const char *COVER =
    "palette: a\n"
    "group Z2 builtin cyclic 2\n";

int main(void) {
    FtftTheory *t = NULL;
    if (ftft_theory_build(COVER, 0, &t) != FTFT_STATUS_OK) {
        fprintf(stderr, "%s\n", ftft_last_error());
        return 1;
    }
    char *v = NULL;
    if (ftft_eval(t, "foam t\npatch a orientable genus 1 crosscaps 0\n", NULL, &v) != FTFT_STATUS_OK) {
        fprintf(stderr, "%s\n", ftft_last_error());
        return 1;
    }
    printf("%s\n", v);
    ftft_string_free(v);
    ftft_theory_free(t);
    FtftTheory *u = NULL;
    printf("parse %d\n", (int)ftft_theory_parse("nonsense\n", &u));
    return u == NULL ? 0 : 1;
}
"#;
