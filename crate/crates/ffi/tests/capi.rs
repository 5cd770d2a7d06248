use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use flatcensus_ffi::*;

const T1: &str = r#"{"n_squares":1,"h_pairs":[[0,1]],"v_pairs":[[0,1]],"marked":[0]}"#;
const P2: &str = r#"{"n_squares":2,"h_pairs":[[0,3],[2,1]],"v_pairs":[[0,2],[1,3]]}"#;
const S04: &str = r#"{"g":0,"n":4,"regions":[[0,-1,-1],[0,-1,-1]]}"#;

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { fc_string_free(s) };
    out
}

fn last_error() -> String {
    let p = fc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn surface(json: &str) -> *mut FcSurface {
    let c = CString::new(json).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { fc_surface_from_json(c.as_ptr(), &mut s) }, FcStatus::Ok);
    s
}

#[test]
fn surface_queries() {
    let t1 = surface(T1);
    let (mut g, mut aut) = (0u32, 0u64);
    unsafe {
        assert_eq!(fc_surface_genus(t1, &mut g), FcStatus::Ok);
        assert_eq!(fc_surface_aut_order(t1, &mut aut), FcStatus::Ok);
    }
    assert_eq!((g, aut), (1, 2));
    assert!(fc_last_error().is_null());

    let p2 = surface(P2);
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(fc_surface_aut_order(p2, &mut aut), FcStatus::Ok);
        assert_eq!(fc_surface_classify_json(p2, &mut json), FcStatus::Ok);
    }
    assert_eq!(aut, 4);
    let v: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
    assert_eq!(v["genus"], 0);
    assert_eq!(v["marked"].as_array().unwrap().len(), 4);
    unsafe {
        fc_surface_free(t1);
        fc_surface_free(p2);
    }
}

#[test]
fn error_codes() {
    let mut s = ptr::null_mut();
    let junk = CString::new("{not json").unwrap();
    assert_eq!(unsafe { fc_surface_from_json(junk.as_ptr(), &mut s) }, FcStatus::Parse);
    assert!(s.is_null());
    assert!(!last_error().is_empty());

    let bad = CString::new(r#"{"n_squares":1,"h_pairs":[[0,0]],"v_pairs":[[0,1]]}"#).unwrap();
    assert_eq!(
        unsafe { fc_surface_from_json(bad.as_ptr(), &mut s) },
        FcStatus::InvalidInput
    );

    assert_eq!(
        unsafe { fc_surface_from_json(ptr::null(), &mut s) },
        FcStatus::NullPointer
    );
    let t1 = CString::new(T1).unwrap();
    assert_eq!(
        unsafe { fc_surface_from_json(t1.as_ptr(), ptr::null_mut()) },
        FcStatus::NullPointer
    );
    let mut g = 0;
    assert_eq!(unsafe { fc_surface_genus(ptr::null(), &mut g) }, FcStatus::NullPointer);

    let invalid_utf8 = [0xffu8, 0];
    assert_eq!(
        unsafe { fc_surface_from_json(invalid_utf8.as_ptr().cast(), &mut s) },
        FcStatus::InvalidUtf8
    );

    let mut c = ptr::null_mut();
    assert_eq!(unsafe { fc_census_run(0, 4, 0, 1, &mut c) }, FcStatus::Domain);
    assert!(c.is_null());
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { fc_predict_json(0, 3, &mut out) }, FcStatus::Domain);

    unsafe {
        fc_string_free(ptr::null_mut());
        fc_surface_free(ptr::null_mut());
        fc_census_free(ptr::null_mut());
    }
}

#[test]
fn census_handle() {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { fc_census_run(1, 1, 1, 2, &mut c) }, FcStatus::Ok);
    let (mut total, mut csv, mut len) = (ptr::null_mut(), ptr::null_mut(), 0usize);
    unsafe {
        assert_eq!(fc_census_total(c, &mut total), FcStatus::Ok);
        assert_eq!(fc_census_csv(c, &mut csv), FcStatus::Ok);
        assert_eq!(fc_census_bucket_count(c, &mut len), FcStatus::Ok);
    }
    assert_eq!(take(total), "1/2");
    let csv = take(csv);
    assert!(csv.starts_with("area,h_type,v_type,count_num,count_den\n"));
    assert_eq!(csv.lines().count(), len + 1);
    unsafe { fc_census_free(c) };
}

#[test]
fn predict_and_dt() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { fc_predict_json(2, 0, &mut out) }, FcStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert!(v.as_array().unwrap().iter().any(|p| p["name"] == "c-sep"));

    let pants = CString::new(S04).unwrap();
    assert_eq!(unsafe { fc_dt_count(pants.as_ptr(), 10, &mut out) }, FcStatus::Ok);
    assert_eq!(take(out), "30");
}

#[test]
fn header_compiles_as_c() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/flatcensus.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "fc_last_error",
        "fc_string_free",
        "fc_surface_from_json",
        "fc_census_run",
        "fc_dt_count",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(cc) = which_cc() else { return };
    let src = std::env::temp_dir().join(format!("flatcensus_header_{}.c", std::process::id()));
    std::fs::write(
        &src,
        "#include \"flatcensus.h\"\nint main(void) { return FC_STATUS_OK; }\n",
    )
    .unwrap();
    let status = Command::new(cc)
        .args(["-fsyntax-only", "-Wall", "-Werror", "-I"])
        .arg(dir.join("include"))
        .arg(&src)
        .status()
        .unwrap();
    let _ = std::fs::remove_file(&src);
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| {
            Command::new(c)
                .arg("--version")
                .output()
                .is_ok_and(|o| o.status.success())
        })
        .ok_or(())
}
