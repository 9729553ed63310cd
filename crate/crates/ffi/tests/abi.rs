use std::ffi::{CStr, CString};
use std::ptr;

use tsvd_ffi::*;

fn new_tensor(dims: &[usize], data: &[f64]) -> *mut TsvdTensor {
    let mut out = ptr::null_mut();
    let st = unsafe { tsvd_tensor_new(dims.as_ptr(), dims.len(), data.as_ptr(), data.len(), &mut out) };
    assert_eq!(st, TsvdStatus::Ok);
    assert!(!out.is_null());
    out
}

fn data_of(t: *const TsvdTensor) -> Vec<f64> {
    let n = unsafe { tsvd_tensor_numel(t) };
    let mut buf = vec![0.0; n];
    assert_eq!(unsafe { tsvd_tensor_copy_data(t, buf.as_mut_ptr(), n) }, TsvdStatus::Ok);
    buf
}

fn last_error() -> String {
    let p = tsvd_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn ramp(n: usize) -> Vec<f64> {
    (0..n).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect()
}

#[test]
fn handle_lifecycle_and_accessors() {
    let t = new_tensor(&[2, 3, 4], &ramp(24));
    assert_eq!(unsafe { tsvd_tensor_order(t) }, 3);
    assert_eq!(unsafe { tsvd_tensor_numel(t) }, 24);
    let mut dims = [0usize; 3];
    assert_eq!(unsafe { tsvd_tensor_dims(t, dims.as_mut_ptr(), 3) }, TsvdStatus::Ok);
    assert_eq!(dims, [2, 3, 4]);
    assert_eq!(data_of(t), ramp(24));
    unsafe { tsvd_tensor_free(t) };
    unsafe { tsvd_tensor_free(ptr::null_mut()) };
    assert_eq!(unsafe { tsvd_tensor_order(ptr::null()) }, 0);
}

#[test]
fn invalid_input_reports_status_and_message() {
    let mut out = ptr::null_mut();
    let dims = [2usize, 2];
    let st = unsafe { tsvd_tensor_new(dims.as_ptr(), 2, [0.0; 4].as_ptr(), 4, &mut out) };
    assert_eq!(st, TsvdStatus::InvalidArgument);
    assert!(out.is_null());
    assert!(!last_error().is_empty());

    let dims = [1usize, 1, 1];
    let st = unsafe { tsvd_tensor_new(dims.as_ptr(), 3, [f64::NAN].as_ptr(), 1, &mut out) };
    assert_ne!(st, TsvdStatus::Ok);

    let st = unsafe { tsvd_tnn(ptr::null(), &mut 0.0) };
    assert_eq!(st, TsvdStatus::NullPointer);
    assert!(last_error().contains("null"));

    let t = new_tensor(&[2, 2, 2], &ramp(8));
    let mut small = [0usize; 2];
    assert_eq!(unsafe { tsvd_tensor_dims(t, small.as_mut_ptr(), 2) }, TsvdStatus::BufferTooSmall);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { tsvd_truncate(t, 5, &mut r) }, TsvdStatus::Infeasible);
    unsafe { tsvd_tensor_free(t) };
}

#[test]
fn algebra_matches_core() {
    let a = new_tensor(&[3, 2, 4], &ramp(24));
    let b = new_tensor(&[2, 3, 4], &ramp(24).iter().map(|v| v * 0.5).collect::<Vec<_>>());
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { tsvd_t_product(a, b, &mut c) }, TsvdStatus::Ok);
    let ca = tsvd_core::Tensor::new(vec![3, 2, 4], ramp(24)).unwrap();
    let cb = tsvd_core::Tensor::new(vec![2, 3, 4], ramp(24).iter().map(|v| v * 0.5).collect()).unwrap();
    let expect = tsvd_core::t_product(&ca, &cb).unwrap();
    assert_eq!(data_of(c), expect.data());

    let mut mismatch = ptr::null_mut();
    assert_eq!(unsafe { tsvd_t_product(a, a, &mut mismatch) }, TsvdStatus::Dimension);

    let mut at = ptr::null_mut();
    assert_eq!(unsafe { tsvd_transpose(a, &mut at) }, TsvdStatus::Ok);
    assert_eq!(data_of(at), tsvd_core::transpose(&ca).unwrap().data());

    let (mut tnn, mut ttn, mut rank) = (0.0, 0.0, 0usize);
    assert_eq!(unsafe { tsvd_tnn(c, &mut tnn) }, TsvdStatus::Ok);
    assert_eq!(unsafe { tsvd_ttn(c, &mut ttn) }, TsvdStatus::Ok);
    assert_eq!(unsafe { tsvd_tubal_rank(c, 1e-8, &mut rank) }, TsvdStatus::Ok);
    assert_eq!(tnn, tsvd_core::tnn(&expect).unwrap());
    assert_eq!(ttn, tsvd_core::ttn(&expect).unwrap());
    assert_eq!(rank, tsvd_core::tubal_rank(&expect, 1e-8).unwrap());
    let mut mr = [0usize; 4];
    assert_eq!(unsafe { tsvd_multi_rank(c, 1e-8, mr.as_mut_ptr(), 4) }, TsvdStatus::Ok);
    assert!(mr.iter().all(|&r| r <= 2));

    for h in [a, b, c, at] {
        unsafe { tsvd_tensor_free(h) };
    }
}

#[test]
fn compression_and_completion_through_the_abi() {
    let x = tsvd_core::cli::generate_low_tubal_rank(&[10, 9, 4], 2, 3).unwrap();
    let t = new_tensor(x.dims(), x.data());

    let mut info = TsvdCompressInfo::default();
    let mut rec = ptr::null_mut();
    assert_eq!(unsafe { tsvd_compress(t, TsvdMethod::TsvdTubal, 2, &mut rec, &mut info) }, TsvdStatus::Ok);
    assert!(info.rse_db < -200.0);
    assert_eq!(info.stored_scalars, 2 * (10 + 9 + 1) * 4);
    unsafe { tsvd_tensor_free(rec) };

    let mask = tsvd_core::Mask::bernoulli(vec![10, 9, 4], 0.8, 5).unwrap();
    let m = new_tensor(x.dims(), mask.to_tensor().data());
    let cfg = tsvd_admm_config_default();
    let mut solved = TsvdSolveInfo::default();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { tsvd_complete(t, m, &cfg, &mut out, &mut solved) }, TsvdStatus::Ok);
    assert!(solved.iterations >= 1);
    let got = data_of(out);
    for (i, &bit) in mask.bits().iter().enumerate() {
        if bit {
            assert_eq!(got[i], x.data()[i]);
        }
    }
    for h in [t, m, out] {
        unsafe { tsvd_tensor_free(h) };
    }
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("a.tsr").to_str().unwrap()).unwrap();
    let t = new_tensor(&[2, 2, 2, 2], &ramp(16));
    assert_eq!(unsafe { tsvd_tensor_write(t, path.as_ptr()) }, TsvdStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { tsvd_tensor_read(path.as_ptr(), &mut back) }, TsvdStatus::Ok);
    assert_eq!(data_of(back), ramp(16));
    let missing = CString::new(dir.path().join("none.tsr").to_str().unwrap()).unwrap();
    let mut none = ptr::null_mut();
    assert_eq!(unsafe { tsvd_tensor_read(missing.as_ptr(), &mut none) }, TsvdStatus::Io);
    unsafe {
        tsvd_tensor_free(t);
        tsvd_tensor_free(back);
    }
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(tsvd_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
