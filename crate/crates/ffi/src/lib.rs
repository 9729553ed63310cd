//! C ABI over `tsvd-core`.
//!
//! Tensors cross the boundary as opaque [`TsvdTensor`] handles owned by the
//! caller and released with [`tsvd_tensor_free`]. Every fallible call returns
//! a [`TsvdStatus`]; on failure [`tsvd_last_error`] describes the cause. Output
//! pointers are written only on success. Panics are caught at the boundary and
//! reported as [`TsvdStatus::Panic`].
//!
//! Data is exchanged in column-major order (first index fastest).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use tsvd_core::cli::tensor_file;
use tsvd_core::{AdmmConfig, Error, Mask, Method, Tensor};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsvdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dimension = 3,
    Format = 4,
    Io = 5,
    Numerical = 6,
    Infeasible = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Compression method selector; values match the serialized method tag.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsvdMethod {
    Svd = 0,
    Tsvd = 1,
    TsvdTubal = 2,
}

/// Opaque real tensor.
pub struct TsvdTensor(Tensor);

/// ADMM settings; obtain defaults from [`tsvd_admm_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TsvdAdmmConfig {
    pub rho: f64,
    pub max_iter: usize,
    pub tol_primal: f64,
    pub tol_fit: f64,
    pub positivity: bool,
}

/// Outcome of [`tsvd_compress`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TsvdCompressInfo {
    pub ratio: f64,
    pub achieved_ratio: f64,
    /// `-INFINITY` for an exact reconstruction.
    pub rse_db: f64,
    pub stored_scalars: usize,
}

/// Outcome of [`tsvd_complete`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TsvdSolveInfo {
    pub iterations: usize,
    pub converged: bool,
    pub final_primal_residual: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(TsvdStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Dimension(_) => TsvdStatus::Dimension,
            Error::Format(_) => TsvdStatus::Format,
            Error::Io(_) => TsvdStatus::Io,
            Error::Divergence { .. } | Error::SvdFailure { .. } | Error::SymmetryViolation { .. } => {
                TsvdStatus::Numerical
            }
            Error::Infeasible(_) | Error::OutOfRange { .. } => TsvdStatus::Infeasible,
            _ => TsvdStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TsvdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TsvdStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_last_error(format!("internal panic: {msg}"));
            TsvdStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(TsvdStatus::NullPointer, format!("{name} is null"))
}

unsafe fn tensor_ref<'a>(t: *const TsvdTensor, name: &str) -> Result<&'a Tensor, Failure> {
    t.as_ref().map(|h| &h.0).ok_or_else(|| null(name))
}

unsafe fn out_ptr<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn c_slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn c_path<'a>(p: *const c_char) -> Result<&'a Path, Failure> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Path::new)
        .map_err(|_| Failure(TsvdStatus::InvalidArgument, "path is not UTF-8".into()))
}

fn boxed(t: Tensor) -> *mut TsvdTensor {
    Box::into_raw(Box::new(TsvdTensor(t)))
}

/// Message for the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tsvd_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tsvd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a tensor from `numel` column-major values.
///
/// # Safety
/// `dims` must point to `order` values and `data` to `numel` values.
#[no_mangle]
pub unsafe extern "C" fn tsvd_tensor_new(
    dims: *const usize,
    order: usize,
    data: *const f64,
    numel: usize,
    out: *mut *mut TsvdTensor,
) -> TsvdStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let dims = c_slice(dims, order, "dims")?.to_vec();
        let data = c_slice(data, numel, "data")?.to_vec();
        *out = boxed(Tensor::new(dims, data)?);
        Ok(())
    })
}

/// Creates a zero tensor.
///
/// # Safety
/// `dims` must point to `order` values.
#[no_mangle]
pub unsafe extern "C" fn tsvd_tensor_zeros(
    dims: *const usize,
    order: usize,
    out: *mut *mut TsvdTensor,
) -> TsvdStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let dims = c_slice(dims, order, "dims")?.to_vec();
        *out = boxed(Tensor::zeros(dims)?);
        Ok(())
    })
}

/// Identity tensor of size `n × n × n3`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tsvd_tensor_identity(
    n: usize,
    n3: usize,
    out: *mut *mut TsvdTensor,
) -> TsvdStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = boxed(tsvd_core::identity(n, n3)?);
        Ok(())
    })
}

/// Releases a tensor. NULL is ignored.
///
/// # Safety
/// `t` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tsvd_tensor_free(t: *mut TsvdTensor) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of modes, or 0 for NULL.
///
/// # Safety
/// `t` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsvd_tensor_order(t: *const TsvdTensor) -> usize {
    t.as_ref().map_or(0, |h| h.0.order())
}

/// Number of entries, or 0 for NULL.
///
/// # Safety
/// `t` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsvd_tensor_numel(t: *const TsvdTensor) -> usize {
    t.as_ref().map_or(0, |h| h.0.numel())
}

/// Copies the extents into `out[0..cap]`.
///
/// # Safety
/// `out` must point to `cap` writable values.
#[no_mangle]
pub unsafe extern "C" fn tsvd_tensor_dims(
    t: *const TsvdTensor,
    out: *mut usize,
    cap: usize,
) -> TsvdStatus {
    guard(|| {
        let dims = tensor_ref(t, "tensor")?.dims();
        copy_out(dims, out, cap)
    })
}

/// Copies the column-major entries into `out[0..cap]`.
///
/// # Safety
/// `out` must point to `cap` writable values.
#[no_mangle]
pub unsafe extern "C" fn tsvd_tensor_copy_data(
    t: *const TsvdTensor,
    out: *mut f64,
    cap: usize,
) -> TsvdStatus {
    guard(|| {
        let data = tensor_ref(t, "tensor")?.data();
        copy_out(data, out, cap)
    })
}

unsafe fn copy_out<T: Copy>(src: &[T], out: *mut T, cap: usize) -> Result<(), Failure> {
    if cap < src.len() {
        return Err(Failure(
            TsvdStatus::BufferTooSmall,
            format!("buffer holds {cap}, need {}", src.len()),
        ));
    }
    if src.is_empty() {
        return Ok(());
    }
    if out.is_null() {
        return Err(null("out"));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    Ok(())
}

/// Reads a TSR1 tensor file.
///
/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tsvd_tensor_read(
    path: *const c_char,
    out: *mut *mut TsvdTensor,
) -> TsvdStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = boxed(tensor_file::read(c_path(path)?)?);
        Ok(())
    })
}

/// Writes a TSR1 tensor file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `t` a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsvd_tensor_write(
    t: *const TsvdTensor,
    path: *const c_char,
) -> TsvdStatus {
    guard(|| {
        let t = tensor_ref(t, "tensor")?;
        tensor_file::write(c_path(path)?, t)?;
        Ok(())
    })
}

/// `a ∗ b`.
///
/// # Safety
/// Handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tsvd_t_product(
    a: *const TsvdTensor,
    b: *const TsvdTensor,
    out: *mut *mut TsvdTensor,
) -> TsvdStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let c = tsvd_core::t_product(tensor_ref(a, "a")?, tensor_ref(b, "b")?)?;
        *out = boxed(c);
        Ok(())
    })
}

/// Tensor transpose of an order-3 tensor.
///
/// # Safety
/// `a` must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tsvd_transpose(
    a: *const TsvdTensor,
    out: *mut *mut TsvdTensor,
) -> TsvdStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = boxed(tsvd_core::transpose(tensor_ref(a, "a")?)?);
        Ok(())
    })
}

/// Tensor nuclear norm.
///
/// # Safety
/// `t` must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tsvd_tnn(t: *const TsvdTensor, out: *mut f64) -> TsvdStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = tsvd_core::tnn(tensor_ref(t, "tensor")?)?;
        Ok(())
    })
}

/// Tensor tubal norm.
///
/// # Safety
/// `t` must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tsvd_ttn(t: *const TsvdTensor, out: *mut f64) -> TsvdStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = tsvd_core::ttn(tensor_ref(t, "tensor")?)?;
        Ok(())
    })
}

/// Tubal rank with relative tolerance `tol`.
///
/// # Safety
/// `t` must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tsvd_tubal_rank(
    t: *const TsvdTensor,
    tol: f64,
    out: *mut usize,
) -> TsvdStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = tsvd_core::tubal_rank(tensor_ref(t, "tensor")?, tol)?;
        Ok(())
    })
}

/// Per-slice ranks, one per frontal slice, copied into `out[0..cap]`.
///
/// # Safety
/// `t` must be live; `out` must point to `cap` writable values.
#[no_mangle]
pub unsafe extern "C" fn tsvd_multi_rank(
    t: *const TsvdTensor,
    tol: f64,
    out: *mut usize,
    cap: usize,
) -> TsvdStatus {
    guard(|| {
        let r = tsvd_core::multi_rank(tensor_ref(t, "tensor")?, tol)?;
        copy_out(r.ranks(), out, cap)
    })
}

/// Best tubal-rank-`k` approximation.
///
/// # Safety
/// `t` must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tsvd_truncate(
    t: *const TsvdTensor,
    k: usize,
    out: *mut *mut TsvdTensor,
) -> TsvdStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let f = tsvd_core::t_svd(tensor_ref(t, "tensor")?)?;
        *out = boxed(f.truncate(k)?);
        Ok(())
    })
}

/// Compresses an order-3 tensor and returns the reconstruction.
///
/// # Safety
/// `t` must be live; `out` and `info` must be valid (`info` may be NULL).
#[no_mangle]
pub unsafe extern "C" fn tsvd_compress(
    t: *const TsvdTensor,
    method: TsvdMethod,
    k: usize,
    out: *mut *mut TsvdTensor,
    info: *mut TsvdCompressInfo,
) -> TsvdStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let method = match method as u32 {
            0 => Method::Svd,
            1 => Method::Tsvd,
            2 => Method::TsvdTubal,
            other => {
                return Err(Failure(
                    TsvdStatus::InvalidArgument,
                    format!("unknown method {other}"),
                ))
            }
        };
        let r = tsvd_core::compression::compress(tensor_ref(t, "tensor")?, method, k)?;
        if let Some(info) = info.as_mut() {
            *info = TsvdCompressInfo {
                ratio: r.ratio,
                achieved_ratio: r.achieved_ratio,
                rse_db: r.rse_db,
                stored_scalars: r.compressed.scalar_count(),
            };
        }
        *out = boxed(r.reconstruction);
        Ok(())
    })
}

/// Default ADMM settings.
#[no_mangle]
pub extern "C" fn tsvd_admm_config_default() -> TsvdAdmmConfig {
    let d = AdmmConfig::default();
    TsvdAdmmConfig {
        rho: d.rho,
        max_iter: d.max_iter,
        tol_primal: d.tol_primal,
        tol_fit: d.tol_fit,
        positivity: d.positivity,
    }
}

/// Completes `observed` on the entries where `mask` is 1; `mask` must hold
/// only zeros and ones and share the dims of `observed`. `cfg` may be NULL
/// for defaults and `info` may be NULL.
///
/// # Safety
/// Handles must be live; pointers must be valid or NULL where allowed.
#[no_mangle]
pub unsafe extern "C" fn tsvd_complete(
    observed: *const TsvdTensor,
    mask: *const TsvdTensor,
    cfg: *const TsvdAdmmConfig,
    out: *mut *mut TsvdTensor,
    info: *mut TsvdSolveInfo,
) -> TsvdStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let y = tensor_ref(observed, "observed")?;
        let mask = Mask::from_tensor(tensor_ref(mask, "mask")?)?;
        let c = cfg.as_ref().copied().unwrap_or_else(|| tsvd_admm_config_default());
        let cfg = AdmmConfig {
            rho: c.rho,
            max_iter: c.max_iter,
            tol_primal: c.tol_primal,
            tol_fit: c.tol_fit,
            positivity: c.positivity,
        };
        let y = tsvd_core::SamplingOperator::new(mask.clone()).apply(y)?;
        let (x, report) = tsvd_core::complete(&y, &mask, &cfg)?;
        if let Some(info) = info.as_mut() {
            *info = TsvdSolveInfo {
                iterations: report.iterations,
                converged: report.converged,
                final_primal_residual: report.primal_residuals.last().copied().unwrap_or(0.0),
            };
        }
        *out = boxed(x);
        Ok(())
    })
}
