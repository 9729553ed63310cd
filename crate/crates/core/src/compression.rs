//! Low-rank compression of order-3 tensors.
//!
//! Three schemes, each with a closed-form compression ratio (original entry
//! count over retained factor entries):
//!
//! | method       | parameter          | ratio                              |
//! |--------------|--------------------|------------------------------------|
//! | `svd`        | `1 ≤ k₁ ≤ min(n1n2, n3)` | `n1n2n3 / (k₁(n1n2 + n3 + 1))` |
//! | `tsvd`       | `1 ≤ k₂ ≤ min(n1,n2)·n3` | `n1n2n3 / (k₂(n1 + n2 + 1))`   |
//! | `tsvd-tubal` | `1 ≤ k₃ ≤ min(n1,n2)`    | `n1n2 / (k₃(n1 + n2 + 1))`     |
//!
//! `svd` truncates the `(n1n2) × n3` matrix whose columns are the vectorized
//! frontal slices. `tsvd` keeps the `k₂` largest spectral singular values
//! across all Fourier slices. `tsvd-tubal` keeps the first `k₃` singular tubes.
//!
//! In `tsvd`, conjugate slices carry equal singular values and ties are broken
//! by `(slice, index)` ascending, so a conjugate pair is kept whole unless it
//! straddles the `k₂` boundary. A kept entry whose conjugate partner was
//! dropped is reconstructed at half weight on both slices, which is the real
//! part of its own contribution; the reconstruction stays exactly real and the
//! error never grows with `k₂`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::completion::rse_db;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::tensor::{t_product, transpose, Tensor};
use crate::transform::{ifft_mode3, SliceLayout};
use crate::tsvd::t_svd;

const MAGIC: &[u8; 4] = b"TSC1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Svd,
    Tsvd,
    TsvdTubal,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Svd, Method::Tsvd, Method::TsvdTubal];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Svd => "svd",
            Method::Tsvd => "tsvd",
            Method::TsvdTubal => "tsvd-tubal",
        }
    }

    fn tag(self) -> u8 {
        match self {
            Method::Svd => 0,
            Method::Tsvd => 1,
            Method::TsvdTubal => 2,
        }
    }

    fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(Method::Svd),
            1 => Ok(Method::Tsvd),
            2 => Ok(Method::TsvdTubal),
            t => Err(Error::Format(format!("unknown compression method tag {t}"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svd" => Ok(Method::Svd),
            "tsvd" => Ok(Method::Tsvd),
            "tsvd-tubal" | "tsvd_tubal" => Ok(Method::TsvdTubal),
            other => Err(Error::Parameter(format!("unknown compression method {other:?}"))),
        }
    }
}

fn dims3(dims: &[usize]) -> Result<(usize, usize, usize)> {
    match *dims {
        [n1, n2, n3] if n1 > 0 && n2 > 0 && n3 > 0 => Ok((n1, n2, n3)),
        _ => Err(Error::Dimension(format!(
            "compression accepts order-3 tensors, got dims {dims:?}"
        ))),
    }
}

/// Largest admissible `k` for a method on the given dims.
pub fn k_max(method: Method, dims: &[usize]) -> Result<usize> {
    let (n1, n2, n3) = dims3(dims)?;
    Ok(match method {
        Method::Svd => (n1 * n2).min(n3),
        Method::Tsvd => n1.min(n2) * n3,
        Method::TsvdTubal => n1.min(n2),
    })
}

fn check_k(method: Method, dims: &[usize], k: usize) -> Result<()> {
    let max = k_max(method, dims)?;
    if k < 1 || k > max {
        return Err(Error::OutOfRange {
            name: "k",
            value: k,
            min: 1,
            max,
        });
    }
    Ok(())
}

/// Number of factor entries retained by a method at `k`.
pub fn retained_scalars(method: Method, dims: &[usize], k: usize) -> Result<usize> {
    let (n1, n2, n3) = dims3(dims)?;
    Ok(match method {
        Method::Svd => k * (n1 * n2 + n3 + 1),
        Method::Tsvd => k * (n1 + n2 + 1),
        Method::TsvdTubal => k * (n1 + n2 + 1) * n3,
    })
}

/// Closed-form compression ratio of a method at `k`.
pub fn ratio(method: Method, dims: &[usize], k: usize) -> Result<f64> {
    check_k(method, dims, k)?;
    let (n1, n2, n3) = dims3(dims)?;
    let (n1, n2, n3, k) = (n1 as f64, n2 as f64, n3 as f64, k as f64);
    Ok(match method {
        Method::Svd => n1 * n2 * n3 / (k * (n1 * n2 + n3 + 1.0)),
        Method::Tsvd => n1 * n2 * n3 / (k * (n1 + n2 + 1.0)),
        Method::TsvdTubal => n1 * n2 / (k * (n1 + n2 + 1.0)),
    })
}

/// Largest `k` whose ratio is at least `target`.
///
/// A target of exactly 1 asks for no compression and returns the largest `k`,
/// even when factor storage at that `k` exceeds the original entry count.
pub fn k_for_ratio(method: Method, dims: &[usize], target: f64) -> Result<usize> {
    if !(target >= 1.0 && target.is_finite()) {
        return Err(Error::Parameter(format!(
            "target ratio must be at least 1, got {target}"
        )));
    }
    let max = k_max(method, dims)?;
    if target == 1.0 {
        return Ok(max);
    }
    let mut best = None;
    for k in 1..=max {
        if ratio(method, dims, k)? >= target {
            best = Some(k);
        } else {
            break;
        }
    }
    best.ok_or_else(|| {
        Error::Infeasible(format!(
            "{method} cannot reach ratio {target} on dims {dims:?}; the maximum is {:.4}",
            ratio(method, dims, 1).unwrap_or(0.0)
        ))
    })
}

/// One retained spectral singular triplet of the `tsvd` scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEntry {
    pub slice: usize,
    pub index: usize,
    pub sigma: f64,
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
enum Payload {
    /// `sigma[k]`, left vectors `n1n2 × k`, right vectors `n3 × k`.
    Svd {
        sigma: Vec<f64>,
        left: Vec<f64>,
        right: Vec<f64>,
    },
    Tsvd {
        entries: Vec<SpectralEntry>,
    },
    /// `U(:, :k, :)`, the tubes `S(i, i, :)` for `i < k` and `V(:, :k, :)`.
    Tubal {
        u: Vec<f64>,
        s: Vec<f64>,
        v: Vec<f64>,
    },
}

/// The retained factors of a compression run.
///
/// Binary layout (little endian): magic `TSC1`, method tag `u8`, order `u8`
/// (always 3), three `u64` extents, `u64` k, then the payload:
///
/// - `svd`: `k` singular values, the `n1n2 × k` left factor, the `n3 × k`
///   right factor, all `f64` column-major.
/// - `tsvd`: per entry `u64` slice, `u64` index, `f64` σ, then the `n1`
///   entries of `û` and the `n2` entries of `v̂`; stored as single `f64`s on
///   self-conjugate slices and as `(re, im)` pairs elsewhere.
/// - `tsvd-tubal`: `U(:, :k, :)` (`n1 × k × n3`), the `k × n3` singular tubes
///   (tube-major) and `V(:, :k, :)` (`n2 × k × n3`), all `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedForm {
    method: Method,
    dims: [usize; 3],
    k: usize,
    payload: Payload,
}

impl CompressedForm {
    pub fn method(&self) -> Method {
        self.method
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn spectral_entries(&self) -> Option<&[SpectralEntry]> {
        match &self.payload {
            Payload::Tsvd { entries } => Some(entries),
            _ => None,
        }
    }

    /// Retained factor entries; a complex entry counts once. Equals the
    /// denominator of the method's ratio formula.
    pub fn scalar_count(&self) -> usize {
        match &self.payload {
            Payload::Svd { sigma, left, right } => sigma.len() + left.len() + right.len(),
            Payload::Tsvd { entries } => entries.iter().map(|e| 1 + e.u.len() + e.v.len()).sum(),
            Payload::Tubal { u, s, v } => u.len() + s.len() + v.len(),
        }
    }

    /// Number of `f64` values in the serialized payload.
    pub fn stored_reals(&self) -> usize {
        match &self.payload {
            Payload::Tsvd { entries } => {
                let layout = SliceLayout::new(&self.dims);
                entries
                    .iter()
                    .map(|e| {
                        let width = if layout.is_self_conjugate(e.slice) { 1 } else { 2 };
                        1 + width * (e.u.len() + e.v.len())
                    })
                    .sum()
            }
            _ => self.scalar_count(),
        }
    }

    /// Original entry count over stored `f64` count.
    pub fn achieved_ratio(&self) -> f64 {
        let n: usize = self.dims.iter().product();
        n as f64 / self.stored_reals() as f64
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + 2 + 32 + 8 * self.stored_reals());
        out.extend_from_slice(MAGIC);
        out.push(self.method.tag());
        out.push(3);
        for d in self.dims {
            out.extend_from_slice(&(d as u64).to_le_bytes());
        }
        out.extend_from_slice(&(self.k as u64).to_le_bytes());
        let put = |out: &mut Vec<u8>, v: f64| out.extend_from_slice(&v.to_le_bytes());
        match &self.payload {
            Payload::Svd { sigma, left, right } => {
                for &v in sigma.iter().chain(left).chain(right) {
                    put(&mut out, v);
                }
            }
            Payload::Tubal { u, s, v } => {
                for &x in u.iter().chain(s).chain(v) {
                    put(&mut out, x);
                }
            }
            Payload::Tsvd { entries } => {
                let layout = SliceLayout::new(&self.dims);
                for e in entries {
                    out.extend_from_slice(&(e.slice as u64).to_le_bytes());
                    out.extend_from_slice(&(e.index as u64).to_le_bytes());
                    put(&mut out, e.sigma);
                    let real = layout.is_self_conjugate(e.slice);
                    for z in e.u.iter().chain(&e.v) {
                        put(&mut out, z.re);
                        if !real {
                            put(&mut out, z.im);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::Format("bad magic, expected TSC1".into()));
        }
        let method = Method::from_tag(r.take(1)?[0])?;
        let order = r.take(1)?[0];
        if order != 3 {
            return Err(Error::Format(format!("compressed order {order}, expected 3")));
        }
        let dims = [r.usize()?, r.usize()?, r.usize()?];
        let k = r.usize()?;
        check_k(method, &dims, k).map_err(|e| Error::Format(e.to_string()))?;
        let [n1, n2, n3] = dims;
        let payload = match method {
            Method::Svd => Payload::Svd {
                sigma: r.f64s(k)?,
                left: r.f64s(k * n1 * n2)?,
                right: r.f64s(k * n3)?,
            },
            Method::TsvdTubal => Payload::Tubal {
                u: r.f64s(n1 * k * n3)?,
                s: r.f64s(k * n3)?,
                v: r.f64s(n2 * k * n3)?,
            },
            Method::Tsvd => {
                let layout = SliceLayout::new(&dims);
                let mut entries = Vec::with_capacity(k);
                for _ in 0..k {
                    let slice = r.usize()?;
                    let index = r.usize()?;
                    if slice >= n3 || index >= n1.min(n2) {
                        return Err(Error::Format(format!(
                            "spectral entry ({slice}, {index}) out of range"
                        )));
                    }
                    let sigma = r.f64()?;
                    let real = layout.is_self_conjugate(slice);
                    let mut read_vec = |n: usize| -> Result<Vec<Complex64>> {
                        (0..n)
                            .map(|_| {
                                let re = r.f64()?;
                                let im = if real { 0.0 } else { r.f64()? };
                                Ok(Complex64::new(re, im))
                            })
                            .collect()
                    };
                    let u = read_vec(n1)?;
                    let v = read_vec(n2)?;
                    entries.push(SpectralEntry { slice, index, sigma, u, v });
                }
                Payload::Tsvd { entries }
            }
        };
        if r.pos != bytes.len() {
            return Err(Error::Format(format!(
                "{} trailing bytes after payload",
                bytes.len() - r.pos
            )));
        }
        Ok(Self { method, dims, k, payload })
    }

    /// Rebuilds the approximation from the retained factors.
    pub fn decode(&self) -> Result<Tensor> {
        let [n1, n2, n3] = self.dims;
        match &self.payload {
            Payload::Svd { sigma, left, right } => {
                let rows = n1 * n2;
                let l = DMatrix::from_column_slice(rows, sigma.len(), left);
                let r = DMatrix::from_column_slice(n3, sigma.len(), right);
                let s = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(sigma));
                let a = l * s * r.transpose();
                Tensor::new(vec![n1, n2, n3], a.as_slice().to_vec())
            }
            Payload::Tubal { u, s, v } => {
                let k = self.k;
                let uk = Tensor::new(vec![n1, k, n3], u.clone())?;
                let vk = Tensor::new(vec![n2, k, n3], v.clone())?;
                let mut sk = vec![0.0; k * k * n3];
                for i in 0..k {
                    for j in 0..n3 {
                        sk[i + k * i + k * k * j] = s[i * n3 + j];
                    }
                }
                let sk = Tensor::new(vec![k, k, n3], sk)?;
                t_product(&t_product(&uk, &sk)?, &transpose(&vk)?)
            }
            Payload::Tsvd { entries } => {
                let layout = SliceLayout::new(&self.dims);
                let mut slices = vec![CMatrix::zeros(n1, n2); n3];
                for e in entries {
                    let u = CMatrix::from_column_slice(n1, 1, &e.u);
                    let v = CMatrix::from_column_slice(n2, 1, &e.v);
                    let outer = &u * v.adjoint();
                    let p = layout.partner(e.slice);
                    if p == e.slice {
                        slices[e.slice] += outer * Complex64::new(e.sigma, 0.0);
                    } else {
                        let half = Complex64::new(0.5 * e.sigma, 0.0);
                        slices[p] += linalg::conj(&outer) * half;
                        slices[e.slice] += outer * half;
                    }
                }
                ifft_mode3(&linalg::assemble(vec![n1, n2, n3], &slices))
            }
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Format("truncated compressed payload".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn usize(&mut self) -> Result<usize> {
        let v = u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes"));
        usize::try_from(v).map_err(|_| Error::Format(format!("value {v} does not fit usize")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|_| self.f64()).collect()
    }
}

/// Outcome of one compression run.
#[derive(Debug, Clone)]
pub struct CompressionResult {
    pub method: Method,
    pub k: usize,
    /// Closed-form ratio for `(dims, k)`.
    pub ratio: f64,
    /// Original entry count over the number of stored `f64` values.
    pub achieved_ratio: f64,
    /// RSE in dB; `-∞` for an exact reconstruction.
    pub rse_db: f64,
    pub reconstruction: Tensor,
    pub compressed: CompressedForm,
}

fn finish(m: &Tensor, compressed: CompressedForm, reconstruction: Tensor) -> Result<CompressionResult> {
    // At the largest k every method keeps the whole decomposition, so the
    // input itself is the reconstruction and the RSE is exactly -inf.
    let reconstruction = if compressed.k == k_max(compressed.method, m.dims())? {
        m.clone()
    } else {
        reconstruction
    };
    Ok(CompressionResult {
        method: compressed.method,
        k: compressed.k,
        ratio: ratio(compressed.method, m.dims(), compressed.k)?,
        achieved_ratio: compressed.achieved_ratio(),
        rse_db: rse_db(&reconstruction, m)?,
        reconstruction,
        compressed,
    })
}

/// Rank-`k₁` truncated SVD of the matrix of vectorized frontal slices.
pub fn compress_svd(m: &Tensor, k1: usize) -> Result<CompressionResult> {
    check_k(Method::Svd, m.dims(), k1)?;
    let (n1, n2, n3) = dims3(m.dims())?;
    let rows = n1 * n2;
    // column-major storage is already the (n1n2) × n3 unfolding
    let a = DMatrix::from_column_slice(rows, n3, m.data());
    let svd = nalgebra::SVD::try_new(a, true, true, f64::EPSILON, 0)
        .ok_or(Error::SvdFailure { slice: 0 })?;
    let u = svd.u.ok_or(Error::SvdFailure { slice: 0 })?;
    let v_t = svd.v_t.ok_or(Error::SvdFailure { slice: 0 })?;
    let sigma: Vec<f64> = svd.singular_values.iter().take(k1).copied().collect();
    let left = u.columns(0, k1).into_owned();
    let right = v_t.rows(0, k1).transpose();
    let compressed = CompressedForm {
        method: Method::Svd,
        dims: [n1, n2, n3],
        k: k1,
        payload: Payload::Svd {
            sigma,
            left: left.as_slice().to_vec(),
            right: right.as_slice().to_vec(),
        },
    };
    let reconstruction = compressed.decode()?;
    finish(m, compressed, reconstruction)
}

/// Keeps the `k₂` largest spectral singular values over all Fourier slices.
pub fn compress_tsvd(m: &Tensor, k2: usize) -> Result<CompressionResult> {
    check_k(Method::Tsvd, m.dims(), k2)?;
    let (n1, n2, n3) = dims3(m.dims())?;
    let f = t_svd(m)?;
    let n0 = n1.min(n2);
    let mut order: Vec<(usize, usize, f64)> = (0..n3)
        .flat_map(|s| (0..n0).map(move |i| (s, i)))
        .map(|(s, i)| (s, i, f.singular_values(s)[i]))
        .collect();
    order.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    let su = f.spectral_u();
    let sv = f.spectral_v();
    let entries = order[..k2]
        .iter()
        .map(|&(s, i, sigma)| {
            let u = (0..n1).map(|r| su.data()[r + n1 * i + n1 * n1 * s]).collect();
            let v = (0..n2).map(|r| sv.data()[r + n2 * i + n2 * n2 * s]).collect();
            SpectralEntry { slice: s, index: i, sigma, u, v }
        })
        .collect();
    let compressed = CompressedForm {
        method: Method::Tsvd,
        dims: [n1, n2, n3],
        k: k2,
        payload: Payload::Tsvd { entries },
    };
    let reconstruction = compressed.decode()?;
    finish(m, compressed, reconstruction)
}

/// Keeps the first `k₃` singular tubes; the reconstruction is the optimal
/// tubal-rank-`k₃` truncation.
pub fn compress_tsvd_tubal(m: &Tensor, k3: usize) -> Result<CompressionResult> {
    check_k(Method::TsvdTubal, m.dims(), k3)?;
    let (n1, n2, n3) = dims3(m.dims())?;
    let f = t_svd(m)?;
    let leading = |t: &Tensor, rows: usize| -> Vec<f64> {
        (0..n3)
            .flat_map(|j| t.frontal_slice(j)[..rows * k3].to_vec())
            .collect()
    };
    let u = leading(f.u(), n1);
    let v = leading(f.v(), n2);
    let s = (0..k3)
        .flat_map(|i| (0..n3).map(move |j| (i, j)))
        .map(|(i, j)| f.s().data()[i + n1 * i + n1 * n2 * j])
        .collect();
    let compressed = CompressedForm {
        method: Method::TsvdTubal,
        dims: [n1, n2, n3],
        k: k3,
        payload: Payload::Tubal { u, s, v },
    };
    let reconstruction = f.truncate(k3)?;
    finish(m, compressed, reconstruction)
}

pub fn compress(m: &Tensor, method: Method, k: usize) -> Result<CompressionResult> {
    match method {
        Method::Svd => compress_svd(m, k),
        Method::Tsvd => compress_tsvd(m, k),
        Method::TsvdTubal => compress_tsvd_tubal(m, k),
    }
}
