//! Dense tensors and the t-product algebra.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::transform::{fft_mode3, ifft_mode3, SliceLayout};

pub(crate) fn validate_dims(dims: &[usize]) -> Result<()> {
    if dims.len() < 3 {
        return Err(Error::InvalidTensor(format!(
            "order {} is below the minimum of 3",
            dims.len()
        )));
    }
    if let Some(pos) = dims.iter().position(|&d| d == 0) {
        return Err(Error::InvalidTensor(format!("extent of mode {} is zero", pos + 1)));
    }
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::InvalidTensor(format!("dims {dims:?} overflow")))?;
    Ok(())
}

/// Real tensor of order `N ≥ 3`, stored first-index-fastest.
#[derive(Clone, PartialEq)]
pub struct Tensor {
    dims: Vec<usize>,
    data: Vec<f64>,
}

impl fmt::Debug for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tensor")
            .field("dims", &self.dims)
            .field("frobenius", &self.frobenius())
            .finish()
    }
}

impl Tensor {
    /// Validates shape and finiteness.
    pub fn new(dims: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        validate_dims(&dims)?;
        let len: usize = dims.iter().product();
        if data.len() != len {
            return Err(Error::InvalidTensor(format!(
                "dims {:?} need {} entries, got {}",
                dims,
                len,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidTensor(format!("entry {pos} is not finite")));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        validate_dims(&dims)?;
        let len = dims.iter().product();
        Ok(Self {
            dims,
            data: vec![0.0; len],
        })
    }

    /// Builds a tensor by evaluating `f` at every multi-index, in storage order.
    pub fn from_fn(dims: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        validate_dims(&dims)?;
        let len: usize = dims.iter().product();
        let mut idx = vec![0usize; dims.len()];
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            data.push(f(&idx));
            for (i, d) in idx.iter_mut().zip(&dims) {
                *i += 1;
                if *i < *d {
                    break;
                }
                *i = 0;
            }
        }
        Self::new(dims, data)
    }

    pub(crate) fn from_parts(dims: Vec<usize>, data: Vec<f64>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), data.len());
        Self { dims, data }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Number of frontal slices, the product of the trailing extents.
    pub fn num_slices(&self) -> usize {
        self.dims[2..].iter().product()
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.dims.len(), "index order mismatch");
        let mut off = 0;
        let mut stride = 1;
        for (&i, &d) in idx.iter().zip(&self.dims) {
            assert!(i < d, "index {idx:?} out of bounds for {:?}", self.dims);
            off += i * stride;
            stride *= d;
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    /// Frontal slice `s` as a column-major `n1 × n2` block.
    pub fn frontal_slice(&self, s: usize) -> &[f64] {
        let len = self.dims[0] * self.dims[1];
        &self.data[s * len..(s + 1) * len]
    }

    /// The mode-3 fiber at `(i, j)` of an order-3 tensor.
    pub fn tube(&self, i: usize, j: usize) -> Tube {
        assert_eq!(self.order(), 3, "tubes are defined for order-3 tensors");
        let (n1, n2) = (self.dims[0], self.dims[1]);
        Tube((0..self.dims[2]).map(|k| self.data[i + n1 * (j + n2 * k)]).collect())
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, c: f64) -> Tensor {
        Self::from_parts(self.dims.clone(), self.data.iter().map(|v| v * c).collect())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Tensor {
        Self::from_parts(self.dims.clone(), self.data.iter().map(|&v| f(v)).collect())
    }

    fn zip_with(&self, other: &Tensor, f: impl Fn(f64, f64) -> f64) -> Result<Tensor> {
        if self.dims != other.dims {
            return Err(Error::Dimension(format!(
                "{:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self::from_parts(self.dims.clone(), data))
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Complex tensor, typically the spectrum of a real tensor along modes 3..N.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTensor {
    dims: Vec<usize>,
    data: Vec<Complex64>,
}

impl ComplexTensor {
    pub fn new(dims: Vec<usize>, data: Vec<Complex64>) -> Result<Self> {
        validate_dims(&dims)?;
        let len: usize = dims.iter().product();
        if data.len() != len {
            return Err(Error::InvalidTensor(format!(
                "dims {:?} need {} entries, got {}",
                dims,
                len,
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let len = dims.iter().product();
        Self::new(dims, vec![Complex64::new(0.0, 0.0); len])
    }

    pub(crate) fn from_parts(dims: Vec<usize>, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), data.len());
        Self { dims, data }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn num_slices(&self) -> usize {
        self.dims[2..].iter().product()
    }

    pub fn frontal_slice(&self, s: usize) -> &[Complex64] {
        let len = self.dims[0] * self.dims[1];
        &self.data[s * len..(s + 1) * len]
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// A mode-3 fiber.
#[derive(Debug, Clone, PartialEq)]
pub struct Tube(Vec<f64>);

impl Tube {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Dimension("tube must have at least one entry".into()));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Circular convolution of two tubes: `c[k] = Σ_j a[j] · b[(k − j) mod n]`.
pub fn tube_mult(a: &Tube, b: &Tube) -> Result<Tube> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::Dimension(format!("tube lengths {} and {}", n, b.len())));
    }
    let c = (0..n)
        .map(|k| {
            (0..n)
                .map(|j| a.0[j] * b.0[(k + n - j) % n])
                .sum::<f64>()
        })
        .collect();
    Ok(Tube(c))
}

/// Order-3 identity tensor: first frontal slice `I_{n1}`, the rest zero.
pub fn identity(n1: usize, n3: usize) -> Result<Tensor> {
    let mut t = Tensor::zeros(vec![n1, n1, n3])?;
    for i in 0..n1 {
        t.data[i + n1 * i] = 1.0;
    }
    Ok(t)
}

pub fn frobenius(a: &Tensor) -> f64 {
    a.frobenius()
}

/// Slice-wise products in the Fourier domain, computing only the canonical
/// half of the spectrum and mirroring the conjugate slices.
pub(crate) fn spectral_product(
    dims: Vec<usize>,
    layout: &SliceLayout,
    f: impl Fn(usize) -> CMatrix + Sync,
) -> crate::tensor::ComplexTensor {
    let canonical = layout.canonical();
    let computed: Vec<(usize, CMatrix)> = canonical.par_iter().map(|&s| (s, f(s))).collect();
    let mut slices: Vec<Option<CMatrix>> = vec![None; layout.count()];
    for (s, m) in computed {
        let p = layout.partner(s);
        if p != s {
            slices[p] = Some(linalg::conj(&m));
        }
        slices[s] = Some(m);
    }
    let slices: Vec<CMatrix> = slices.into_iter().map(|m| m.expect("every slice set")).collect();
    linalg::assemble(dims, &slices)
}

/// t-product `C = A ∗ B` of `A ∈ ℝ^{n1×n2×…}` and `B ∈ ℝ^{n2×n4×…}`.
///
/// Computed through the trailing-mode FFT as independent slice products. The
/// trailing extents of both operands must agree; for order `N > 3` this is the
/// multi-mode generalization with the same slice-wise structure.
pub fn t_product(a: &Tensor, b: &Tensor) -> Result<Tensor> {
    if a.order() != b.order() || a.dims[2..] != b.dims[2..] || a.dims[1] != b.dims[0] {
        return Err(Error::Dimension(format!(
            "cannot t-multiply {:?} by {:?}",
            a.dims, b.dims
        )));
    }
    let fa = fft_mode3(a);
    let fb = fft_mode3(b);
    let mut dims = a.dims.clone();
    dims[1] = b.dims[1];
    let layout = SliceLayout::new(&dims);
    let self_conj: Vec<bool> = (0..layout.count()).map(|s| layout.is_self_conjugate(s)).collect();
    let spectrum = spectral_product(dims, &layout, |s| {
        let mut m = linalg::slice_matrix(&fa, s) * linalg::slice_matrix(&fb, s);
        if self_conj[s] {
            linalg::realify(&mut m);
        }
        m
    });
    ifft_mode3(&spectrum)
}

/// Tensor transpose of an order-3 tensor: every frontal slice is transposed
/// and slices `2..n3` are taken in reverse order.
pub fn transpose(a: &Tensor) -> Result<Tensor> {
    if a.order() != 3 {
        return Err(Error::Dimension(format!(
            "transpose is defined for order-3 tensors, got order {}",
            a.order()
        )));
    }
    let (n1, n2, n3) = (a.dims[0], a.dims[1], a.dims[2]);
    let mut data = vec![0.0; a.numel()];
    for k in 0..n3 {
        let src = (n3 - k) % n3;
        let from = a.frontal_slice(src);
        let to = &mut data[k * n1 * n2..(k + 1) * n1 * n2];
        for i in 0..n1 {
            for j in 0..n2 {
                to[j + n2 * i] = from[i + n1 * j];
            }
        }
    }
    Ok(Tensor::from_parts(vec![n2, n1, n3], data))
}

/// Whether `Qᵀ ∗ Q` and `Q ∗ Qᵀ` are both within `tol · ‖I‖_F` of the identity.
pub fn is_orthogonal(q: &Tensor, tol: f64) -> Result<bool> {
    if q.order() != 3 || q.dims[0] != q.dims[1] {
        return Err(Error::Dimension(format!(
            "orthogonality needs an n×n×n3 tensor, got {:?}",
            q.dims
        )));
    }
    let eye = identity(q.dims[0], q.dims[2])?;
    let bound = tol * eye.frobenius();
    let qt = transpose(q)?;
    let left = t_product(&qt, q)?.sub(&eye)?.frobenius();
    let right = t_product(q, &qt)?.sub(&eye)?.frobenius();
    Ok(left <= bound && right <= bound)
}
