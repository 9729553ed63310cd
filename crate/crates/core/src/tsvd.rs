//! Tensor SVD, optimal truncation and the t-SVD complexity measures.
//!
//! The factorization works slice by slice in the Fourier domain: each spectral
//! frontal slice gets an ordinary SVD, and the inverse transform brings the
//! factors back as real tensors with `M = U ∗ S ∗ Vᵀ`. Only the canonical half
//! of the spectrum is factorized; conjugate slices reuse the conjugated
//! factors so the inverse transform is exactly real.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::tensor::{ComplexTensor, Tensor};
use crate::transform::{fft_mode3, ifft_mode3, SliceLayout};

/// Relative tolerance used by the rank measures when none is given.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Factors of `M = U ∗ S ∗ Vᵀ`, with their spectra cached.
#[derive(Debug, Clone)]
pub struct TSvdFactors {
    u: Tensor,
    s: Tensor,
    v: Tensor,
    spectral_u: ComplexTensor,
    spectral_s: ComplexTensor,
    spectral_v: ComplexTensor,
    sigma: Vec<Vec<f64>>,
}

impl TSvdFactors {
    pub fn u(&self) -> &Tensor {
        &self.u
    }

    pub fn s(&self) -> &Tensor {
        &self.s
    }

    pub fn v(&self) -> &Tensor {
        &self.v
    }

    pub fn spectral_u(&self) -> &ComplexTensor {
        &self.spectral_u
    }

    pub fn spectral_s(&self) -> &ComplexTensor {
        &self.spectral_s
    }

    pub fn spectral_v(&self) -> &ComplexTensor {
        &self.spectral_v
    }

    /// Dims of the factorized tensor.
    pub fn dims(&self) -> Vec<usize> {
        let mut d = self.s.dims().to_vec();
        d[0] = self.u.dims()[0];
        d[1] = self.v.dims()[0];
        d
    }

    /// `min(n1, n2)`, the number of f-diagonal entries per slice.
    pub fn rank_bound(&self) -> usize {
        self.sigma.first().map_or(0, Vec::len)
    }

    pub fn num_slices(&self) -> usize {
        self.sigma.len()
    }

    /// Nonincreasing singular values of spectral slice `slice`.
    pub fn singular_values(&self, slice: usize) -> &[f64] {
        &self.sigma[slice]
    }

    pub fn all_singular_values(&self) -> &[Vec<f64>] {
        &self.sigma
    }

    /// `‖S(i, i, :)‖₂` for every `i`, from the original-domain middle factor.
    pub fn singular_tube_norms(&self) -> Vec<f64> {
        let (n1, n2) = (self.s.dims()[0], self.s.dims()[1]);
        let rho = self.num_slices();
        (0..self.rank_bound())
            .map(|i| {
                (0..rho)
                    .map(|j| self.s.data()[i + n1 * i + n1 * n2 * j].powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }

    fn spectral_sum(&self, k: usize) -> ComplexTensor {
        let dims = self.dims();
        let layout = SliceLayout::new(&dims);
        let self_conj: Vec<bool> = (0..layout.count()).map(|s| layout.is_self_conjugate(s)).collect();
        crate::tensor::spectral_product(dims, &layout, |s| {
            let u = linalg::slice_matrix(&self.spectral_u, s);
            let v = linalg::slice_matrix(&self.spectral_v, s);
            let mut m = linalg::low_rank(&u, &self.sigma[s], &v, k);
            if self_conj[s] {
                linalg::realify(&mut m);
            }
            m
        })
    }

    /// Best tubal-rank-`k` approximation `Σ_{i<k} U(:,i,:) ∗ S(i,i,:) ∗ V(:,i,:)ᵀ`.
    pub fn truncate(&self, k: usize) -> Result<Tensor> {
        let max = self.rank_bound();
        if k < 1 || k > max {
            return Err(Error::OutOfRange {
                name: "k",
                value: k,
                min: 1,
                max,
            });
        }
        ifft_mode3(&self.spectral_sum(k))
    }

    /// `U ∗ S ∗ Vᵀ`, evaluated slice-wise in the Fourier domain.
    pub fn reconstruct(&self) -> Result<Tensor> {
        ifft_mode3(&self.spectral_sum(self.rank_bound()))
    }

    /// `‖M − M_k‖²_F` predicted from the discarded spectral singular values.
    pub fn discarded_energy(&self, k: usize) -> f64 {
        let rho = self.num_slices() as f64;
        self.sigma
            .iter()
            .map(|s| s.iter().skip(k).map(|v| v * v).sum::<f64>())
            .sum::<f64>()
            / rho
    }

    pub fn multi_rank(&self, tol: f64) -> MultiRank {
        multi_rank_from(&self.sigma, tol)
    }

    pub fn tubal_rank(&self, tol: f64) -> usize {
        count_above(&self.singular_tube_norms(), tol)
    }

    pub fn tnn(&self) -> f64 {
        self.sigma.iter().flatten().sum()
    }

    pub fn ttn(&self) -> f64 {
        self.singular_tube_norms().iter().sum()
    }
}

/// Per-spectral-slice numerical ranks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiRank(pub Vec<usize>);

impl MultiRank {
    pub fn ranks(&self) -> &[usize] {
        &self.0
    }

    /// ℓ₁ norm of the multi-rank, the rank of the block-diagonal spectrum.
    pub fn l1(&self) -> usize {
        self.0.iter().sum()
    }
}

fn multi_rank_from(sigma: &[Vec<f64>], tol: f64) -> MultiRank {
    let global = sigma.iter().flatten().fold(0.0f64, |m, &v| m.max(v));
    let cut = tol * global;
    MultiRank(
        sigma
            .iter()
            .map(|s| s.iter().filter(|&&v| v > cut && v > 0.0).count())
            .collect(),
    )
}

fn count_above(values: &[f64], tol: f64) -> usize {
    let max = values.iter().fold(0.0f64, |m, &v| m.max(v));
    let cut = tol * max;
    values.iter().filter(|&&v| v > cut && v > 0.0).count()
}

fn check_finite(m: &Tensor) -> Result<()> {
    if m.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTensor("tensor has non-finite entries".into()))
    }
}

/// Singular values of every spectral frontal slice, without the factors.
pub fn spectral_singular_values(m: &Tensor) -> Result<Vec<Vec<f64>>> {
    check_finite(m)?;
    let f = fft_mode3(m);
    let layout = SliceLayout::new(m.dims());
    let canonical = layout.canonical();
    let computed = canonical
        .par_iter()
        .map(|&s| {
            let mut a = linalg::slice_matrix(&f, s);
            if layout.is_self_conjugate(s) {
                linalg::realify(&mut a);
            }
            linalg::singular_values(&a, s).map(|v| (s, v))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![Vec::new(); layout.count()];
    for (s, v) in computed {
        out[layout.partner(s)] = v.clone();
        out[s] = v;
    }
    Ok(out)
}

struct SliceFactors {
    u: CMatrix,
    sigma: Vec<f64>,
    v: CMatrix,
}

/// Tensor SVD of an order `N ≥ 3` tensor.
pub fn t_svd(m: &Tensor) -> Result<TSvdFactors> {
    check_finite(m)?;
    let dims = m.dims().to_vec();
    let (n1, n2) = (dims[0], dims[1]);
    let f = fft_mode3(m);
    let layout = SliceLayout::new(&dims);
    let canonical = layout.canonical();
    let computed = canonical
        .par_iter()
        .map(|&s| {
            let mut a = linalg::slice_matrix(&f, s);
            let real = layout.is_self_conjugate(s);
            if real {
                linalg::realify(&mut a);
            }
            let (mut u, sigma, mut v) = linalg::full_svd(&a, s)?;
            if real {
                linalg::realify(&mut u);
                linalg::realify(&mut v);
            }
            Ok((s, SliceFactors { u, sigma, v }))
        })
        .collect::<Result<Vec<_>>>()?;

    let count = layout.count();
    let mut slices: Vec<Option<SliceFactors>> = (0..count).map(|_| None).collect();
    for (s, fac) in computed {
        let p = layout.partner(s);
        if p != s {
            slices[p] = Some(SliceFactors {
                u: linalg::conj(&fac.u),
                sigma: fac.sigma.clone(),
                v: linalg::conj(&fac.v),
            });
        }
        slices[s] = Some(fac);
    }
    let slices: Vec<SliceFactors> = slices.into_iter().map(|x| x.expect("slice filled")).collect();

    let mut u_dims = dims.clone();
    u_dims[1] = n1;
    let mut v_dims = dims.clone();
    v_dims[0] = n2;
    v_dims[1] = n2;
    let us: Vec<CMatrix> = slices.iter().map(|f| f.u.clone()).collect();
    let vs: Vec<CMatrix> = slices.iter().map(|f| f.v.clone()).collect();
    let ss: Vec<CMatrix> = slices
        .iter()
        .map(|f| {
            let mut d = CMatrix::zeros(n1, n2);
            for (i, &v) in f.sigma.iter().enumerate() {
                d[(i, i)] = Complex64::new(v, 0.0);
            }
            d
        })
        .collect();
    let spectral_u = linalg::assemble(u_dims, &us);
    let spectral_v = linalg::assemble(v_dims, &vs);
    let spectral_s = linalg::assemble(dims, &ss);
    Ok(TSvdFactors {
        u: ifft_mode3(&spectral_u)?,
        s: ifft_mode3(&spectral_s)?,
        v: ifft_mode3(&spectral_v)?,
        spectral_u,
        spectral_s,
        spectral_v,
        sigma: slices.into_iter().map(|f| f.sigma).collect(),
    })
}

/// Convenience wrapper for [`TSvdFactors::truncate`].
pub fn truncate(f: &TSvdFactors, k: usize) -> Result<Tensor> {
    f.truncate(k)
}

/// Numerical rank of every spectral slice, counting singular values above
/// `tol` times the largest singular value over all slices.
pub fn multi_rank(m: &Tensor, tol: f64) -> Result<MultiRank> {
    Ok(multi_rank_from(&spectral_singular_values(m)?, tol))
}

/// Number of singular tubes whose ℓ₂ norm exceeds `tol` times the largest.
///
/// Tube norms come from the spectral singular values through Parseval:
/// `‖S(i,i,:)‖² = (1/ρ) Σ_j Ŝ(i,i,j)²`.
pub fn tubal_rank(m: &Tensor, tol: f64) -> Result<usize> {
    Ok(count_above(&tube_norms(&spectral_singular_values(m)?), tol))
}

fn tube_norms(sigma: &[Vec<f64>]) -> Vec<f64> {
    let rho = sigma.len() as f64;
    let k = sigma.first().map_or(0, Vec::len);
    (0..k)
        .map(|i| (sigma.iter().map(|s| s[i] * s[i]).sum::<f64>() / rho).sqrt())
        .collect()
}

/// Tensor nuclear norm: the sum of singular values over all spectral slices.
pub fn tnn(m: &Tensor) -> Result<f64> {
    Ok(spectral_singular_values(m)?.iter().flatten().sum())
}

/// Tensor tubal norm: the sum of ℓ₂ norms of the singular tubes.
pub fn ttn(m: &Tensor) -> Result<f64> {
    Ok(tube_norms(&spectral_singular_values(m)?).iter().sum())
}
