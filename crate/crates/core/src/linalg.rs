//! Complex frontal-slice helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::ComplexTensor;

pub(crate) type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub(crate) fn slice_matrix(t: &ComplexTensor, slice: usize) -> CMatrix {
    let (n1, n2) = (t.dims()[0], t.dims()[1]);
    let len = n1 * n2;
    CMatrix::from_column_slice(n1, n2, &t.data()[slice * len..(slice + 1) * len])
}

/// Copies the imaginary-free part of a slice that must be real (self-conjugate
/// slices of a real tensor's spectrum carry only rounding noise there).
pub(crate) fn realify(m: &mut CMatrix) {
    for z in m.iter_mut() {
        z.im = 0.0;
    }
}

/// Assembles a complex tensor from per-slice matrices given in slice order.
pub(crate) fn assemble(dims: Vec<usize>, slices: &[CMatrix]) -> ComplexTensor {
    let mut data = Vec::with_capacity(dims.iter().product());
    for m in slices {
        data.extend_from_slice(m.as_slice());
    }
    ComplexTensor::from_parts(dims, data)
}

pub(crate) fn conj(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

/// Thin SVD `m = u · diag(σ) · vᴴ` with `σ` sorted nonincreasing.
pub(crate) struct ThinSvd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

pub(crate) fn thin_svd(m: &CMatrix, slice: usize) -> Result<ThinSvd> {
    let (r, c) = m.shape();
    let k = r.min(c);
    if m.iter().all(|z| *z == ZERO) {
        return Ok(ThinSvd {
            u: CMatrix::identity(r, k),
            sigma: vec![0.0; k],
            v: CMatrix::identity(c, k),
        });
    }
    let svd = nalgebra::SVD::try_new(m.clone(), true, true, f64::EPSILON, 0)
        .ok_or(Error::SvdFailure { slice })?;
    let u = svd.u.ok_or(Error::SvdFailure { slice })?;
    let v_t = svd.v_t.ok_or(Error::SvdFailure { slice })?;
    Ok(ThinSvd {
        u,
        sigma: svd.singular_values.iter().copied().collect(),
        v: v_t.adjoint(),
    })
}

pub(crate) fn singular_values(m: &CMatrix, slice: usize) -> Result<Vec<f64>> {
    let k = m.nrows().min(m.ncols());
    if m.iter().all(|z| *z == ZERO) {
        return Ok(vec![0.0; k]);
    }
    let svd = nalgebra::SVD::try_new(m.clone(), false, false, f64::EPSILON, 0)
        .ok_or(Error::SvdFailure { slice })?;
    Ok(svd.singular_values.iter().copied().collect())
}

/// Extends orthonormal columns to a square unitary matrix.
///
/// Candidates are standard basis vectors; at each step the one with the
/// largest component orthogonal to the current span is taken, projected twice
/// and normalized. Deterministic for a given input.
pub(crate) fn complete_basis(q: &CMatrix) -> CMatrix {
    let (n, r) = q.shape();
    let mut cols: Vec<Vec<Complex64>> = (0..r).map(|j| q.column(j).iter().copied().collect()).collect();
    let mut used = vec![false; n];
    while cols.len() < n {
        let mut best: Option<(usize, Vec<Complex64>, f64)> = None;
        for (e, &taken) in used.iter().enumerate() {
            if taken {
                continue;
            }
            let mut v = vec![ZERO; n];
            v[e] = Complex64::new(1.0, 0.0);
            for _ in 0..2 {
                for c in &cols {
                    let dot: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (vi, ci) in v.iter_mut().zip(c) {
                        *vi -= dot * ci;
                    }
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if best.as_ref().is_none_or(|(_, _, b)| norm > *b) {
                best = Some((e, v, norm));
            }
        }
        let (e, mut v, norm) = best.expect("fewer than n columns leaves a candidate");
        used[e] = true;
        for z in v.iter_mut() {
            *z /= norm;
        }
        cols.push(v);
    }
    let flat: Vec<Complex64> = cols.into_iter().flatten().collect();
    CMatrix::from_column_slice(n, n, &flat)
}

/// Full SVD with square unitary factors: `m = u · s · vᴴ` where `u` is
/// `r × r`, `v` is `c × c` and `σ` has `min(r, c)` entries.
pub(crate) fn full_svd(m: &CMatrix, slice: usize) -> Result<(CMatrix, Vec<f64>, CMatrix)> {
    let (r, c) = m.shape();
    if m.iter().all(|z| *z == ZERO) {
        return Ok((CMatrix::identity(r, r), vec![0.0; r.min(c)], CMatrix::identity(c, c)));
    }
    let thin = thin_svd(m, slice)?;
    let u = if thin.u.ncols() < r { complete_basis(&thin.u) } else { thin.u };
    let v = if thin.v.ncols() < c { complete_basis(&thin.v) } else { thin.v };
    Ok((u, thin.sigma, v))
}

/// `Σ_{i<k} σ_i · u_i · v_iᴴ` for the leading `k` singular triplets.
pub(crate) fn low_rank(u: &CMatrix, sigma: &[f64], v: &CMatrix, k: usize) -> CMatrix {
    let mut out = CMatrix::zeros(u.nrows(), v.nrows());
    for (i, &s) in sigma.iter().enumerate().take(k) {
        if s == 0.0 {
            continue;
        }
        let ui = u.column(i) * Complex64::new(s, 0.0);
        out += ui * v.column(i).adjoint();
    }
    out
}
