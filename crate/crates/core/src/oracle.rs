//! Reference implementations for tests. Compiled only under `cfg(test)` or
//! the `oracle` feature; nothing in the library calls into this module.
//!
//! Each routine follows the textbook definition directly and shares no code
//! with the FFT paths it is used to check.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Result;
use crate::tensor::{t_product, Tensor};

/// Which route [`t_product_via`] takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductPath {
    Fft,
    BruteForce,
}

/// `C(i, j, :) = Σ_k A(i, k, :) ⊛ B(k, j, :)` with explicit circular
/// convolutions, for order-3 tensors.
pub fn t_product_brute(a: &Tensor, b: &Tensor) -> Tensor {
    let (n1, n2, n3) = (a.dims()[0], a.dims()[1], a.dims()[2]);
    let n4 = b.dims()[1];
    assert_eq!(b.dims()[0], n2);
    assert_eq!(b.dims()[2], n3);
    Tensor::from_fn(vec![n1, n4, n3], |idx| {
        let (i, j, t) = (idx[0], idx[1], idx[2]);
        let mut acc = 0.0;
        for k in 0..n2 {
            for s in 0..n3 {
                acc += a.get(&[i, k, s]) * b.get(&[k, j, (t + n3 - s) % n3]);
            }
        }
        acc
    })
    .expect("finite inputs give finite products")
}

pub fn t_product_via(a: &Tensor, b: &Tensor, path: ProductPath) -> Result<Tensor> {
    match path {
        ProductPath::Fft => t_product(a, b),
        ProductPath::BruteForce => Ok(t_product_brute(a, b)),
    }
}

/// Frontal slices of the trailing-mode DFT of an order-3 tensor, by direct
/// summation `Â(:, :, j) = Σ_t A(:, :, t) · e^{−2πi·jt/n3}`.
pub fn dft_slices(a: &Tensor) -> Vec<DMatrix<Complex64>> {
    let (n1, n2, n3) = (a.dims()[0], a.dims()[1], a.dims()[2]);
    (0..n3)
        .map(|j| {
            DMatrix::from_fn(n1, n2, |r, c| {
                (0..n3)
                    .map(|t| {
                        let angle = -2.0 * std::f64::consts::PI * ((j * t) % n3) as f64 / n3 as f64;
                        Complex64::from_polar(a.get(&[r, c, t]), angle)
                    })
                    .sum()
            })
        })
        .collect()
}

/// Nuclear norm of the explicitly assembled block-diagonal spectral matrix.
pub fn blkdiag_nuclear_norm(a: &Tensor) -> f64 {
    let blocks = dft_slices(a);
    let (r, c) = blocks[0].shape();
    let n = blocks.len();
    let mut big = DMatrix::<Complex64>::zeros(r * n, c * n);
    for (j, b) in blocks.iter().enumerate() {
        big.view_mut((j * r, j * c), (r, c)).copy_from(b);
    }
    big.singular_values().iter().sum()
}
