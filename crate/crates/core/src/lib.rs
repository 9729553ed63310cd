//! Tensor algebra built on the t-product.
//!
//! Third-order (and higher) real tensors are treated as matrices of tubes,
//! multiplied by circular convolution along the trailing modes. Everything in
//! this crate leans on one fact: the discrete Fourier transform along the
//! trailing modes turns the t-product into independent frontal-slice matrix
//! products. The modules are layered accordingly:
//!
//! - [`tensor`]: dense containers, tubes and the t-product algebra.
//! - [`transform`]: mode-wise FFTs, sampling masks and the conjugated sampling
//!   operator.
//! - [`tsvd`]: the tensor SVD, optimal truncation and tensor rank measures.
//! - [`completion`]: singular value thresholding and TNN-penalized ADMM
//!   completion.
//! - [`compression`]: vectorized-SVD, spectral top-k and tubal compression.
//! - [`cli`]: file formats and the `tsvd` command-line driver.
//!
//! Storage is first-index-fastest (column-major). Frontal slices are
//! contiguous blocks of `n1 * n2` scalars; for order `N > 3` the trailing
//! indices are flattened into a single slice index with mode 3 fastest.
//!
//! FFT convention: the forward transform is unnormalized and the inverse is
//! scaled by `1/n`, so `‖A‖²_F = ‖Â‖²_F / ρ` with `ρ` the number of frontal
//! slices.

pub mod cli;
pub mod completion;
pub mod compression;
mod error;
pub(crate) mod linalg;
#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
pub mod tensor;
pub mod transform;
pub mod tsvd;

pub use num_complex::Complex64;

pub use completion::{complete, rse_db, shrink_step, svt, AdmmConfig, SolveReport};
pub use compression::{CompressedForm, CompressionResult, Method};
pub use error::{Error, Result};
pub use tensor::{identity, t_product, transpose, tube_mult, ComplexTensor, Tensor, Tube};
pub use transform::{fft_mode3, ifft_mode3, Mask, SamplingOperator};
pub use tsvd::{multi_rank, t_svd, tnn, ttn, tubal_rank, MultiRank, TSvdFactors};
