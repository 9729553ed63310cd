//! Fourier transforms along the trailing modes and the sampling operators.
//!
//! The forward transform is the unnormalized DFT; the inverse carries the
//! `1/n` factor. For order `N > 3` the transform is applied along every mode
//! `3..=N` in turn, which yields `ρ = n3 · … · nN` spectral frontal slices.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::tensor::{ComplexTensor, Tensor};

/// Relative bound on the imaginary residue accepted by [`ifft_mode3`].
pub const IMAG_RESIDUE_TOL: f64 = 1e-8;

/// Index bookkeeping for the frontal slices of a tensor with the given
/// trailing extents (modes 3 and up).
///
/// Slices are enumerated with the mode-3 index fastest. For the DFT of a real
/// tensor, slice `s` is the complex conjugate of slice `partner(s)`, where the
/// partner negates every trailing index modulo its extent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceLayout {
    trailing: Vec<usize>,
}

impl SliceLayout {
    pub fn new(dims: &[usize]) -> Self {
        Self {
            trailing: dims[2..].to_vec(),
        }
    }

    pub fn count(&self) -> usize {
        self.trailing.iter().product()
    }

    pub fn partner(&self, slice: usize) -> usize {
        let mut rem = slice;
        let mut out = 0;
        let mut stride = 1;
        for &n in &self.trailing {
            let k = rem % n;
            rem /= n;
            out += ((n - k) % n) * stride;
            stride *= n;
        }
        out
    }

    pub fn is_self_conjugate(&self, slice: usize) -> bool {
        self.partner(slice) == slice
    }

    /// Slices that determine the whole spectrum of a real tensor: every slice
    /// that is not larger than its partner.
    pub fn canonical(&self) -> Vec<usize> {
        (0..self.count()).filter(|&s| s <= self.partner(s)).collect()
    }
}

fn transform_mode(
    data: &mut [Complex64],
    dims: &[usize],
    mode: usize,
    inverse: bool,
    planner: &mut FftPlanner<f64>,
) {
    let n = dims[mode];
    if n == 1 {
        return;
    }
    let stride: usize = dims[..mode].iter().product();
    let block = stride * n;
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let scale = 1.0 / n as f64;
    for chunk in data.chunks_mut(block) {
        for inner in 0..stride {
            for (t, b) in buf.iter_mut().enumerate() {
                *b = chunk[inner + t * stride];
            }
            fft.process_with_scratch(&mut buf, &mut scratch);
            for (t, b) in buf.iter().enumerate() {
                chunk[inner + t * stride] = if inverse { *b * scale } else { *b };
            }
        }
    }
}

fn transform_trailing(data: &mut [Complex64], dims: &[usize], inverse: bool) {
    let mut planner = FftPlanner::new();
    for mode in 2..dims.len() {
        transform_mode(data, dims, mode, inverse, &mut planner);
    }
}

/// Forward DFT of a real tensor along modes 3..N.
pub fn fft_mode3(a: &Tensor) -> ComplexTensor {
    let mut data: Vec<Complex64> = a.data().iter().map(|&x| Complex64::new(x, 0.0)).collect();
    transform_trailing(&mut data, a.dims(), false);
    ComplexTensor::from_parts(a.dims().to_vec(), data)
}

/// Forward DFT of a complex tensor along modes 3..N.
pub fn fft_complex(a: &ComplexTensor) -> ComplexTensor {
    let mut data = a.data().to_vec();
    transform_trailing(&mut data, a.dims(), false);
    ComplexTensor::from_parts(a.dims().to_vec(), data)
}

/// Inverse DFT of a complex tensor along modes 3..N, keeping the complex result.
pub fn ifft_complex(a: &ComplexTensor) -> ComplexTensor {
    let mut data = a.data().to_vec();
    transform_trailing(&mut data, a.dims(), true);
    ComplexTensor::from_parts(a.dims().to_vec(), data)
}

/// Inverse DFT along modes 3..N, returning the real part.
///
/// Fails with [`Error::SymmetryViolation`] when the largest imaginary residue
/// exceeds `1e-8 · (1 + max |real|)`, which means the input was not the
/// spectrum of a real tensor.
pub fn ifft_mode3(a: &ComplexTensor) -> Result<Tensor> {
    let spatial = ifft_complex(a);
    let mut max_re = 0.0f64;
    let mut max_im = 0.0f64;
    for z in spatial.data() {
        max_re = max_re.max(z.re.abs());
        max_im = max_im.max(z.im.abs());
    }
    let limit = IMAG_RESIDUE_TOL * (1.0 + max_re);
    // NaN residues fail this comparison and are reported as violations too.
    if max_im.is_nan() || max_im > limit {
        return Err(Error::SymmetryViolation {
            residue: max_im,
            limit,
        });
    }
    let data = spatial.data().iter().map(|z| z.re).collect();
    Ok(Tensor::from_parts(a.dims().to_vec(), data))
}

/// Observation indicator over the entries of a tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    dims: Vec<usize>,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(dims: Vec<usize>, bits: Vec<bool>) -> Result<Self> {
        crate::tensor::validate_dims(&dims)?;
        let len: usize = dims.iter().product();
        if bits.len() != len {
            return Err(Error::Dimension(format!(
                "mask has {} entries, dims {:?} need {}",
                bits.len(),
                dims,
                len
            )));
        }
        Ok(Self { dims, bits })
    }

    pub fn full(dims: Vec<usize>) -> Result<Self> {
        let len = dims.iter().product();
        Self::new(dims, vec![true; len])
    }

    pub fn empty(dims: Vec<usize>) -> Result<Self> {
        let len = dims.iter().product();
        Self::new(dims, vec![false; len])
    }

    /// Reads a mask stored as a tensor of zeros and ones.
    pub fn from_tensor(t: &Tensor) -> Result<Self> {
        let bits = t
            .data()
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if v == 1.0 {
                    Ok(true)
                } else if v == 0.0 {
                    Ok(false)
                } else {
                    Err(Error::Format(format!(
                        "mask entry {i} is {v}, expected 0 or 1"
                    )))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(t.dims().to_vec(), bits)
    }

    /// Independent Bernoulli(`rate`) observation of every entry, drawn from a
    /// ChaCha8 stream seeded with `seed`.
    pub fn bernoulli(dims: Vec<usize>, rate: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rate) {
            return Err(Error::Parameter(format!(
                "sampling rate {rate} is outside [0, 1]"
            )));
        }
        let len: usize = dims.iter().product();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits = (0..len).map(|_| rng.random::<f64>() < rate).collect();
        Self::new(dims, bits)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn observed_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn to_tensor(&self) -> Tensor {
        let data = self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        Tensor::from_parts(self.dims.clone(), data)
    }
}

/// The orthogonal projector `P_Ω` onto tensors supported on a mask.
#[derive(Debug, Clone)]
pub struct SamplingOperator {
    mask: Mask,
}

impl SamplingOperator {
    pub fn new(mask: Mask) -> Self {
        Self { mask }
    }

    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    fn check_dims(&self, dims: &[usize]) -> Result<()> {
        if dims != self.mask.dims() {
            return Err(Error::Dimension(format!(
                "mask dims {:?} do not match tensor dims {:?}",
                self.mask.dims(),
                dims
            )));
        }
        Ok(())
    }

    /// `P_Ω(X)`: keeps observed entries and zeroes the rest.
    pub fn apply(&self, x: &Tensor) -> Result<Tensor> {
        self.check_dims(x.dims())?;
        let data = x
            .data()
            .iter()
            .zip(self.mask.bits())
            .map(|(&v, &b)| if b { v } else { 0.0 })
            .collect();
        Ok(Tensor::from_parts(x.dims().to_vec(), data))
    }

    /// `𝒢 = F₃ P_Ω F₃⁻¹`, the sampling operator seen from the Fourier domain.
    pub fn apply_g(&self, x_hat: &ComplexTensor) -> Result<ComplexTensor> {
        self.check_dims(x_hat.dims())?;
        let spatial = ifft_mode3(x_hat)?;
        Ok(fft_mode3(&self.apply(&spatial)?))
    }
}

/// Convenience wrapper for [`SamplingOperator::apply`].
pub fn apply_sampling(p: &SamplingOperator, x: &Tensor) -> Result<Tensor> {
    p.apply(x)
}

/// Convenience wrapper for [`SamplingOperator::apply_g`].
pub fn apply_g(p: &SamplingOperator, x_hat: &ComplexTensor) -> Result<ComplexTensor> {
    p.apply_g(x_hat)
}
