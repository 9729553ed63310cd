#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tsvd_core::{Complex64, Tensor};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(dims: &[usize], rng: &mut ChaCha8Rng) -> Tensor {
    let n: usize = dims.iter().product();
    let data = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    Tensor::new(dims.to_vec(), data).unwrap()
}

/// Random order-3 extents with each extent in `1..=max[i]`.
pub fn dims3(rng: &mut ChaCha8Rng, max: [usize; 3]) -> Vec<usize> {
    max.iter().map(|&m| rng.random_range(1..=m)).collect()
}

pub fn complex_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn rel(a: &Tensor, b: &Tensor) -> f64 {
    a.sub(b).unwrap().frobenius() / b.frobenius().max(f64::MIN_POSITIVE)
}

pub fn nuclear(m: &DMatrix<Complex64>) -> f64 {
    m.clone().singular_values().iter().sum()
}

/// Conjugate transpose of every Fourier slice of a complex order-3 tensor
/// stored column-major, as explicit matrices.
pub fn slices(dims: &[usize], data: &[Complex64]) -> Vec<DMatrix<Complex64>> {
    let (r, c) = (dims[0], dims[1]);
    data.chunks(r * c).map(|s| DMatrix::from_column_slice(r, c, s)).collect()
}

/// Prints one acceptance line and fails the test when `ok` is false. Writes to
/// the stderr handle directly so the line shows without `--nocapture`.
pub fn verdict(id: u32, name: &str, ok: bool, detail: &str) {
    use std::io::Write;
    let _ = writeln!(
        std::io::stderr(),
        "criterion {id:>2} [{}] {name}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {id} failed: {detail}");
}
