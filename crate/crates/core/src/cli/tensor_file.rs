//! The `TSR1` binary tensor format.
//!
//! ```text
//! magic    4 bytes   "TSR1"
//! order    u8        N (≥ 3)
//! dims     N × u64   little endian
//! payload  Π dims × f64, little endian, first index fastest
//! ```
//!
//! Masks use the same container with a payload of zeros and ones.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::Tensor;
use crate::transform::Mask;

pub const MAGIC: &[u8; 4] = b"TSR1";

pub fn encode(t: &Tensor) -> Vec<u8> {
    let mut out = Vec::with_capacity(5 + 8 * t.order() + 8 * t.numel());
    out.extend_from_slice(MAGIC);
    out.push(t.order() as u8);
    for &d in t.dims() {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    for &v in t.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<Tensor> {
    if bytes.len() < 5 || &bytes[..4] != MAGIC {
        return Err(Error::Format("not a TSR1 tensor file".into()));
    }
    let order = bytes[4] as usize;
    if order < 3 {
        return Err(Error::Format(format!("tensor order {order} is below 3")));
    }
    let header = 5 + 8 * order;
    if bytes.len() < header {
        return Err(Error::Format("truncated dims header".into()));
    }
    let mut dims = Vec::with_capacity(order);
    for chunk in bytes[5..header].chunks_exact(8) {
        let d = u64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
        dims.push(usize::try_from(d).map_err(|_| Error::Format(format!("extent {d} too large")))?);
    }
    let len = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::Format(format!("dims {dims:?} overflow")))?;
    let expected = len
        .checked_mul(8)
        .and_then(|p| p.checked_add(header))
        .ok_or_else(|| Error::Format(format!("dims {dims:?} overflow")))?;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "payload is {} bytes, dims {:?} need {}",
            bytes.len() - header,
            dims,
            expected - header
        )));
    }
    let data = bytes[header..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Tensor::new(dims, data).map_err(|e| Error::Format(e.to_string()))
}

pub fn read(path: &Path) -> Result<Tensor> {
    decode(&fs::read(path)?)
}

pub fn write(path: &Path, t: &Tensor) -> Result<()> {
    fs::write(path, encode(t))?;
    Ok(())
}

pub fn read_mask(path: &Path) -> Result<Mask> {
    Mask::from_tensor(&read(path)?)
}

/// Parses a coordinate list, one whitespace-separated 1-based index tuple per
/// line. Blank lines and lines starting with `#` are ignored.
pub fn parse_mask_coords(text: &str, dims: &[usize]) -> Result<Mask> {
    let len: usize = dims.iter().product();
    let mut bits = vec![false; len];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let idx = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>().map_err(|_| {
                    Error::Format(format!("line {}: bad index {tok:?}", lineno + 1))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if idx.len() != dims.len() {
            return Err(Error::Format(format!(
                "line {}: expected {} indices, got {}",
                lineno + 1,
                dims.len(),
                idx.len()
            )));
        }
        let mut off = 0;
        let mut stride = 1;
        for (&i, &d) in idx.iter().zip(dims) {
            if i == 0 || i > d {
                return Err(Error::Format(format!(
                    "line {}: index {i} outside 1..={d}",
                    lineno + 1
                )));
            }
            off += (i - 1) * stride;
            stride *= d;
        }
        bits[off] = true;
    }
    Mask::new(dims.to_vec(), bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_byte_identical() {
        let t = Tensor::from_fn(vec![2, 3, 2, 2], |i| i.iter().sum::<usize>() as f64 * -0.25).unwrap();
        let bytes = encode(&t);
        assert_eq!(&bytes[..4], b"TSR1");
        assert_eq!(bytes[4], 4);
        assert_eq!(u64::from_le_bytes(bytes[5..13].try_into().unwrap()), 2);
        let back = decode(&bytes).unwrap();
        assert_eq!(back, t);
        assert_eq!(encode(&back), bytes);
    }

    #[test]
    fn rejects_malformed() {
        let t = Tensor::zeros(vec![1, 1, 2]).unwrap();
        let good = encode(&t);
        assert!(decode(b"TSR2\x03").is_err());
        assert!(decode(&good[..good.len() - 3]).is_err());
        let mut low_order = good.clone();
        low_order[4] = 2;
        assert!(decode(&low_order).is_err());
        let mut nan = good.clone();
        let n = nan.len();
        nan[n - 8..].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(decode(&nan), Err(Error::Format(_))));
    }

    #[test]
    fn coordinate_masks() {
        let m = parse_mask_coords("# observed\n1 1 1\n\n2 3 2\n", &[2, 3, 2]).unwrap();
        assert_eq!(m.observed_count(), 2);
        assert!(m.bits()[0]);
        assert!(m.bits()[1 + 2 * 2 + 6]);
        assert!(parse_mask_coords("3 1 1", &[2, 3, 2]).is_err());
        assert!(parse_mask_coords("1 1", &[2, 3, 2]).is_err());
        assert!(parse_mask_coords("0 1 1", &[2, 3, 2]).is_err());
    }
}
