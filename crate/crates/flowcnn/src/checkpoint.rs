//! Model checkpoints.
//!
//! Layout, all integers `u32` and all values `f32`, little-endian:
//! magic `VCNN1\n`; `N`; the four input dims `(3, D, H, W)`; then six
//! tensors, each as `rank`, `rank` extents and the row-major values. Tensor
//! order: conv kernels `(6,3,N,3,3)`, conv bias `(6)`, fc1 weights
//! `(16,flat)`, fc1 bias `(16)`, fc2 weights `(1,16)`, fc2 bias `(1)`.

use std::fs;
use std::path::Path;

use flowcnn_core::model::ModelParams;
use flowcnn_core::Tensor;

use crate::{Error, Result};

pub const MAGIC: &[u8; 6] = b"VCNN1\n";

pub fn encode(params: &ModelParams) -> Vec<u8> {
    let mut out = MAGIC.to_vec();
    let put = |v: usize, out: &mut Vec<u8>| out.extend_from_slice(&(v as u32).to_le_bytes());
    put(params.n_frames(), &mut out);
    for d in params.input_dims {
        put(d, &mut out);
    }
    for t in params.tensors() {
        put(t.rank(), &mut out);
        for &d in t.shape() {
            put(d, &mut out);
        }
        for v in t.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    path: &'a Path,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        if self.bytes.len() < n {
            return Err(Error::malformed(self.path, "truncated checkpoint"));
        }
        let (head, rest) = self.bytes.split_at(n);
        self.bytes = rest;
        Ok(head)
    }

    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }

    fn tensor(&mut self) -> Result<Tensor> {
        let rank = self.u32()?;
        if rank > 8 {
            return Err(Error::malformed(self.path, format!("implausible tensor rank {rank}")));
        }
        let shape = (0..rank).map(|_| self.u32()).collect::<Result<Vec<_>>>()?;
        let len = shape
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .filter(|&n| n.checked_mul(4).is_some_and(|b| b <= self.bytes.len()))
            .ok_or_else(|| Error::malformed(self.path, "tensor larger than the file"))?;
        let data = self
            .take(len * 4)?
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect();
        Ok(Tensor::from_vec(&shape, data)?)
    }
}

/// Parses checkpoint bytes; `path` is only used in error messages. Tensor
/// shapes are checked against the architecture implied by `N` and the
/// input dims.
pub fn decode(bytes: &[u8], path: &Path) -> Result<ModelParams> {
    let body = bytes
        .strip_prefix(MAGIC.as_slice())
        .ok_or_else(|| Error::malformed(path, "bad magic"))?;
    let mut r = Reader { bytes: body, path };
    let n = r.u32()?;
    let dims = [r.u32()?, r.u32()?, r.u32()?, r.u32()?];
    let tensors = [r.tensor()?, r.tensor()?, r.tensor()?, r.tensor()?, r.tensor()?, r.tensor()?];
    if !r.bytes.is_empty() {
        return Err(Error::malformed(path, "trailing bytes after the last tensor"));
    }
    ModelParams::from_tensors(n, dims, tensors).map_err(|e| Error::malformed(path, e.to_string()))
}

pub fn save(params: &ModelParams, path: &Path) -> Result<()> {
    fs::write(path, encode(params)).map_err(Error::io(path))
}

pub fn load(path: &Path) -> Result<ModelParams> {
    let bytes = fs::read(path).map_err(Error::io(path))?;
    decode(&bytes, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use flowcnn_core::model::build_model;

    #[test]
    fn round_trip_is_exact() {
        let p = build_model(2, [3, 5, 48, 48], 9).unwrap();
        assert_eq!(decode(&encode(&p), Path::new("m")).unwrap(), p);
    }

    #[test]
    fn header_layout() {
        let p = build_model(3, [3, 7, 32, 32], 1).unwrap();
        let bytes = encode(&p);
        assert_eq!(&bytes[..6], MAGIC);
        let word = |i: usize| u32::from_le_bytes(bytes[6 + 4 * i..10 + 4 * i].try_into().unwrap());
        assert_eq!([word(0), word(1), word(2), word(3), word(4)], [3, 3, 7, 32, 32]);
        // first tensor header: rank 5, then (6,3,3,3,3)
        assert_eq!([word(5), word(6), word(7), word(8), word(9), word(10)], [5, 6, 3, 3, 3, 3]);
    }

    #[test]
    fn rejects_corruption() {
        let p = build_model(1, [3, 3, 32, 32], 1).unwrap();
        let bytes = encode(&p);
        let path = Path::new("m");
        assert!(decode(&bytes[..bytes.len() - 2], path).is_err());
        assert!(decode(&[bytes.as_slice(), &[0]].concat(), path).is_err());
        let mut wrong_n = bytes.clone();
        wrong_n[6] = 2;
        assert!(decode(&wrong_n, path).is_err());
        assert!(decode(b"VCNN2\n", path).is_err());
    }
}
