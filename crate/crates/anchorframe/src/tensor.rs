//! `AFT1` tensor files: magic, little-endian `u32` rank and dims, then `f64` payload.

use std::fs;
use std::path::Path;

use anchorframe_core::scoring::Tensor;

use crate::error::{AppError, Result};

const MAGIC: &[u8; 4] = b"AFT1";

pub fn encode_tensor(t: &Tensor) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 4 * t.shape().len() + 8 * t.data().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(t.shape().len() as u32).to_le_bytes());
    for &d in t.shape() {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for v in t.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_tensor(bytes: &[u8]) -> Result<Tensor> {
    let bad = |m: String| AppError::Usage(format!("tensor file: {m}"));
    let mut pos = 0usize;
    let mut take = |n: usize| -> Result<&[u8]> {
        let chunk = bytes.get(pos..pos + n).ok_or_else(|| bad(format!("truncated at byte {pos}, wanted {n} more")))?;
        pos += n;
        Ok(chunk)
    };
    if take(4)? != MAGIC {
        return Err(bad("missing AFT1 magic".into()));
    }
    let u32_at = |b: &[u8]| u32::from_le_bytes(b.try_into().unwrap()) as usize;
    let rank = u32_at(take(4)?);
    let shape = (0..rank).map(|_| take(4).map(u32_at)).collect::<Result<Vec<_>>>()?;
    let count = shape
        .iter()
        .try_fold(1usize, |a, &d| a.checked_mul(d))
        .ok_or_else(|| bad(format!("shape {shape:?} overflows")))?;
    let payload = take(count.checked_mul(8).ok_or_else(|| bad("payload overflows".into()))?)?;
    let data = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    if pos != bytes.len() {
        return Err(bad(format!("{} trailing bytes", bytes.len() - pos)));
    }
    Ok(Tensor::new(shape, data)?)
}

pub fn read_tensor(path: &Path) -> Result<Tensor> {
    let bytes = fs::read(path).map_err(|e| AppError::io(path, e))?;
    decode_tensor(&bytes).map_err(|e| AppError::Usage(format!("{}: {e}", path.display())))
}

pub fn write_tensor(path: &Path, t: &Tensor) -> Result<()> {
    fs::write(path, encode_tensor(t)).map_err(|e| AppError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn layout() {
        let t = Tensor::new(vec![1, 2], vec![1.0, -0.5]).unwrap();
        let b = encode_tensor(&t);
        assert_eq!(&b[..4], b"AFT1");
        assert_eq!(&b[4..16], &[2, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0]);
        assert_eq!(&b[16..24], &1.0f64.to_le_bytes());
        assert_eq!(b.len(), 32);
    }

    #[test]
    fn rejects_malformed() {
        assert!(decode_tensor(b"AFT2\0\0\0\0").is_err());
        assert!(decode_tensor(b"AFT1\x01\0\0\0\x02\0\0\0").is_err());
        let mut ok = encode_tensor(&Tensor::new(vec![1], vec![3.0]).unwrap());
        ok.push(0);
        assert!(decode_tensor(&ok).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(data in prop::collection::vec(any::<f64>(), 0..40)) {
            let t = Tensor::new(vec![data.len()], data).unwrap();
            let back = decode_tensor(&encode_tensor(&t)).unwrap();
            prop_assert_eq!(back.shape(), t.shape());
            for (a, b) in back.data().iter().zip(t.data()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
