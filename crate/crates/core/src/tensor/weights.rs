//! Weight file layout (all little-endian):
//!
//! ```text
//! "RDHW0001"                      8-byte magic
//! u32 layer_count
//! per layer:
//!   u32 out, u32 in, u32 kh, u32 kw
//!   f32 kernel[out * in * kh * kw]
//!   f32 bias[out]
//! ```

use super::{ConvLayer, Tensor};
use crate::error::{RdhError, Result};

pub const WEIGHTS_MAGIC: &[u8; 8] = b"RDHW0001";

pub fn save_weights(layers: &[ConvLayer]) -> Vec<u8> {
    let mut out = WEIGHTS_MAGIC.to_vec();
    out.extend((layers.len() as u32).to_le_bytes());
    for layer in layers {
        for &d in layer.kernel().shape() {
            out.extend((d as u32).to_le_bytes());
        }
        for v in layer.kernel().data().iter().chain(layer.bias()) {
            out.extend(v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Option<&[u8]> {
        let slice = self.bytes.get(self.pos..self.pos.checked_add(n)?)?;
        self.pos += n;
        Some(slice)
    }

    fn u32(&mut self) -> Option<u32> {
        self.take(4)
            .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
    }

    fn f32s(&mut self, n: usize) -> Option<Vec<f32>> {
        let raw = self.take(n.checked_mul(4)?)?;
        Some(
            raw.chunks_exact(4)
                .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
                .collect(),
        )
    }
}

pub fn load_weights(bytes: &[u8]) -> Result<Vec<ConvLayer>> {
    if bytes.len() < 8 || &bytes[..8] != WEIGHTS_MAGIC {
        return Err(RdhError::BadMagic);
    }
    let mut r = Reader { bytes, pos: 8 };
    let count = r.u32().ok_or(RdhError::TruncatedWeights { layer: 0 })? as usize;
    let mut layers = Vec::with_capacity(count.min(1024));
    for layer in 0..count {
        let truncated = RdhError::TruncatedWeights { layer };
        let mut shape = [0usize; 4];
        for d in &mut shape {
            *d = r.u32().ok_or_else(|| truncated.clone())? as usize;
        }
        let len = shape
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| {
                RdhError::ArchitectureMismatch(format!("layer {layer} shape overflows"))
            })?;
        let kernel = r.f32s(len).ok_or_else(|| truncated.clone())?;
        let bias = r.f32s(shape[0]).ok_or(truncated)?;
        if kernel.iter().chain(&bias).any(|v| !v.is_finite()) {
            return Err(RdhError::NonFinite("weight file"));
        }
        let kernel = Tensor::new(shape.to_vec(), kernel)?;
        layers.push(
            ConvLayer::new(kernel, bias)
                .map_err(|e| RdhError::ArchitectureMismatch(format!("layer {layer}: {e}")))?,
        );
    }
    if r.pos != bytes.len() {
        return Err(RdhError::ArchitectureMismatch(format!(
            "{} trailing bytes after {count} layers",
            bytes.len() - r.pos
        )));
    }
    Ok(layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prng::XorShift64Star;

    fn random_layers(seed: u64) -> Vec<ConvLayer> {
        let mut g = XorShift64Star::new(seed);
        [(4, 1, 3), (2, 4, 5), (1, 2, 1)]
            .iter()
            .map(|&(o, i, k)| {
                let kernel = Tensor::new(
                    vec![o, i, k, k],
                    (0..o * i * k * k).map(|_| g.next_f32() - 0.5).collect(),
                )
                .unwrap();
                ConvLayer::new(kernel, (0..o).map(|_| g.next_f32()).collect()).unwrap()
            })
            .collect()
    }

    #[test]
    fn roundtrip_is_bit_identical() {
        let layers = random_layers(9);
        let bytes = save_weights(&layers);
        let back = load_weights(&bytes).unwrap();
        assert_eq!(save_weights(&back), bytes);
        for (a, b) in layers.iter().zip(&back) {
            let bits = |l: &ConvLayer| -> Vec<u32> {
                l.kernel()
                    .data()
                    .iter()
                    .chain(l.bias())
                    .map(|v| v.to_bits())
                    .collect()
            };
            assert_eq!(bits(a), bits(b));
        }
    }

    #[test]
    fn header_layout() {
        let bytes = save_weights(&random_layers(1)[..1]);
        assert_eq!(&bytes[..8], b"RDHW0001");
        assert_eq!(&bytes[8..12], &1u32.to_le_bytes());
        assert_eq!(
            &bytes[12..28],
            &[4, 0, 0, 0, 1, 0, 0, 0, 3, 0, 0, 0, 3, 0, 0, 0]
        );
        assert_eq!(bytes.len(), 28 + 4 * (36 + 4));
    }

    #[test]
    fn wrong_magic() {
        let mut bytes = save_weights(&random_layers(2));
        bytes[0] = b'X';
        assert_eq!(load_weights(&bytes).unwrap_err(), RdhError::BadMagic);
    }

    #[test]
    fn truncation_names_the_layer() {
        let layers = random_layers(3);
        let full = save_weights(&layers);
        let first_layer_len = 16 + 4 * (36 + 4);
        // Cut into the middle of the second layer's kernel.
        let cut = &full[..12 + first_layer_len + 16 + 20];
        assert_eq!(
            load_weights(cut).unwrap_err(),
            RdhError::TruncatedWeights { layer: 1 }
        );
    }
}
