//! Dense f32 tensors and the handful of layers the predictor needs.

mod adam;
mod conv;
mod leaky;
mod weights;

pub use adam::{Adam, AdamConfig, ParamGroup};
pub use conv::{conv2d_backward, conv2d_backward_parts, conv2d_forward, ConvGrads, ConvLayer};
pub use leaky::{leaky_relu, leaky_relu_backward, leaky_relu_inplace};
pub use weights::{load_weights, save_weights, WEIGHTS_MAGIC};

use crate::error::{RdhError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f32>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f32>) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if expected != data.len() {
            return Err(RdhError::ShapeMismatch(format!(
                "shape {shape:?} needs {expected} values, got {}",
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        Self {
            shape,
            data: vec![0.0; len],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// `(channels, height, width)` of a feature map.
    pub fn chw(&self) -> Result<(usize, usize, usize)> {
        match self.shape[..] {
            [c, h, w] => Ok((c, h, w)),
            _ => Err(RdhError::ShapeMismatch(format!(
                "expected (C, H, W), got {:?}",
                self.shape
            ))),
        }
    }

    pub fn plane(&self, channel: usize) -> &[f32] {
        let hw = self.shape[1] * self.shape[2];
        &self.data[channel * hw..(channel + 1) * hw]
    }

    pub fn ensure_finite(&self, what: &'static str) -> Result<()> {
        if self.data.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(RdhError::NonFinite(what))
        }
    }

    /// Elementwise `self += other`.
    pub fn add_assign(&mut self, other: &Tensor) -> Result<()> {
        if self.shape != other.shape {
            return Err(RdhError::ShapeMismatch(format!(
                "{:?} + {:?}",
                self.shape, other.shape
            )));
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(())
    }

    /// Stacks `(C_k, H, W)` maps along the channel axis.
    pub fn concat_channels(parts: &[Tensor]) -> Result<Tensor> {
        let (_, h, w) = parts
            .first()
            .ok_or_else(|| RdhError::ShapeMismatch("nothing to concatenate".into()))?
            .chw()?;
        let mut channels = 0;
        let mut data = Vec::new();
        for p in parts {
            let (c, ph, pw) = p.chw()?;
            if (ph, pw) != (h, w) {
                return Err(RdhError::ShapeMismatch("concat spatial mismatch".into()));
            }
            channels += c;
            data.extend_from_slice(&p.data);
        }
        Tensor::new(vec![channels, h, w], data)
    }

    /// Inverse of [`Tensor::concat_channels`] for equal-width parts.
    pub fn split_channels(&self, parts: usize) -> Result<Vec<Tensor>> {
        let (c, h, w) = self.chw()?;
        if parts == 0 || c % parts != 0 {
            return Err(RdhError::ShapeMismatch(format!(
                "cannot split {c} channels into {parts}"
            )));
        }
        let each = c / parts;
        Ok(self
            .data
            .chunks(each * h * w)
            .map(|chunk| Tensor {
                shape: vec![each, h, w],
                data: chunk.to_vec(),
            })
            .collect())
    }
}
