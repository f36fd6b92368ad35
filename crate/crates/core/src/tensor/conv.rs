//! Stride-1, zero "same"-padded 2-D cross-correlation.
//!
//! Every output element is accumulated in `(in_channel, kh, kw)` order and the
//! bias is added last, so results are bit-reproducible on a given platform.
//! The kernels are register-tiled over `OUT_BLOCK` output channels and
//! `LANES` adjacent columns so the compiler can keep the accumulators in
//! vector registers.

use super::Tensor;
use crate::error::{RdhError, Result};

const LANES: usize = 16;
const OUT_BLOCK: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayer {
    kernel: Tensor,
    bias: Vec<f32>,
}

impl ConvLayer {
    pub fn new(kernel: Tensor, bias: Vec<f32>) -> Result<Self> {
        let [out, _, kh, kw] = kernel.shape()[..] else {
            return Err(RdhError::ShapeMismatch(format!(
                "kernel must be (out, in, S, S), got {:?}",
                kernel.shape()
            )));
        };
        if kh != kw || kh % 2 == 0 {
            return Err(RdhError::ShapeMismatch(format!(
                "kernel must be square with odd size, got {kh}x{kw}"
            )));
        }
        if bias.len() != out {
            return Err(RdhError::ShapeMismatch(format!(
                "bias has {} entries for {out} output channels",
                bias.len()
            )));
        }
        Ok(Self { kernel, bias })
    }

    pub fn zeros(out_channels: usize, in_channels: usize, size: usize) -> Result<Self> {
        Self::new(
            Tensor::zeros(vec![out_channels, in_channels, size, size]),
            vec![0.0; out_channels],
        )
    }

    pub fn out_channels(&self) -> usize {
        self.kernel.shape()[0]
    }

    pub fn in_channels(&self) -> usize {
        self.kernel.shape()[1]
    }

    pub fn size(&self) -> usize {
        self.kernel.shape()[2]
    }

    pub fn kernel(&self) -> &Tensor {
        &self.kernel
    }

    pub fn kernel_mut(&mut self) -> &mut Tensor {
        &mut self.kernel
    }

    pub fn bias(&self) -> &[f32] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [f32] {
        &mut self.bias
    }

    /// Kernel and bias storage, borrowed together for optimizer updates.
    pub fn params_mut(&mut self) -> (&mut [f32], &mut [f32]) {
        (self.kernel.data_mut(), &mut self.bias)
    }

    /// Multiply-accumulates per output pixel.
    pub fn macs_per_pixel(&self) -> usize {
        self.out_channels() * self.in_channels() * self.size() * self.size()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvGrads {
    pub input: Option<Tensor>,
    pub kernel: Tensor,
    pub bias: Vec<f32>,
}

pub fn conv2d_forward(input: &Tensor, layer: &ConvLayer) -> Result<Tensor> {
    let (c, h, w) = input.chw()?;
    if c != layer.in_channels() {
        return Err(RdhError::ShapeMismatch(format!(
            "input has {c} channels, layer expects {}",
            layer.in_channels()
        )));
    }
    let mut out = vec![0.0f32; layer.out_channels() * h * w];
    correlate(
        input.data(),
        c,
        h,
        w,
        layer.kernel.data(),
        layer.out_channels(),
        layer.size(),
        Some(&layer.bias),
        &mut out,
    );
    Tensor::new(vec![layer.out_channels(), h, w], out)
}

/// Exact gradients of [`conv2d_forward`] w.r.t. input, kernel and bias.
pub fn conv2d_backward(input: &Tensor, layer: &ConvLayer, grad_out: &Tensor) -> Result<ConvGrads> {
    conv2d_backward_parts(input, layer, grad_out, true)
}

/// As [`conv2d_backward`]; the input gradient is skipped unless `want_input`.
pub fn conv2d_backward_parts(
    input: &Tensor,
    layer: &ConvLayer,
    grad_out: &Tensor,
    want_input: bool,
) -> Result<ConvGrads> {
    let (c, h, w) = input.chw()?;
    let (o, gh, gw) = grad_out.chw()?;
    if c != layer.in_channels() || o != layer.out_channels() || (gh, gw) != (h, w) {
        return Err(RdhError::ShapeMismatch(format!(
            "backward: input {:?}, grad {:?}, kernel {:?}",
            input.shape(),
            grad_out.shape(),
            layer.kernel.shape()
        )));
    }
    let k = layer.size();

    let grad_input = if want_input {
        // d/dx is a correlation of grad_out with the flipped, transposed kernel.
        let kk = k * k;
        let src = layer.kernel.data();
        let mut flipped = vec![0.0f32; c * o * kk];
        for oc in 0..o {
            for ic in 0..c {
                for t in 0..kk {
                    flipped[(ic * o + oc) * kk + (kk - 1 - t)] = src[(oc * c + ic) * kk + t];
                }
            }
        }
        let mut gi = vec![0.0f32; c * h * w];
        correlate(grad_out.data(), o, h, w, &flipped, c, k, None, &mut gi);
        Some(Tensor::new(vec![c, h, w], gi)?)
    } else {
        None
    };

    let kernel = Tensor::new(
        vec![o, c, k, k],
        kernel_gradient(input.data(), c, h, w, grad_out.data(), o, k),
    )?;
    let bias = (0..o).map(|oc| lane_sum(grad_out.plane(oc))).collect();
    Ok(ConvGrads {
        input: grad_input,
        kernel,
        bias,
    })
}

/// Zero-padded copy: `p` columns left, enough on the right for whole lane chunks.
fn pad_columns(
    src: &[f32],
    planes: usize,
    h: usize,
    w: usize,
    p: usize,
    padded_w: usize,
) -> Vec<f32> {
    let mut out = vec![0.0f32; planes * h * padded_w];
    for ch in 0..planes {
        for y in 0..h {
            let s = &src[(ch * h + y) * w..][..w];
            out[(ch * h + y) * padded_w + p..][..w].copy_from_slice(s);
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn correlate(
    input: &[f32],
    c_in: usize,
    h: usize,
    w: usize,
    kernel: &[f32],
    c_out: usize,
    k: usize,
    bias: Option<&[f32]>,
    out: &mut [f32],
) {
    let p = k / 2;
    let chunks = w.div_ceil(LANES);
    let padded_w = chunks * LANES + k - 1;
    let padded = pad_columns(input, c_in, h, w, p, padded_w);
    let mut oc = 0;
    while oc + OUT_BLOCK <= c_out {
        correlate_block::<OUT_BLOCK>(&padded, c_in, h, w, padded_w, kernel, oc, k, bias, out);
        oc += OUT_BLOCK;
    }
    while oc < c_out {
        correlate_block::<1>(&padded, c_in, h, w, padded_w, kernel, oc, k, bias, out);
        oc += 1;
    }
}

#[allow(clippy::too_many_arguments)]
fn correlate_block<const B: usize>(
    padded: &[f32],
    c_in: usize,
    h: usize,
    w: usize,
    padded_w: usize,
    kernel: &[f32],
    first_out: usize,
    k: usize,
    bias: Option<&[f32]>,
    out: &mut [f32],
) {
    let p = k / 2;
    let kk = k * k;
    // Repack so the B weights of one tap are contiguous.
    let mut taps = vec![[0.0f32; B]; c_in * kk];
    for (b, lane) in (0..B).map(|b| (b, first_out + b)) {
        for t in 0..c_in * kk {
            taps[t][b] = kernel[lane * c_in * kk + t];
        }
    }
    let chunks = w.div_ceil(LANES);
    for y in 0..h {
        let row_lo = p.saturating_sub(y);
        let row_hi = (h + p - y).min(k);
        for xc in 0..chunks {
            let x0 = xc * LANES;
            let mut acc = [[0.0f32; LANES]; B];
            for ic in 0..c_in {
                for kh in row_lo..row_hi {
                    let yy = y + kh - p;
                    let row = &padded[(ic * h + yy) * padded_w + x0..];
                    let tap_row = &taps[(ic * k + kh) * k..][..k];
                    for (kw, wts) in tap_row.iter().enumerate() {
                        let src: &[f32; LANES] = row[kw..kw + LANES].try_into().unwrap();
                        for b in 0..B {
                            let wb = wts[b];
                            for l in 0..LANES {
                                acc[b][l] += wb * src[l];
                            }
                        }
                    }
                }
            }
            let valid = LANES.min(w - x0);
            for b in 0..B {
                let oc = first_out + b;
                let bb = bias.map_or(0.0, |bs| bs[oc]);
                let dst = &mut out[(oc * h + y) * w + x0..][..valid];
                for (d, a) in dst.iter_mut().zip(&acc[b][..valid]) {
                    *d = a + bb;
                }
            }
        }
    }
}

fn kernel_gradient(
    input: &[f32],
    c_in: usize,
    h: usize,
    w: usize,
    grad: &[f32],
    c_out: usize,
    k: usize,
) -> Vec<f32> {
    let p = k / 2;
    let kk = k * k;
    let chunks = w.div_ceil(LANES);
    let padded_w = chunks * LANES + k - 1;
    let padded_in = pad_columns(input, c_in, h, w, p, padded_w);
    let grad_w = chunks * LANES;
    let padded_grad = pad_columns(grad, c_out, h, w, 0, grad_w);
    let mut out = vec![0.0f32; c_out * c_in * kk];
    let mut acc = vec![[0.0f32; LANES]; kk];
    for oc in 0..c_out {
        for ic in 0..c_in {
            acc.iter_mut().for_each(|a| *a = [0.0; LANES]);
            for y in 0..h {
                let g_row = &padded_grad[(oc * h + y) * grad_w..][..grad_w];
                let row_lo = p.saturating_sub(y);
                let row_hi = (h + p - y).min(k);
                for kh in row_lo..row_hi {
                    let yy = y + kh - p;
                    let in_row = &padded_in[(ic * h + yy) * padded_w..][..padded_w];
                    for kw in 0..k {
                        let a = &mut acc[kh * k + kw];
                        for xc in 0..chunks {
                            let g: &[f32; LANES] = g_row[xc * LANES..][..LANES].try_into().unwrap();
                            let s: &[f32; LANES] =
                                in_row[xc * LANES + kw..][..LANES].try_into().unwrap();
                            for l in 0..LANES {
                                a[l] += g[l] * s[l];
                            }
                        }
                    }
                }
            }
            for (t, a) in acc.iter().enumerate() {
                out[(oc * c_in + ic) * kk + t] = a.iter().sum();
            }
        }
    }
    out
}

fn lane_sum(values: &[f32]) -> f32 {
    let mut acc = [0.0f32; LANES];
    let mut chunks = values.chunks_exact(LANES);
    for chunk in &mut chunks {
        for l in 0..LANES {
            acc[l] += chunk[l];
        }
    }
    for (l, v) in chunks.remainder().iter().enumerate() {
        acc[l] += v;
    }
    acc.iter().sum()
}
