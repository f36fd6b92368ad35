use super::config::IcnnpConfig;
use crate::complexity::{is_interior, ComplexityMap};
use crate::error::{RdhError, Result};
use crate::image::{GrayImage, Parity, SubImage};
use crate::predictor::PredictorOutput;
use crate::prng::XorShift64Star;
use std::collections::VecDeque;
use std::sync::Mutex;

use crate::tensor::{
    conv2d_backward_parts, conv2d_forward, leaky_relu, leaky_relu_backward, load_weights,
    save_weights, ConvGrads, ConvLayer, Tensor,
};

/// Smallest context the network accepts.
pub const MIN_SIDE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Head {
    Pixel,
    Complexity,
}

/// Parallel multi-scale branches, a residual block, and two output heads that
/// share the extracted features.
///
/// Layer order (also the order in weight files): for every branch its `SxS`
/// conv then its 3x3 conv; the two residual convs; pixel head (2 convs);
/// complexity head (2 convs).
#[derive(Debug, Clone, PartialEq)]
pub struct IcnnpModel {
    config: IcnnpConfig,
    layers: Vec<ConvLayer>,
    memo: InferenceMemo,
}

const MEMO_ENTRIES: usize = 4;

/// Last few full predictions keyed by the exact context pixels.
///
/// An embed/extract roundtrip asks for the same contexts twice (the decoder
/// rebuilds the encoder's inputs), so this halves inference. Entries are
/// exact copies, so results do not depend on hits or misses.
#[derive(Default)]
struct InferenceMemo(Mutex<VecDeque<(GrayImage, PredictorOutput)>>);

impl InferenceMemo {
    fn get(&self, context: &GrayImage) -> Option<PredictorOutput> {
        let mut entries = self.0.lock().unwrap_or_else(|e| e.into_inner());
        let pos = entries.iter().position(|(k, _)| k == context)?;
        let entry = entries.remove(pos)?;
        let out = entry.1.clone();
        entries.push_front(entry);
        Some(out)
    }

    fn put(&self, context: &GrayImage, output: &PredictorOutput) {
        let mut entries = self.0.lock().unwrap_or_else(|e| e.into_inner());
        entries.push_front((context.clone(), output.clone()));
        entries.truncate(MEMO_ENTRIES);
    }

    fn clear(&self) {
        self.0.lock().unwrap_or_else(|e| e.into_inner()).clear();
    }
}

impl Clone for InferenceMemo {
    fn clone(&self) -> Self {
        Self::default()
    }
}

impl PartialEq for InferenceMemo {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl std::fmt::Debug for InferenceMemo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("InferenceMemo")
    }
}

pub(crate) struct FeatureCache {
    input: Tensor,
    branch_pre1: Vec<Tensor>,
    branch_act1: Vec<Tensor>,
    branch_pre2: Vec<Tensor>,
    trunk: Tensor,
    res_pre1: Tensor,
    res_act1: Tensor,
    res_sum: Tensor,
}

pub(crate) struct HeadCache {
    features: Tensor,
    pre1: Tensor,
    act1: Tensor,
}

impl IcnnpModel {
    fn expected_shapes(config: &IcnnpConfig) -> Vec<[usize; 4]> {
        let (cb, t, h) = (
            config.branch_channels,
            config.trunk_channels(),
            config.head_channels,
        );
        let mut shapes = Vec::new();
        for &k in &config.branch_kernels {
            shapes.push([cb, 1, k, k]);
            shapes.push([cb, cb, 3, 3]);
        }
        shapes.push([t, t, 3, 3]);
        shapes.push([t, t, 3, 3]);
        for _ in 0..2 {
            shapes.push([h, t, 3, 3]);
            shapes.push([1, h, 3, 3]);
        }
        shapes
    }

    /// He-uniform kernels, zero biases; the pixel output starts at mid-grey.
    pub fn new_random(config: IcnnpConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = XorShift64Star::new(seed);
        let mut layers = Vec::new();
        for [o, i, k, _] in Self::expected_shapes(&config) {
            let fan_in = (i * k * k) as f32;
            let bound = (6.0 / fan_in).sqrt();
            let data = (0..o * i * k * k)
                .map(|_| (rng.next_f32() * 2.0 - 1.0) * bound)
                .collect();
            layers.push(ConvLayer::new(
                Tensor::new(vec![o, i, k, k], data)?,
                vec![0.0; o],
            )?);
        }
        let mut model = Self {
            config,
            layers,
            memo: InferenceMemo::default(),
        };
        let pix_out = model.pixel_head_range().end - 1;
        model.layers[pix_out].bias_mut()[0] = 0.5;
        Ok(model)
    }

    pub fn from_layers(config: IcnnpConfig, layers: Vec<ConvLayer>) -> Result<Self> {
        config.validate()?;
        let expected = Self::expected_shapes(&config);
        if expected.len() != layers.len() {
            return Err(RdhError::ArchitectureMismatch(format!(
                "expected {} layers, found {}",
                expected.len(),
                layers.len()
            )));
        }
        for (idx, (shape, layer)) in expected.iter().zip(&layers).enumerate() {
            if layer.kernel().shape() != shape {
                return Err(RdhError::ArchitectureMismatch(format!(
                    "layer {idx}: expected {shape:?}, found {:?}",
                    layer.kernel().shape()
                )));
            }
        }
        Ok(Self {
            config,
            layers,
            memo: InferenceMemo::default(),
        })
    }

    /// Recovers the architecture from layer shapes alone.
    pub fn infer_config(layers: &[ConvLayer], leaky_slope: f32) -> Result<IcnnpConfig> {
        if layers.len() < 8 || layers.len() % 2 != 0 {
            return Err(RdhError::ArchitectureMismatch(format!(
                "{} layers cannot form the network",
                layers.len()
            )));
        }
        let branches = (layers.len() - 6) / 2;
        let config = IcnnpConfig {
            branch_kernels: (0..branches).map(|b| layers[2 * b].size()).collect(),
            branch_channels: layers[0].out_channels(),
            head_channels: layers[2 * branches + 2].out_channels(),
            leaky_slope,
            ..IcnnpConfig::default()
        };
        Self::from_layers(config.clone(), layers.to_vec())?;
        Ok(config)
    }

    pub fn from_bytes(bytes: &[u8], leaky_slope: f32) -> Result<Self> {
        let layers = load_weights(bytes)?;
        let config = Self::infer_config(&layers, leaky_slope)?;
        Self::from_layers(config, layers)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        save_weights(&self.layers)
    }

    pub fn config(&self) -> &IcnnpConfig {
        &self.config
    }

    pub fn layers(&self) -> &[ConvLayer] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [ConvLayer] {
        self.memo.clear();
        &mut self.layers
    }

    fn branches(&self) -> usize {
        self.config.branch_kernels.len()
    }

    /// Feature extraction layers (branches and residual block).
    pub fn feature_range(&self) -> std::ops::Range<usize> {
        0..2 * self.branches() + 2
    }

    pub fn pixel_head_range(&self) -> std::ops::Range<usize> {
        let s = 2 * self.branches() + 2;
        s..s + 2
    }

    pub fn complexity_head_range(&self) -> std::ops::Range<usize> {
        let s = 2 * self.branches() + 4;
        s..s + 2
    }

    pub fn head_range(&self, head: Head) -> std::ops::Range<usize> {
        match head {
            Head::Pixel => self.pixel_head_range(),
            Head::Complexity => self.complexity_head_range(),
        }
    }

    /// Multiply-accumulates per pixel for one full forward pass.
    pub fn macs_per_pixel(&self) -> usize {
        self.layers.iter().map(ConvLayer::macs_per_pixel).sum()
    }

    pub(crate) fn input_tensor(&self, context: &GrayImage) -> Tensor {
        let scale = self.config.pixel_scale;
        let data = context.pixels().iter().map(|&v| v as f32 * scale).collect();
        Tensor::new(vec![1, context.rows(), context.cols()], data).expect("shape from image")
    }

    pub(crate) fn features_forward(
        &self,
        input: &Tensor,
        keep: bool,
    ) -> Result<(Tensor, Option<FeatureCache>)> {
        let slope = self.config.leaky_slope;
        let mut branch_pre1 = Vec::new();
        let mut branch_act1 = Vec::new();
        let mut branch_pre2 = Vec::new();
        let mut outs = Vec::new();
        for b in 0..self.branches() {
            let pre1 = conv2d_forward(input, &self.layers[2 * b])?;
            let act1 = leaky_relu(&pre1, slope);
            let pre2 = conv2d_forward(&act1, &self.layers[2 * b + 1])?;
            outs.push(leaky_relu(&pre2, slope));
            if keep {
                branch_pre1.push(pre1);
                branch_act1.push(act1);
                branch_pre2.push(pre2);
            }
        }
        let trunk = Tensor::concat_channels(&outs)?;
        drop(outs);
        let r = 2 * self.branches();
        let res_pre1 = conv2d_forward(&trunk, &self.layers[r])?;
        let res_act1 = leaky_relu(&res_pre1, slope);
        let mut res_sum = conv2d_forward(&res_act1, &self.layers[r + 1])?;
        res_sum.add_assign(&trunk)?;
        let features = leaky_relu(&res_sum, slope);
        features.ensure_finite("feature extraction")?;
        let cache = keep.then(|| FeatureCache {
            input: input.clone(),
            branch_pre1,
            branch_act1,
            branch_pre2,
            trunk,
            res_pre1,
            res_act1,
            res_sum,
        });
        Ok((features, cache))
    }

    pub(crate) fn head_forward(
        &self,
        head: Head,
        features: &Tensor,
        keep: bool,
    ) -> Result<(Tensor, Option<HeadCache>)> {
        let range = self.head_range(head);
        let pre1 = conv2d_forward(features, &self.layers[range.start])?;
        let act1 = leaky_relu(&pre1, self.config.leaky_slope);
        let out = conv2d_forward(&act1, &self.layers[range.start + 1])?;
        out.ensure_finite("head output")?;
        let cache = keep.then(|| HeadCache {
            features: features.clone(),
            pre1,
            act1,
        });
        Ok((out, cache))
    }

    /// Returns gradients for the two head layers and, optionally, the features.
    pub(crate) fn head_backward(
        &self,
        head: Head,
        cache: &HeadCache,
        grad_out: &Tensor,
        want_features: bool,
    ) -> Result<(Vec<ConvGrads>, Option<Tensor>)> {
        let range = self.head_range(head);
        let g2 = conv2d_backward_parts(&cache.act1, &self.layers[range.start + 1], grad_out, true)?;
        let g_act1 = g2.input.as_ref().expect("requested");
        let g_pre1 = leaky_relu_backward(&cache.pre1, g_act1, self.config.leaky_slope)?;
        let mut g1 = conv2d_backward_parts(
            &cache.features,
            &self.layers[range.start],
            &g_pre1,
            want_features,
        )?;
        let g_features = g1.input.take();
        Ok((vec![g1, g2], g_features))
    }

    /// Gradients for every feature-extraction layer, in layer order.
    pub(crate) fn features_backward(
        &self,
        cache: &FeatureCache,
        grad_features: &Tensor,
    ) -> Result<Vec<ConvGrads>> {
        let slope = self.config.leaky_slope;
        let b_count = self.branches();
        let r = 2 * b_count;
        let g_sum = leaky_relu_backward(&cache.res_sum, grad_features, slope)?;
        let gr2 = conv2d_backward_parts(&cache.res_act1, &self.layers[r + 1], &g_sum, true)?;
        let g_res_pre1 = leaky_relu_backward(&cache.res_pre1, gr2.input.as_ref().unwrap(), slope)?;
        let gr1 = conv2d_backward_parts(&cache.trunk, &self.layers[r], &g_res_pre1, true)?;
        let mut g_trunk = g_sum;
        g_trunk.add_assign(gr1.input.as_ref().unwrap())?;

        let mut grads = Vec::with_capacity(r + 2);
        for (b, g_out) in g_trunk.split_channels(b_count)?.into_iter().enumerate() {
            let g_pre2 = leaky_relu_backward(&cache.branch_pre2[b], &g_out, slope)?;
            let gb2 = conv2d_backward_parts(
                &cache.branch_act1[b],
                &self.layers[2 * b + 1],
                &g_pre2,
                true,
            )?;
            let g_pre1 =
                leaky_relu_backward(&cache.branch_pre1[b], gb2.input.as_ref().unwrap(), slope)?;
            let gb1 = conv2d_backward_parts(&cache.input, &self.layers[2 * b], &g_pre1, false)?;
            grads.push(gb1);
            grads.push(gb2);
        }
        grads.push(gr1);
        grads.push(gr2);
        Ok(grads)
    }

    fn check_context(&self, context: &SubImage) -> Result<()> {
        if context.kept() != Parity::Cross {
            return Err(RdhError::ParityMismatch(
                "the network predicts Dot pixels from a Cross-pattern context; rotate first".into(),
            ));
        }
        if context.rows() < MIN_SIDE || context.cols() < MIN_SIDE {
            return Err(RdhError::InvalidDimensions {
                rows: context.rows(),
                cols: context.cols(),
                reason: "network input must be at least 8x8",
            });
        }
        Ok(())
    }

    /// Predicts Dot pixels and their complexity from a Cross-pattern context.
    pub fn predict(&self, context: &SubImage) -> Result<PredictorOutput> {
        self.check_context(context)?;
        if let Some(hit) = self.memo.get(context.image()) {
            return Ok(hit);
        }
        let out = self.predict_with_heads(context, true)?;
        self.memo.put(context.image(), &out);
        Ok(out)
    }

    /// Pixel predictions only; the complexity map is all zeros.
    pub fn predict_pixels(&self, context: &SubImage) -> Result<PredictorOutput> {
        self.check_context(context)?;
        match self.memo.get(context.image()) {
            Some(hit) => {
                let (pixels, cx) = hit.into_parts();
                Ok(PredictorOutput::new(
                    pixels,
                    ComplexityMap::zeros(cx.rows(), cx.cols()),
                    Parity::Dot,
                ))
            }
            None => self.predict_with_heads(context, false),
        }
    }

    fn predict_with_heads(&self, context: &SubImage, complexity: bool) -> Result<PredictorOutput> {
        let (rows, cols) = (context.rows(), context.cols());
        let input = self.input_tensor(context.image());
        let (features, _) = self.features_forward(&input, false)?;
        let (pix, _) = self.head_forward(Head::Pixel, &features, false)?;
        let cx = if complexity {
            Some(self.head_forward(Head::Complexity, &features, false)?.0)
        } else {
            None
        };
        let unscale = 1.0 / self.config.pixel_scale;
        let mut pixels = vec![0u8; rows * cols];
        let mut cmap = ComplexityMap::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if Parity::of(r, c) != Parity::Dot || !is_interior(r, c, rows, cols) {
                    continue;
                }
                let i = r * cols + c;
                pixels[i] = (pix.data()[i] * unscale).round().clamp(0.0, 255.0) as u8;
                if let Some(cx) = &cx {
                    cmap.set(r, c, cx.data()[i].max(0.0) as f64);
                }
            }
        }
        Ok(PredictorOutput::new(
            GrayImage::new(rows, cols, pixels)?,
            cmap,
            Parity::Dot,
        ))
    }
}
