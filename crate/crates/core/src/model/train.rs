//! Two-stage training.
//!
//! Stage 1 fits the feature extractor and pixel head to the true Dot pixels.
//! Stage 2 freezes both and fits the complexity head to the reference
//! complexity computed on the full image. Each objective is the squared error
//! summed over a tile's supervised positions (in grey levels and complexity
//! units respectively), averaged over tiles, plus `weight_decay * sum(w^2)`
//! over the trainable kernels.
//!
//! Every image contributes its Cross->Dot pair and, when a side is even, the
//! same pair taken from the image rotated a quarter turn (so the network sees
//! the configuration it meets during the second embedding pass). Pairs are
//! cut into `crop x crop` tiles at even offsets so the checkerboard phase is
//! preserved.
//!
//! Minibatch Adam at a fixed learning rate wanders between epochs, so each
//! stage ends with the trainable weights of its lowest-loss epoch.

use super::config::TrainConfig;
use super::network::{Head, IcnnpModel};
use crate::complexity::{is_interior, reference_complexity};
use crate::error::{RdhError, Result};
use crate::image::{rotate90, rotation_direction, GrayImage, Parity, SubImage};
use crate::prng::XorShift64Star;
use crate::tensor::{Adam, AdamConfig, ConvGrads, ConvLayer, ParamGroup, Tensor};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Objective over the whole dataset before the first update.
    pub initial_loss: f64,
    /// Objective over the whole dataset after each epoch.
    pub epoch_losses: Vec<f64>,
    pub steps: u64,
    /// Epoch whose weights were kept; 0 means no epoch beat the initial weights.
    pub best_epoch: usize,
}

impl TrainReport {
    /// Objective of the weights the model ends up with.
    pub fn kept_loss(&self) -> f64 {
        match self.best_epoch {
            0 => self.initial_loss,
            e => self.epoch_losses[e - 1],
        }
    }
}

/// Trainable layers at the best objective seen so far.
struct BestWeights {
    range: std::ops::Range<usize>,
    layers: Vec<ConvLayer>,
    loss: f64,
    epoch: usize,
}

impl BestWeights {
    fn new(model: &IcnnpModel, range: std::ops::Range<usize>, loss: f64) -> Self {
        let layers = model.layers()[range.clone()].to_vec();
        Self {
            range,
            layers,
            loss,
            epoch: 0,
        }
    }

    fn offer(&mut self, model: &IcnnpModel, epoch: usize, loss: f64) {
        if loss < self.loss {
            self.layers
                .clone_from_slice(&model.layers()[self.range.clone()]);
            self.loss = loss;
            self.epoch = epoch;
        }
    }

    fn restore(self, model: &mut IcnnpModel) -> usize {
        model.layers_mut()[self.range].clone_from_slice(&self.layers);
        self.epoch
    }
}

struct Tile {
    context: GrayImage,
    /// Tile-relative indices of supervised positions.
    mask: Vec<usize>,
    pixel_targets: Vec<f32>,
    complexity_targets: Vec<f32>,
}

fn oriented(image: &GrayImage) -> Vec<GrayImage> {
    let mut out = vec![image.clone()];
    if let Ok(dir) = rotation_direction(image.rows(), image.cols()) {
        out.push(rotate90(image, dir));
    }
    out
}

fn tile_origins(len: usize, crop: usize) -> Vec<(usize, usize)> {
    if len <= crop {
        return vec![(0, len)];
    }
    (0..=len - crop).step_by(crop).map(|o| (o, crop)).collect()
}

fn build_tiles(images: &[GrayImage], crop: usize, with_complexity: bool) -> Result<Vec<Tile>> {
    let mut tiles = Vec::new();
    for image in images {
        if image.rows() < 8 || image.cols() < 8 {
            return Err(RdhError::InvalidDimensions {
                rows: image.rows(),
                cols: image.cols(),
                reason: "training images must be at least 8x8",
            });
        }
        for img in oriented(image) {
            let (rows, cols) = (img.rows(), img.cols());
            let context = SubImage::extract(&img, Parity::Cross);
            let reference = if with_complexity {
                Some(reference_complexity(&img, Parity::Dot)?)
            } else {
                None
            };
            for &(top, h) in &tile_origins(rows, crop) {
                for &(left, w) in &tile_origins(cols, crop) {
                    let mut mask = Vec::new();
                    let mut pixel_targets = Vec::new();
                    let mut complexity_targets = Vec::new();
                    for r in 0..h {
                        for c in 0..w {
                            let (gr, gc) = (top + r, left + c);
                            if Parity::of(gr, gc) != Parity::Dot || !is_interior(gr, gc, rows, cols)
                            {
                                continue;
                            }
                            mask.push(r * w + c);
                            pixel_targets.push(img.get(gr, gc) as f32);
                            if let Some(map) = &reference {
                                complexity_targets.push(map.get(gr, gc) as f32);
                            }
                        }
                    }
                    if mask.is_empty() {
                        continue;
                    }
                    tiles.push(Tile {
                        context: context.image().crop(top, left, h, w)?,
                        mask,
                        pixel_targets,
                        complexity_targets,
                    });
                }
            }
        }
    }
    if tiles.is_empty() {
        return Err(RdhError::EmptyDataset);
    }
    Ok(tiles)
}

fn l2_penalty(model: &IcnnpModel, range: std::ops::Range<usize>) -> f64 {
    model.layers()[range]
        .iter()
        .flat_map(|l| l.kernel().data())
        .map(|&w| (w as f64) * (w as f64))
        .sum()
}

/// Squared error of `out * unit` against the targets at masked positions, and
/// its gradient with respect to `out`, divided by `normalizer`.
fn masked_residual(
    out: &Tensor,
    mask: &[usize],
    targets: &[f32],
    unit: f32,
    normalizer: f32,
) -> (f64, Tensor) {
    let mut grad = Tensor::zeros(out.shape().to_vec());
    let mut sse = 0.0f64;
    for (&i, &t) in mask.iter().zip(targets) {
        let d = out.data()[i] * unit - t;
        sse += (d as f64) * (d as f64);
        grad.data_mut()[i] = 2.0 * d * unit / normalizer;
    }
    (sse, grad)
}

struct GradAccumulator {
    kernels: Vec<Vec<f32>>,
    biases: Vec<Vec<f32>>,
}

impl GradAccumulator {
    fn new(model: &IcnnpModel, range: std::ops::Range<usize>) -> Self {
        let layers = &model.layers()[range];
        Self {
            kernels: layers.iter().map(|l| vec![0.0; l.kernel().len()]).collect(),
            biases: layers.iter().map(|l| vec![0.0; l.bias().len()]).collect(),
        }
    }

    fn reset(&mut self) {
        self.kernels
            .iter_mut()
            .chain(&mut self.biases)
            .for_each(|v| v.fill(0.0));
    }

    fn add(&mut self, offset: usize, grads: &[ConvGrads]) {
        for (j, g) in grads.iter().enumerate() {
            for (a, b) in self.kernels[offset + j].iter_mut().zip(g.kernel.data()) {
                *a += b;
            }
            for (a, b) in self.biases[offset + j].iter_mut().zip(&g.bias) {
                *a += b;
            }
        }
    }

    fn apply(
        &self,
        adam: &mut Adam,
        model: &mut IcnnpModel,
        range: std::ops::Range<usize>,
    ) -> Result<()> {
        let mut groups = Vec::new();
        for (j, layer) in model.layers_mut()[range].iter_mut().enumerate() {
            let (kernel, bias) = layer.params_mut();
            groups.push(ParamGroup {
                values: kernel,
                grads: &self.kernels[j],
                decay: true,
            });
            groups.push(ParamGroup {
                values: bias,
                grads: &self.biases[j],
                decay: false,
            });
        }
        adam.step(&mut groups)
    }
}

fn check_loss(epoch: usize, loss: f64) -> Result<f64> {
    if loss.is_finite() {
        Ok(loss)
    } else {
        Err(RdhError::Diverged { epoch, loss })
    }
}

fn adam_for(cfg: &TrainConfig) -> Adam {
    Adam::new(AdamConfig {
        lr: cfg.lr,
        weight_decay: cfg.weight_decay,
        ..AdamConfig::default()
    })
}

fn map_divergence(epoch: usize) -> impl Fn(RdhError) -> RdhError {
    move |e| match e {
        RdhError::NonFinite(_) => RdhError::Diverged {
            epoch,
            loss: f64::NAN,
        },
        other => other,
    }
}

fn batches(order: &[usize], size: usize) -> impl Iterator<Item = &[usize]> {
    order.chunks(size)
}

/// Trains feature extraction and the pixel head.
pub fn train_stage1(
    model: &mut IcnnpModel,
    images: &[GrayImage],
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(usize, f64),
) -> Result<TrainReport> {
    cfg.validate()?;
    if images.is_empty() {
        return Err(RdhError::EmptyDataset);
    }
    let unit = 1.0 / model.config().pixel_scale;
    let tiles = build_tiles(images, cfg.crop, false)?;
    let trainable = model.feature_range().start..model.pixel_head_range().end;
    let head_offset = model.pixel_head_range().start;

    let evaluate = |model: &IcnnpModel| -> Result<f64> {
        let mut sse = 0.0;
        for t in &tiles {
            let (features, _) = model.features_forward(&model.input_tensor(&t.context), false)?;
            let (out, _) = model.head_forward(Head::Pixel, &features, false)?;
            sse += masked_residual(&out, &t.mask, &t.pixel_targets, unit, 1.0).0;
        }
        Ok(sse / tiles.len() as f64
            + cfg.weight_decay as f64 * l2_penalty(model, trainable.clone()))
    };

    let initial_loss = check_loss(0, evaluate(model).map_err(map_divergence(0))?)?;
    let mut best = BestWeights::new(model, trainable.clone(), initial_loss);
    let mut rng = XorShift64Star::new(cfg.seed);
    let mut adam = adam_for(cfg);
    let mut acc = GradAccumulator::new(model, trainable.clone());
    let mut order: Vec<usize> = (0..tiles.len()).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    for epoch in 1..=cfg.epochs {
        rng.shuffle(&mut order);
        for batch in batches(&order, cfg.batch) {
            acc.reset();
            for &i in batch {
                let t = &tiles[i];
                let (features, fcache) = model
                    .features_forward(&model.input_tensor(&t.context), true)
                    .map_err(map_divergence(epoch))?;
                let (out, hcache) = model
                    .head_forward(Head::Pixel, &features, true)
                    .map_err(map_divergence(epoch))?;
                let (_, grad) =
                    masked_residual(&out, &t.mask, &t.pixel_targets, unit, batch.len() as f32);
                let (head_grads, g_features) =
                    model.head_backward(Head::Pixel, hcache.as_ref().unwrap(), &grad, true)?;
                let feature_grads = model
                    .features_backward(fcache.as_ref().unwrap(), g_features.as_ref().unwrap())?;
                acc.add(0, &feature_grads);
                acc.add(head_offset - trainable.start, &head_grads);
            }
            acc.apply(&mut adam, model, trainable.clone())
                .map_err(map_divergence(epoch))?;
        }
        let loss = check_loss(epoch, evaluate(model).map_err(map_divergence(epoch))?)?;
        on_epoch(epoch, loss);
        epoch_losses.push(loss);
        best.offer(model, epoch, loss);
    }
    Ok(TrainReport {
        initial_loss,
        epoch_losses,
        steps: adam.steps_taken(),
        best_epoch: best.restore(model),
    })
}

/// Trains only the complexity head on frozen features.
pub fn train_stage2(
    model: &mut IcnnpModel,
    images: &[GrayImage],
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(usize, f64),
) -> Result<TrainReport> {
    cfg.validate()?;
    if images.is_empty() {
        return Err(RdhError::EmptyDataset);
    }
    let tiles = build_tiles(images, cfg.crop, true)?;
    let trainable = model.complexity_head_range();
    // Frozen upstream: features are computed once.
    let features: Vec<Tensor> = tiles
        .iter()
        .map(|t| {
            model
                .features_forward(&model.input_tensor(&t.context), false)
                .map(|f| f.0)
        })
        .collect::<Result<_>>()
        .map_err(map_divergence(0))?;

    let evaluate = |model: &IcnnpModel| -> Result<f64> {
        let mut sse = 0.0;
        for (t, f) in tiles.iter().zip(&features) {
            let (out, _) = model.head_forward(Head::Complexity, f, false)?;
            sse += masked_residual(&out, &t.mask, &t.complexity_targets, 1.0, 1.0).0;
        }
        Ok(sse / tiles.len() as f64
            + cfg.weight_decay as f64 * l2_penalty(model, trainable.clone()))
    };

    let initial_loss = check_loss(0, evaluate(model).map_err(map_divergence(0))?)?;
    let mut best = BestWeights::new(model, trainable.clone(), initial_loss);
    let mut rng = XorShift64Star::new(cfg.seed);
    let mut adam = adam_for(cfg);
    let mut acc = GradAccumulator::new(model, trainable.clone());
    let mut order: Vec<usize> = (0..tiles.len()).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    for epoch in 1..=cfg.epochs {
        rng.shuffle(&mut order);
        for batch in batches(&order, cfg.batch) {
            acc.reset();
            for &i in batch {
                let t = &tiles[i];
                let (out, cache) = model
                    .head_forward(Head::Complexity, &features[i], true)
                    .map_err(map_divergence(epoch))?;
                let (_, grad) = masked_residual(
                    &out,
                    &t.mask,
                    &t.complexity_targets,
                    1.0,
                    batch.len() as f32,
                );
                let (grads, _) =
                    model.head_backward(Head::Complexity, cache.as_ref().unwrap(), &grad, false)?;
                acc.add(0, &grads);
            }
            acc.apply(&mut adam, model, trainable.clone())
                .map_err(map_divergence(epoch))?;
        }
        let loss = check_loss(epoch, evaluate(model).map_err(map_divergence(epoch))?)?;
        on_epoch(epoch, loss);
        epoch_losses.push(loss);
        best.offer(model, epoch, loss);
    }
    Ok(TrainReport {
        initial_loss,
        epoch_losses,
        steps: adam.steps_taken(),
        best_epoch: best.restore(model),
    })
}

/// Stage-2 objective of the current weights over `images`, without training.
pub fn complexity_objective(
    model: &IcnnpModel,
    images: &[GrayImage],
    cfg: &TrainConfig,
) -> Result<f64> {
    let tiles = build_tiles(images, cfg.crop, true)?;
    let mut sse = 0.0;
    for t in &tiles {
        let (f, _) = model.features_forward(&model.input_tensor(&t.context), false)?;
        let (out, _) = model.head_forward(Head::Complexity, &f, false)?;
        sse += masked_residual(&out, &t.mask, &t.complexity_targets, 1.0, 1.0).0;
    }
    Ok(sse / tiles.len() as f64
        + cfg.weight_decay as f64 * l2_penalty(model, model.complexity_head_range()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::IcnnpConfig;

    fn tiny() -> IcnnpConfig {
        IcnnpConfig {
            branch_kernels: vec![3, 5],
            branch_channels: 3,
            head_channels: 4,
            ..IcnnpConfig::default()
        }
    }

    fn gradient_images(n: usize, side: usize) -> Vec<GrayImage> {
        (0..n)
            .map(|k| {
                GrayImage::from_fn(side, side, |r, c| {
                    (40.0 + 2.0 * r as f64 + (1.0 + k as f64 * 0.3) * c as f64) as u8
                })
                .unwrap()
            })
            .collect()
    }

    fn quick(epochs: usize, weight_decay: f32) -> TrainConfig {
        TrainConfig {
            epochs,
            weight_decay,
            crop: 16,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn tiles_keep_dot_phase_and_use_both_orientations() {
        let imgs = gradient_images(1, 32);
        let tiles = build_tiles(&imgs, 16, true).unwrap();
        assert_eq!(tiles.len(), 8);
        for t in &tiles {
            for &i in &t.mask {
                let (r, c) = (i / 16, i % 16);
                assert_eq!(Parity::of(r, c), Parity::Dot);
                assert_eq!(t.context.pixels()[i], 0);
            }
        }
    }

    #[test]
    fn empty_dataset_is_rejected() {
        let mut m = IcnnpModel::new_random(tiny(), 1).unwrap();
        assert_eq!(
            train_stage1(&mut m, &[], &quick(1, 0.0), |_, _| {}).unwrap_err(),
            RdhError::EmptyDataset
        );
        assert_eq!(
            train_stage2(&mut m, &[], &quick(1, 0.0), |_, _| {}).unwrap_err(),
            RdhError::EmptyDataset
        );
    }

    #[test]
    fn stage1_reduces_loss_on_smooth_images() {
        let mut m = IcnnpModel::new_random(tiny(), 2).unwrap();
        let report =
            train_stage1(&mut m, &gradient_images(8, 32), &quick(2, 1e-3), |_, _| {}).unwrap();
        assert!(report.epoch_losses[0] < report.initial_loss, "{report:?}");
    }

    #[test]
    fn stage1_fits_constant_images() {
        let imgs: Vec<GrayImage> = (0..4)
            .map(|k| GrayImage::filled(16, 16, 60 + 30 * k as u8).unwrap())
            .collect();
        let mut m = IcnnpModel::new_random(tiny(), 3).unwrap();
        let report = train_stage1(&mut m, &imgs, &quick(40, 0.0), |_, _| {}).unwrap();
        let last = *report.epoch_losses.last().unwrap();
        assert!(last < 0.05 * report.initial_loss, "{report:?}");
    }

    #[test]
    fn stage2_freezes_upstream_layers() {
        let mut m = IcnnpModel::new_random(tiny(), 4).unwrap();
        let before = m.clone();
        let imgs = gradient_images(4, 32);
        train_stage2(&mut m, &imgs, &quick(1, 1e-3), |_, _| {}).unwrap();
        let frozen = before.feature_range().start..before.pixel_head_range().end;
        for i in frozen {
            let bits = |l: &crate::tensor::ConvLayer| -> Vec<u32> {
                l.kernel()
                    .data()
                    .iter()
                    .chain(l.bias())
                    .map(|v| v.to_bits())
                    .collect()
            };
            assert_eq!(bits(&before.layers()[i]), bits(&m.layers()[i]), "layer {i}");
        }
        assert_ne!(
            before.layers()[m.complexity_head_range()],
            m.layers()[m.complexity_head_range()]
        );
    }

    #[test]
    fn lowest_loss_weights_are_kept() {
        let mut m = IcnnpModel::new_random(tiny(), 6).unwrap();
        let imgs = gradient_images(4, 32);
        // A large step makes later epochs overshoot.
        let cfg = TrainConfig {
            lr: 3e-2,
            ..quick(6, 1e-3)
        };
        let report = train_stage2(&mut m, &imgs, &cfg, |_, _| {}).unwrap();
        let all: Vec<f64> = std::iter::once(report.initial_loss)
            .chain(report.epoch_losses.iter().copied())
            .collect();
        let min = all.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(report.kept_loss(), min);
        assert_eq!(all[report.best_epoch], min);
        let now = complexity_objective(&m, &imgs, &cfg).unwrap();
        assert!((now - min).abs() <= 1e-9 * min.max(1.0), "{now} vs {min}");
    }

    #[test]
    fn perfect_fit_leaves_only_the_penalty() {
        // Constant images have zero reference complexity; a zero output layer fits exactly.
        let imgs: Vec<GrayImage> = (0..2)
            .map(|_| GrayImage::filled(16, 16, 90).unwrap())
            .collect();
        let mut m = IcnnpModel::new_random(tiny(), 5).unwrap();
        let out_layer = m.complexity_head_range().end - 1;
        let (k, b) = m.layers_mut()[out_layer].params_mut();
        k.fill(0.0);
        b.fill(0.0);
        let cfg = quick(1, 1e-3);
        let penalty = cfg.weight_decay as f64 * l2_penalty(&m, m.complexity_head_range());
        let loss = complexity_objective(&m, &imgs, &cfg).unwrap();
        assert!(penalty > 0.0);
        assert!((loss - penalty).abs() <= 1e-12 * penalty.max(1.0));
    }

    #[test]
    fn training_is_deterministic() {
        let imgs = gradient_images(4, 32);
        let run = || {
            let mut m = IcnnpModel::new_random(tiny(), 6).unwrap();
            train_stage1(&mut m, &imgs, &quick(1, 1e-3), |_, _| {}).unwrap();
            train_stage2(&mut m, &imgs, &quick(1, 1e-3), |_, _| {}).unwrap();
            m.to_bytes()
        };
        assert_eq!(run(), run());
    }
}
