//! WebAssembly bindings behind `www/index.html`.
//!
//! Everything the page does goes through [`Demo`]: it holds one cover image
//! and the predictor chosen in the UI. Errors come back as plain strings so
//! the same methods run unchanged in native tests.

use std::sync::Arc;

use rdh_core::bench::sweep_payload;
use rdh_core::codec::{embed, extract, EmbedOutcome};
use rdh_core::complexity::reference_complexity;
use rdh_core::image::{load_pgm, psnr, GrayImage, Parity, SubImage};
use rdh_core::model::IcnnpModel;
use rdh_core::predictor::{predict_with, KindName, PredictorKind};
use rdh_core::synth::natural_image;
use wasm_bindgen::prelude::*;

type DemoResult<T> = Result<T, String>;

fn text<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Outcome of one embed/extract cycle.
#[wasm_bindgen]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Roundtrip {
    pub payload_bits: u32,
    pub psnr_db: f64,
    pub changed_pixels: u32,
    pub dot_t_p: i32,
    pub dot_t_n: i32,
    pub cross_t_p: i32,
    pub cross_t_n: i32,
    /// Recovered payload equals the embedded one.
    pub payload_ok: bool,
    /// Recovered image equals the cover.
    pub image_ok: bool,
}

#[wasm_bindgen]
pub struct Demo {
    cover: GrayImage,
    model: Option<Arc<IcnnpModel>>,
    kind: KindName,
    marked: Option<GrayImage>,
}

#[wasm_bindgen]
impl Demo {
    /// A deterministic synthetic test picture.
    pub fn synthetic(rows: usize, cols: usize, seed: u64) -> DemoResult<Demo> {
        if rows < 8 || cols < 8 {
            return Err(format!("{rows}x{cols} is too small"));
        }
        Ok(Self::with_cover(natural_image(rows, cols, seed)))
    }

    /// Canvas pixels converted to grey; an odd-by-odd picture loses its last column.
    pub fn from_rgba(rgba: &[u8], width: usize, height: usize) -> DemoResult<Demo> {
        if rgba.len() != width * height * 4 {
            return Err(format!(
                "{} bytes for a {width}x{height} RGBA image",
                rgba.len()
            ));
        }
        let cols = if width % 2 == 1 && height % 2 == 1 {
            width - 1
        } else {
            width
        };
        let grey = GrayImage::from_fn(height, cols, |r, c| {
            let px = &rgba[(r * width + c) * 4..][..3];
            let y = 0.299 * px[0] as f64 + 0.587 * px[1] as f64 + 0.114 * px[2] as f64;
            y.round() as u8
        })
        .map_err(text)?;
        Ok(Self::with_cover(grey))
    }

    pub fn from_pgm(bytes: &[u8]) -> DemoResult<Demo> {
        load_pgm(bytes).map(Self::with_cover).map_err(text)
    }

    pub fn rows(&self) -> usize {
        self.cover.rows()
    }

    pub fn cols(&self) -> usize {
        self.cover.cols()
    }

    pub fn cover_pixels(&self) -> Vec<u8> {
        self.cover.pixels().to_vec()
    }

    /// Marked image from the last roundtrip, empty before the first one.
    pub fn marked_pixels(&self) -> Vec<u8> {
        self.marked
            .as_ref()
            .map(|m| m.pixels().to_vec())
            .unwrap_or_default()
    }

    /// Installs a trained weight file, enabling the CNN predictors.
    pub fn load_weights(&mut self, bytes: &[u8], leaky_slope: f32) -> DemoResult<()> {
        let model = IcnnpModel::from_bytes(bytes, leaky_slope).map_err(text)?;
        self.model = Some(Arc::new(model));
        Ok(())
    }

    pub fn has_weights(&self) -> bool {
        self.model.is_some()
    }

    /// `icnnp`, `cnnp-lv` or `rhombus`.
    pub fn set_predictor(&mut self, name: &str) -> DemoResult<()> {
        let kind: KindName = name.parse().map_err(text)?;
        if kind.needs_weights() && self.model.is_none() {
            return Err(format!("{kind} needs a weight file"));
        }
        self.kind = kind;
        Ok(())
    }

    pub fn predictor(&self) -> String {
        self.kind.to_string()
    }

    /// Two greyscale maps of the Dot pixels, back to back: the reference
    /// complexity computed from the cover itself, then the complexity the
    /// current predictor estimates from the Cross pixels alone.
    pub fn complexity_maps(&self) -> DemoResult<Vec<u8>> {
        let truth = reference_complexity(&self.cover, Parity::Dot).map_err(text)?;
        let context = SubImage::extract(&self.cover, Parity::Cross);
        let estimate = predict_with(&self.kind(), &context).map_err(text)?;
        let mut out = truth.to_display().into_pixels();
        out.extend_from_slice(estimate.complexity().to_display().pixels());
        Ok(out)
    }

    /// Embeds `bits` pseudo-random bits under `key`, extracts them again and
    /// keeps the marked image for display.
    pub fn roundtrip(&mut self, bits: usize, key: u64) -> DemoResult<Roundtrip> {
        let payload = sweep_payload(key, 0, bits);
        let kind = self.kind();
        let out = embed(&self.cover, &payload, key, &kind).map_err(text)?;
        let back = extract(&out.marked, key, &kind).map_err(text)?;
        let report = self.report(&out, back.payload == payload, back.image == self.cover)?;
        self.marked = Some(out.marked);
        Ok(report)
    }

    /// PSNR of the marked image for each capacity; NaN where it does not fit.
    pub fn psnr_curve(&self, capacities: Vec<u32>) -> Vec<f64> {
        let kind = self.kind();
        capacities
            .iter()
            .map(|&bits| {
                let payload = sweep_payload(1, 0, bits as usize);
                embed(&self.cover, &payload, 1, &kind)
                    .and_then(|out| psnr(&self.cover, &out.marked))
                    .unwrap_or(f64::NAN)
            })
            .collect()
    }
}

impl Demo {
    fn with_cover(cover: GrayImage) -> Self {
        Self {
            cover,
            model: None,
            kind: KindName::Rhombus,
            marked: None,
        }
    }

    fn kind(&self) -> PredictorKind {
        self.kind
            .with_model(self.model.clone())
            .unwrap_or(PredictorKind::Rhombus)
    }

    fn report(
        &self,
        out: &EmbedOutcome,
        payload_ok: bool,
        image_ok: bool,
    ) -> DemoResult<Roundtrip> {
        let changed = self
            .cover
            .pixels()
            .iter()
            .zip(out.marked.pixels())
            .filter(|(a, b)| a != b)
            .count();
        Ok(Roundtrip {
            payload_bits: (out.dot.payload_bits + out.cross.payload_bits) as u32,
            psnr_db: psnr(&self.cover, &out.marked).map_err(text)?,
            changed_pixels: changed as u32,
            dot_t_p: out.dot.plan.t_p,
            dot_t_n: out.dot.plan.t_n,
            cross_t_p: out.cross.plan.t_p,
            cross_t_n: out.cross.plan.t_n,
            payload_ok,
            image_ok,
        })
    }
}
