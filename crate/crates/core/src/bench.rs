//! Capacity sweeps and predictor evaluation, with their CSV formats.

use std::fmt::Write as _;
use std::time::Instant;

use crate::codec::{embed_with, extract, CodecOptions, EmbedOutcome};
use crate::complexity::{is_interior, reference_complexity};
use crate::error::{RdhError, Result};
use crate::image::{psnr, GrayImage, Parity, SubImage};
use crate::predictor::{predict_with, KindName, PredictorKind};
use crate::prng::XorShift64Star;

pub const SWEEP_HEADER: &str = "image,kind,capacity_bits,psnr_db,t_p,t_n,selected_count,elapsed_ms";
pub const EVAL_HEADER: &str = "image,kind,pixel_mae,pixel_mse,cx_mse";

/// Label used for the per-(kind, capacity) mean rows of a sweep.
pub const MEAN_LABEL: &str = "MEAN";

#[derive(Debug, Clone, PartialEq)]
pub struct NamedImage {
    pub name: String,
    pub image: GrayImage,
}

impl NamedImage {
    pub fn new(name: impl Into<String>, image: GrayImage) -> Self {
        Self {
            name: name.into(),
            image,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub capacities: Vec<usize>,
    /// Seeds the random payloads.
    pub seed: u64,
    pub key: u64,
    /// Record wall-clock time per row (makes the CSV non-reproducible).
    pub timing: bool,
    pub options: CodecOptions,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            capacities: (1..=10).map(|k| k * 10_000).collect(),
            seed: 1,
            key: 1,
            timing: false,
            options: CodecOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub image: String,
    pub kind: KindName,
    pub capacity_bits: usize,
    pub psnr_db: f64,
    /// Thresholds of the Dot and Cross passes.
    pub t_p: (i32, i32),
    pub t_n: (i32, i32),
    /// Pixels modified by both passes together.
    pub selected_count: usize,
    pub elapsed_ms: Option<u128>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

fn fmt_db(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.4}")
    } else {
        "inf".into()
    }
}

impl SweepReport {
    /// Mean PSNR per (kind, capacity), in first-seen order.
    pub fn means(&self) -> Vec<(KindName, usize, f64)> {
        let mut keys: Vec<(KindName, usize)> = Vec::new();
        for r in &self.rows {
            if !keys.contains(&(r.kind, r.capacity_bits)) {
                keys.push((r.kind, r.capacity_bits));
            }
        }
        keys.into_iter()
            .map(|(kind, cap)| {
                let vals: Vec<f64> = self
                    .rows
                    .iter()
                    .filter(|r| r.kind == kind && r.capacity_bits == cap)
                    .map(|r| r.psnr_db)
                    .collect();
                (kind, cap, vals.iter().sum::<f64>() / vals.len() as f64)
            })
            .collect()
    }

    pub fn mean(&self, kind: KindName, capacity: usize) -> Option<f64> {
        self.means()
            .into_iter()
            .find(|&(k, c, _)| k == kind && c == capacity)
            .map(|(_, _, m)| m)
    }

    /// (image, kind, capacity) triples whose PSNR exceeds the one at the previous capacity.
    pub fn monotonicity_violations(&self) -> Vec<(String, KindName, usize)> {
        let mut out = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            let prev = self.rows[..i]
                .iter()
                .filter(|p| {
                    p.image == r.image && p.kind == r.kind && p.capacity_bits < r.capacity_bits
                })
                .max_by_key(|p| p.capacity_bits);
            if prev.is_some_and(|p| r.psnr_db > p.psnr_db) {
                out.push((r.image.clone(), r.kind, r.capacity_bits));
            }
        }
        out
    }

    /// Data rows followed by one mean row per (kind, capacity).
    pub fn to_csv(&self) -> String {
        let mut s = String::from(SWEEP_HEADER);
        s.push('\n');
        for r in &self.rows {
            let elapsed = r.elapsed_ms.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{},{},{},{}/{},{}/{},{},{}",
                r.image,
                r.kind,
                r.capacity_bits,
                fmt_db(r.psnr_db),
                r.t_p.0,
                r.t_p.1,
                r.t_n.0,
                r.t_n.1,
                r.selected_count,
                elapsed
            );
        }
        for (kind, cap, mean) in self.means() {
            let _ = writeln!(s, "{MEAN_LABEL},{kind},{cap},{},,,,", fmt_db(mean));
        }
        s
    }
}

/// Payload for one sweep image: a prefix of a per-image stream, so larger
/// capacities extend smaller ones.
pub fn sweep_payload(seed: u64, image_index: usize, bits: usize) -> Vec<bool> {
    let stream_seed = seed ^ (image_index as u64 + 1).wrapping_mul(0xA24B_AED4_963E_E407);
    XorShift64Star::new(stream_seed).bits(bits)
}

/// Embeds, extracts and verifies one payload; the outcome is only returned
/// when cover and payload come back bit-exact.
pub fn verified_embed(
    cover: &GrayImage,
    payload: &[bool],
    key: u64,
    kind: &PredictorKind,
    options: CodecOptions,
) -> Result<EmbedOutcome> {
    let out = embed_with(cover, payload, key, kind, options)?;
    let back = extract(&out.marked, key, kind)?;
    if back.image != *cover {
        return Err(RdhError::Inconsistent(
            "recovered image differs from the cover".into(),
        ));
    }
    if back.payload != payload {
        return Err(RdhError::Inconsistent("recovered payload differs".into()));
    }
    Ok(out)
}

/// Rows ordered by image, then kind, then capacity.
pub fn run_sweep(
    images: &[NamedImage],
    kinds: &[PredictorKind],
    config: &SweepConfig,
    mut progress: impl FnMut(&SweepRow),
) -> Result<SweepReport> {
    let mut report = SweepReport::default();
    let longest = config.capacities.iter().copied().max().unwrap_or(0);
    for (idx, named) in images.iter().enumerate() {
        let stream = sweep_payload(config.seed, idx, longest);
        for kind in kinds {
            for &cap in &config.capacities {
                let start = Instant::now();
                let out = verified_embed(
                    &named.image,
                    &stream[..cap],
                    config.key,
                    kind,
                    config.options,
                )?;
                let row = SweepRow {
                    image: named.name.clone(),
                    kind: kind.name(),
                    capacity_bits: cap,
                    psnr_db: psnr(&named.image, &out.marked)?,
                    t_p: (out.dot.plan.t_p, out.cross.plan.t_p),
                    t_n: (out.dot.plan.t_n, out.cross.plan.t_n),
                    selected_count: out.dot.plan.selected_count + out.cross.plan.selected_count,
                    elapsed_ms: config.timing.then(|| start.elapsed().as_millis()),
                };
                progress(&row);
                report.rows.push(row);
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub image: String,
    pub kind: KindName,
    pub pixel_mae: f64,
    pub pixel_mse: f64,
    pub cx_mse: f64,
}

/// Dot-from-Cross prediction quality on interior positions of each image.
pub fn predict_eval(images: &[NamedImage], kinds: &[PredictorKind]) -> Result<Vec<EvalRow>> {
    let mut rows = Vec::new();
    for named in images {
        let img = &named.image;
        let context = SubImage::extract(img, Parity::Cross);
        let reference = reference_complexity(img, Parity::Dot)?;
        for kind in kinds {
            let out = predict_with(kind, &context)?;
            let (mut abs, mut sq, mut cx, mut n) = (0.0, 0.0, 0.0, 0usize);
            for r in 0..img.rows() {
                for c in 0..img.cols() {
                    if Parity::of(r, c) != Parity::Dot || !is_interior(r, c, img.rows(), img.cols())
                    {
                        continue;
                    }
                    let d = img.get(r, c) as f64 - out.pixels().get(r, c) as f64;
                    abs += d.abs();
                    sq += d * d;
                    let dc = out.complexity().get(r, c) - reference.get(r, c);
                    cx += dc * dc;
                    n += 1;
                }
            }
            let n = n.max(1) as f64;
            rows.push(EvalRow {
                image: named.name.clone(),
                kind: kind.name(),
                pixel_mae: abs / n,
                pixel_mse: sq / n,
                cx_mse: cx / n,
            });
        }
    }
    Ok(rows)
}

pub fn eval_csv(rows: &[EvalRow]) -> String {
    let mut s = String::from(EVAL_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{:.6},{:.6},{:.6}",
            r.image, r.kind, r.pixel_mae, r.pixel_mse, r.cx_mse
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::natural_image;

    fn images(n: usize) -> Vec<NamedImage> {
        (0..n)
            .map(|k| NamedImage::new(format!("img{k}"), natural_image(128, 128, k as u64)))
            .collect()
    }

    #[test]
    fn sweep_rows_and_means() {
        let cfg = SweepConfig {
            capacities: vec![500, 1000, 1500],
            ..SweepConfig::default()
        };
        let report = run_sweep(&images(2), &[PredictorKind::Rhombus], &cfg, |_| {}).unwrap();
        assert_eq!(report.rows.len(), 6);
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], SWEEP_HEADER);
        assert_eq!(lines.len(), 1 + 6 + 3);
        assert!(lines[7].starts_with("MEAN,rhombus,500,"));
        assert!(report.monotonicity_violations().is_empty(), "{csv}");
        let m = report.mean(KindName::Rhombus, 1000).unwrap();
        assert!((m - (report.rows[1].psnr_db + report.rows[4].psnr_db) / 2.0).abs() < 1e-12);
        assert_eq!(
            csv,
            run_sweep(&images(2), &[PredictorKind::Rhombus], &cfg, |_| {})
                .unwrap()
                .to_csv()
        );
    }

    #[test]
    fn violations_are_detected() {
        let row = |cap, psnr_db| SweepRow {
            image: "a".into(),
            kind: KindName::Rhombus,
            capacity_bits: cap,
            psnr_db,
            t_p: (0, 0),
            t_n: (-1, -1),
            selected_count: 0,
            elapsed_ms: None,
        };
        let report = SweepReport {
            rows: vec![row(10, 50.0), row(20, 49.0), row(30, 49.5)],
        };
        assert_eq!(
            report.monotonicity_violations(),
            vec![("a".to_string(), KindName::Rhombus, 30)]
        );
    }

    #[test]
    fn payload_prefixes_are_shared() {
        assert_eq!(sweep_payload(3, 1, 100)[..40], sweep_payload(3, 1, 40)[..]);
        assert_ne!(sweep_payload(3, 1, 64), sweep_payload(3, 2, 64));
    }

    #[test]
    fn rhombus_is_exact_on_constant_images() {
        let flat = vec![NamedImage::new(
            "flat",
            GrayImage::filled(16, 16, 77).unwrap(),
        )];
        let rows = predict_eval(&flat, &[PredictorKind::Rhombus]).unwrap();
        assert_eq!(rows[0].pixel_mae, 0.0);
        assert_eq!(rows[0].cx_mse, 0.0);
        assert_eq!(eval_csv(&rows).lines().next().unwrap(), EVAL_HEADER);
    }
}
