//! Two-pass embedding and extraction over a whole image.
//!
//! Dot pixels are embedded first, predicted from the original Cross half.
//! Cross pixels follow, predicted from the marked Dot half after a quarter
//! turn so the predictor always sees a Cross-kept context. Each pass writes
//! its header into the LSBs of a reserved border row (row 0 for Dot, the
//! last row for Cross) and carries the displaced LSBs in its own payload.
//! Before prediction the LSBs of both reserved rows are cleared in the
//! context, so header writes never change what the predictor sees.
//!
//! Extraction runs the passes in reverse: Cross first, then Dot.

use crate::complexity::ComplexityMap;
use crate::error::{RdhError, Result};
use crate::image::{
    merge, rotate90, rotate_grid, rotation_direction, split_checkerboard, GrayImage, Parity,
    Rotation, SubImage,
};
use crate::predictor::{predict_with, PredictorKind, PredictorOutput};

use super::header::{AuxHeader, HEADER_BITS};
use super::keystream::keystream_xor;
use super::pass::{embed_pass, extract_pass};
use super::plan::{
    candidates, compute_errors, select_plan, sort_candidates, EmbedPlan, DEFAULT_THRESHOLD_CAP,
};

/// Smallest side the pipeline accepts.
pub const MIN_SIDE: usize = 8;

const MAX_REBALANCE: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodecOptions {
    /// Thresholds are searched in `t_p < cap`, `t_n >= -cap`.
    pub threshold_cap: u8,
}

impl Default for CodecOptions {
    fn default() -> Self {
        Self {
            threshold_cap: DEFAULT_THRESHOLD_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PassReport {
    pub plan: EmbedPlan,
    /// Encrypted payload bits carried by this pass.
    pub payload_bits: usize,
    pub map_bits: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbedOutcome {
    pub marked: GrayImage,
    pub dot: PassReport,
    pub cross: PassReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extracted {
    pub payload: Vec<bool>,
    pub image: GrayImage,
}

/// Prediction and visiting order for one pass.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PassInputs {
    pub prediction: PredictorOutput,
    pub order: Vec<usize>,
}

fn check_dimensions(rows: usize, cols: usize) -> Result<Rotation> {
    if rows < MIN_SIDE || cols < MIN_SIDE {
        return Err(RdhError::InvalidDimensions {
            rows,
            cols,
            reason: "both sides must be at least 8",
        });
    }
    let direction = rotation_direction(rows, cols)?;
    if cols < HEADER_BITS {
        return Err(RdhError::ReservedRowOverflow {
            needed: HEADER_BITS,
            available: cols,
        });
    }
    Ok(direction)
}

fn cleared(context: &SubImage) -> SubImage {
    let mut ctx = context.clone();
    ctx.clear_row_lsbs(&[0, ctx.rows() - 1]);
    ctx
}

/// Moves positions inside white plateaus to the end of the order.
///
/// A pixel surrounded by 255s is almost surely 255 itself, which can never
/// be marked; left in front (its complexity is near zero) every such pixel
/// would spend an overflow-map bit and exhaust the header row.
fn demote_saturated(order: Vec<usize>, context: &SubImage) -> Vec<usize> {
    let cols = context.cols();
    let white = |r: usize, c: usize| context.get(r, c) >= 254;
    let (front, back): (Vec<usize>, Vec<usize>) = order.into_iter().partition(|&idx| {
        let (r, c) = (idx / cols, idx % cols);
        !(white(r - 1, c) && white(r + 1, c) && white(r, c - 1) && white(r, c + 1))
    });
    front.into_iter().chain(back).collect()
}

pub(crate) fn dot_inputs(cross: &SubImage, kind: &PredictorKind) -> Result<PassInputs> {
    let context = cleared(cross);
    let prediction = predict_with(kind, &context)?;
    let order = demote_saturated(
        sort_candidates(prediction.complexity(), Parity::Dot),
        &context,
    );
    Ok(PassInputs { prediction, order })
}

pub(crate) fn cross_inputs(
    dot: &SubImage,
    kind: &PredictorKind,
    direction: Rotation,
) -> Result<PassInputs> {
    let context = cleared(dot);
    let turned = context.rotate(direction);
    debug_assert_eq!(turned.kept(), Parity::Cross);
    let out = predict_with(kind, &turned)?;
    let back = direction.inverse();
    let pixels = rotate90(out.pixels(), back);
    let values = rotate_grid(out.complexity().values(), out.rows(), out.cols(), back);
    let complexity = ComplexityMap::new(pixels.rows(), pixels.cols(), values)?;
    let prediction = PredictorOutput::new(pixels, complexity, Parity::Cross);
    let order = demote_saturated(
        sort_candidates(prediction.complexity(), Parity::Cross),
        &context,
    );
    Ok(PassInputs { prediction, order })
}

fn row_lsbs(img: &GrayImage, row: usize) -> Vec<bool> {
    (0..img.cols()).map(|c| img.get(row, c) & 1 == 1).collect()
}

fn write_row_lsbs(img: &mut GrayImage, row: usize, bits: &[bool]) {
    for c in 0..img.cols() {
        let b = bits.get(c).copied().unwrap_or(false) as u8;
        img.set(row, c, (img.get(row, c) & !1) | b);
    }
}

struct PassResult {
    marked: SubImage,
    header: AuxHeader,
    report: PassReport,
}

fn run_pass(
    target: &SubImage,
    inputs: &PassInputs,
    reserved: &[bool],
    payload: &[bool],
    options: CodecOptions,
) -> Result<PassResult> {
    let budget = target.cols() - HEADER_BITS;
    let errors = compute_errors(target, &inputs.prediction)?;
    let cands = candidates(&inputs.order, &errors, &inputs.prediction);
    let bits: Vec<bool> = reserved.iter().chain(payload).copied().collect();
    let plan = select_plan(
        &cands,
        bits.len(),
        budget,
        options.threshold_cap,
        target.kept(),
    )?;
    let (marked, map) = embed_pass(target, &inputs.prediction, &inputs.order, &bits, &plan)?;
    if map.len() > budget {
        return Err(RdhError::ReservedRowOverflow {
            needed: HEADER_BITS + map.len(),
            available: target.cols(),
        });
    }
    let header = AuxHeader {
        t_p: plan.t_p as u8,
        t_n_abs: (-plan.t_n) as u8,
        selected_count: plan.selected_count as u32,
        payload_bit_count: payload.len() as u32,
        overflow_map: map,
    };
    let report = PassReport {
        payload_bits: payload.len(),
        map_bits: header.overflow_map.len(),
        plan,
    };
    Ok(PassResult {
        marked,
        header,
        report,
    })
}

/// Payload bits a pass could have carried, from its capacity error.
/// A pass that cannot even hold the displaced row makes the whole embedding infeasible.
fn pass_limit(err: RdhError, reserved: usize, requested: usize) -> Result<usize> {
    match err {
        RdhError::CapacityExceeded { max_bits, .. } if max_bits < reserved => {
            Err(RdhError::CapacityExceeded {
                requested,
                max_bits: 0,
            })
        }
        RdhError::CapacityExceeded { max_bits, .. } => Ok(max_bits - reserved),
        other => Err(other),
    }
}

pub fn embed(
    cover: &GrayImage,
    payload: &[bool],
    key: u64,
    kind: &PredictorKind,
) -> Result<EmbedOutcome> {
    embed_with(cover, payload, key, kind, CodecOptions::default())
}

/// Encrypts `payload` with `key` and hides it in `cover`.
///
/// The first half of the encrypted bits goes to the Dot pass, the rest to
/// the Cross pass; if either pass lacks room the split is moved toward the
/// other pass before giving up.
pub fn embed_with(
    cover: &GrayImage,
    payload: &[bool],
    key: u64,
    kind: &PredictorKind,
    options: CodecOptions,
) -> Result<EmbedOutcome> {
    let (rows, cols) = (cover.rows(), cover.cols());
    let direction = check_dimensions(rows, cols)?;
    if options.threshold_cap == 0 || options.threshold_cap > 128 {
        return Err(RdhError::InvalidConfig(
            "threshold cap must be in 1..=128".into(),
        ));
    }
    let total = payload.len();
    let encrypted = keystream_xor(payload, key);
    let (dot, cross) = split_checkerboard(cover);
    let top = row_lsbs(cover, 0);
    let bottom = row_lsbs(cover, rows - 1);
    let dot_in = dot_inputs(&cross, kind)?;

    let mut dot_limit: Option<usize> = None;
    let mut cross_limit: Option<usize> = None;
    let mut split = total.div_ceil(2);
    for _ in 0..MAX_REBALANCE {
        let first = match run_pass(&dot, &dot_in, &top, &encrypted[..split], options) {
            Ok(r) => r,
            Err(e) => {
                let limit = pass_limit(e, cols, total)?;
                dot_limit = Some(limit);
                if limit >= split || cross_limit.is_some_and(|cl| limit + cl < total) {
                    break;
                }
                split = limit;
                continue;
            }
        };
        let cross_in = cross_inputs(&first.marked, kind, direction)?;
        let second = match run_pass(&cross, &cross_in, &bottom, &encrypted[split..], options) {
            Ok(r) => r,
            Err(e) => {
                let limit = pass_limit(e, cols, total)?;
                cross_limit = Some(limit);
                let wanted = total - limit;
                if dot_limit.is_some_and(|dl| wanted > dl) || wanted <= split {
                    break;
                }
                split = wanted;
                continue;
            }
        };
        let mut marked = merge(&first.marked, &second.marked)?;
        write_row_lsbs(&mut marked, 0, &first.header.to_bits());
        write_row_lsbs(&mut marked, rows - 1, &second.header.to_bits());
        return Ok(EmbedOutcome {
            marked,
            dot: first.report,
            cross: second.report,
        });
    }
    Err(RdhError::CapacityExceeded {
        requested: total,
        max_bits: dot_limit.unwrap_or(split) + cross_limit.unwrap_or(total - split),
    })
}

fn extract_one(
    marked: &SubImage,
    inputs: &PassInputs,
    header: &AuxHeader,
    reserved: usize,
) -> Result<(Vec<bool>, SubImage)> {
    let (bits, restored) = extract_pass(
        marked,
        &inputs.prediction,
        &inputs.order,
        header.t_p(),
        header.t_n(),
        header.selected_count as usize,
        &header.overflow_map,
    )?;
    if bits.len() != reserved + header.payload_bit_count as usize {
        return Err(RdhError::CorruptHeader(format!(
            "extracted {} bits, header announces {}",
            bits.len(),
            reserved + header.payload_bit_count as usize
        )));
    }
    Ok((bits, restored))
}

/// Recovers the payload (decrypted with `key`) and the exact cover.
pub fn extract(marked: &GrayImage, key: u64, kind: &PredictorKind) -> Result<Extracted> {
    let (rows, cols) = (marked.rows(), marked.cols());
    let direction = check_dimensions(rows, cols)?;
    let (dot_marked, cross_marked) = split_checkerboard(marked);

    let cross_header = AuxHeader::from_bits(&row_lsbs(marked, rows - 1))?;
    let cross_in = cross_inputs(&dot_marked, kind, direction)?;
    let (cross_bits, cross) = extract_one(&cross_marked, &cross_in, &cross_header, cols)?;

    let dot_header = AuxHeader::from_bits(&row_lsbs(marked, 0))?;
    let dot_in = dot_inputs(&cross, kind)?;
    let (dot_bits, dot) = extract_one(&dot_marked, &dot_in, &dot_header, cols)?;

    let mut image = merge(&dot, &cross)?;
    write_row_lsbs(&mut image, 0, &dot_bits[..cols]);
    write_row_lsbs(&mut image, rows - 1, &cross_bits[..cols]);
    let encrypted: Vec<bool> = dot_bits[cols..]
        .iter()
        .chain(&cross_bits[cols..])
        .copied()
        .collect();
    Ok(Extracted {
        payload: keystream_xor(&encrypted, key),
        image,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::psnr;
    use crate::model::{IcnnpConfig, IcnnpModel};
    use crate::prng::XorShift64Star;
    use std::sync::Arc;

    fn textured(rows: usize, cols: usize, seed: u64) -> GrayImage {
        let mut rng = XorShift64Star::new(seed);
        GrayImage::from_fn(rows, cols, |r, c| {
            let base = 128.0 + 60.0 * ((r as f64 / 9.0).sin() * (c as f64 / 13.0).cos());
            (base + rng.below(7) as f64 - 3.0).clamp(0.0, 255.0) as u8
        })
        .unwrap()
    }

    fn bits(n: usize, seed: u64) -> Vec<bool> {
        XorShift64Star::new(seed).bits(n)
    }

    #[test]
    fn roundtrip_rhombus_both_orientations() {
        for (rows, cols) in [(128, 128), (121, 128), (128, 121)] {
            let cover = textured(rows, cols, rows as u64);
            let payload = bits(3000, 5);
            let out = embed(&cover, &payload, 0xABCD, &PredictorKind::Rhombus).unwrap();
            assert_eq!(out.dot.payload_bits + out.cross.payload_bits, 3000);
            let back = extract(&out.marked, 0xABCD, &PredictorKind::Rhombus).unwrap();
            assert_eq!(back.image, cover, "{rows}x{cols}");
            assert_eq!(back.payload, payload);
        }
    }

    #[test]
    fn roundtrip_cnn_kinds() {
        let model = Arc::new(IcnnpModel::new_random(IcnnpConfig::desk(), 9).unwrap());
        let cover = textured(128, 120 + 8, 3);
        for kind in [
            PredictorKind::Icnnp(model.clone()),
            PredictorKind::CnnPixelPlusLocalVariance(model),
        ] {
            let payload = bits(1500, 11);
            let out = embed(&cover, &payload, 1, &kind).unwrap();
            let back = extract(&out.marked, 1, &kind).unwrap();
            assert_eq!(back.image, cover);
            assert_eq!(back.payload, payload);
        }
    }

    #[test]
    fn empty_payload_only_carries_reserved_rows() {
        // The displaced header-row LSBs are still embedded, so a few interior pixels move.
        let cover = textured(128, 128, 8);
        let out = embed(&cover, &[], 3, &PredictorKind::Rhombus).unwrap();
        assert_eq!(out.dot.payload_bits + out.cross.payload_bits, 0);
        assert_eq!(out.dot.plan.capacity_bits, 128);
        assert_eq!(out.cross.plan.capacity_bits, 128);
        for r in 0..128 {
            for c in 0..128 {
                let (a, b) = (cover.get(r, c) as i32, out.marked.get(r, c) as i32);
                if r == 0 || r == 127 {
                    assert_eq!(a & !1, b & !1);
                } else {
                    let plan = if Parity::of(r, c) == Parity::Dot {
                        &out.dot.plan
                    } else {
                        &out.cross.plan
                    };
                    assert!((a - b).abs() <= (plan.t_p + 1).max(-plan.t_n));
                }
            }
        }
        assert!(psnr(&cover, &out.marked).unwrap().is_finite());
        let back = extract(&out.marked, 3, &PredictorKind::Rhombus).unwrap();
        assert!(back.payload.is_empty());
        assert_eq!(back.image, cover);
    }

    #[test]
    fn saturated_image_roundtrips() {
        // Textured content clipped at both ends of the range.
        let cover = GrayImage::from_fn(128, 128, |r, c| {
            let v = 128.0
                + 200.0 * ((r as f64 / 11.0).sin() * (c as f64 / 7.0).cos())
                + ((r * 7 + c * 3) % 5) as f64;
            v.clamp(0.0, 255.0) as u8
        })
        .unwrap();
        let payload = bits(200, 2);
        let out = embed(&cover, &payload, 4, &PredictorKind::Rhombus).unwrap();
        let back = extract(&out.marked, 4, &PredictorKind::Rhombus).unwrap();
        assert_eq!(back.image, cover);
        assert_eq!(back.payload, payload);
    }

    #[test]
    fn wrong_key_restores_image_not_payload() {
        let cover = textured(128, 128, 12);
        let payload = bits(800, 1);
        let out = embed(&cover, &payload, 77, &PredictorKind::Rhombus).unwrap();
        let back = extract(&out.marked, 78, &PredictorKind::Rhombus).unwrap();
        assert_eq!(back.image, cover);
        assert_ne!(back.payload, payload);
    }

    #[test]
    fn oversized_payload_reports_capacity() {
        let cover = textured(128, 128, 6);
        match embed(&cover, &bits(20_000, 1), 1, &PredictorKind::Rhombus) {
            Err(RdhError::CapacityExceeded {
                requested: 20_000,
                max_bits,
            }) => assert!(max_bits < 20_000),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbalanced_halves_are_rebalanced() {
        // Smooth top half, noisy bottom half: the Cross pass has less room.
        let mut rng = XorShift64Star::new(3);
        let cover = GrayImage::from_fn(
            128,
            128,
            |r, _| if r < 64 { 100 } else { rng.below(256) as u8 },
        )
        .unwrap();
        let payload = bits(5000, 9);
        let out = embed(&cover, &payload, 5, &PredictorKind::Rhombus).unwrap();
        let back = extract(&out.marked, 5, &PredictorKind::Rhombus).unwrap();
        assert_eq!(back.image, cover);
        assert_eq!(back.payload, payload);
    }

    #[test]
    fn dimension_errors() {
        let odd = GrayImage::filled(129, 129, 9).unwrap();
        assert!(matches!(
            embed(&odd, &[], 0, &PredictorKind::Rhombus),
            Err(RdhError::UnsupportedDimensions { .. })
        ));
        let narrow = GrayImage::filled(128, 64, 9).unwrap();
        assert!(matches!(
            embed(&narrow, &[], 0, &PredictorKind::Rhombus),
            Err(RdhError::ReservedRowOverflow { .. })
        ));
        let tiny = GrayImage::filled(4, 200, 9).unwrap();
        assert!(matches!(
            embed(&tiny, &[], 0, &PredictorKind::Rhombus),
            Err(RdhError::InvalidDimensions { .. })
        ));
    }

    #[test]
    fn corrupted_headers_are_rejected() {
        let cover = textured(128, 128, 21);
        let payload = bits(2000, 4);
        let out = embed(&cover, &payload, 9, &PredictorKind::Rhombus).unwrap();
        // Low bit of payload_bit_count, top bit of selected_count, top bit of the map length.
        for (row, bit) in [(0, 79), (127, 79), (0, 16), (127, 16), (0, 80), (127, 80)] {
            let mut bad = out.marked.clone();
            bad.set(row, bit, bad.get(row, bit) ^ 1);
            assert!(
                extract(&bad, 9, &PredictorKind::Rhombus).is_err(),
                "row {row} bit {bit}"
            );
        }
    }

    #[test]
    fn decoder_sees_encoder_orders() {
        let cover = textured(128, 128, 30);
        let kind = PredictorKind::Rhombus;
        let direction = rotation_direction(128, 128).unwrap();
        let (dot, cross) = split_checkerboard(&cover);
        let enc_dot = dot_inputs(&cross, &kind).unwrap();
        let out = embed(&cover, &bits(4000, 3), 2, &kind).unwrap();
        let (marked_dot, _) = split_checkerboard(&out.marked);
        // Encoder's Cross pass context: Dot half after the Dot pass, before header writes.
        let errors = compute_errors(&dot, &enc_dot.prediction).unwrap();
        let cands = candidates(&enc_dot.order, &errors, &enc_dot.prediction);
        let plan = select_plan(
            &cands,
            out.dot.plan.capacity_bits,
            128 - HEADER_BITS,
            16,
            Parity::Dot,
        )
        .unwrap();
        let reserved = row_lsbs(&cover, 0);
        let mut first_bits = reserved.clone();
        first_bits.extend(keystream_xor(&bits(4000, 3), 2)[..out.dot.payload_bits].iter());
        let (enc_marked_dot, _) = embed_pass(
            &dot,
            &enc_dot.prediction,
            &enc_dot.order,
            &first_bits,
            &plan,
        )
        .unwrap();
        let enc_cross = cross_inputs(&enc_marked_dot, &kind, direction).unwrap();
        let dec_cross = cross_inputs(&marked_dot, &kind, direction).unwrap();
        assert_eq!(enc_cross, dec_cross);
        let back = extract(&out.marked, 2, &kind).unwrap();
        let (_, recovered_cross) = split_checkerboard(&back.image);
        assert_eq!(dot_inputs(&recovered_cross, &kind).unwrap(), enc_dot);
    }
}
