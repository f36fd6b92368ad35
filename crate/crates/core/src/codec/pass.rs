//! One histogram-shifting pass over a sub-image.
//!
//! The pass walks the first `selected_count` sorted positions. A pixel whose
//! marked value would itself have been skipped as an original owns one
//! overflow-map bit: 1 if it was skipped, 0 otherwise. Skipped pixels always
//! pass that test, so the decoder knows when to read a bit.

use crate::error::{RdhError, Result};
use crate::image::SubImage;
use crate::predictor::PredictorOutput;

use super::plan::EmbedPlan;
use super::scalar::{classify, needs_flag, recover_error, Slot};

/// Embeds exactly `bits` along `order`; returns the marked half and its overflow map.
pub fn embed_pass(
    target: &SubImage,
    prediction: &PredictorOutput,
    order: &[usize],
    bits: &[bool],
    plan: &EmbedPlan,
) -> Result<(SubImage, Vec<bool>)> {
    if plan.selected_count > order.len() {
        return Err(RdhError::Inconsistent(format!(
            "plan selects {} of {} candidates",
            plan.selected_count,
            order.len()
        )));
    }
    let cols = target.cols();
    let mut marked = target.clone();
    let mut payload = bits.iter();
    let mut map = Vec::new();
    for &idx in &order[..plan.selected_count] {
        let (r, c) = (idx / cols, idx % cols);
        let predicted = prediction.pixels().get(r, c) as i32;
        let e = target.get(r, c) as i32 - predicted;
        let value = match classify(predicted, e, plan.t_p, plan.t_n) {
            Slot::Skip => {
                map.push(true);
                continue;
            }
            Slot::Embed { base } => {
                let b = payload.next().ok_or_else(|| {
                    RdhError::Inconsistent("payload exhausted before the plan ended".into())
                })?;
                base + *b as i32
            }
            Slot::Shift { value } => value,
        };
        if needs_flag(predicted, value, plan.t_p, plan.t_n) {
            map.push(false);
        }
        marked.set(r, c, value as u8)?;
    }
    if payload.next().is_some() {
        return Err(RdhError::Inconsistent(
            "plan capacity is smaller than the payload".into(),
        ));
    }
    Ok((marked, map))
}

/// Inverts [`embed_pass`]: returns the carried bits and the restored half.
pub fn extract_pass(
    marked: &SubImage,
    prediction: &PredictorOutput,
    order: &[usize],
    t_p: i32,
    t_n: i32,
    selected_count: usize,
    overflow_map: &[bool],
) -> Result<(Vec<bool>, SubImage)> {
    if selected_count > order.len() {
        return Err(RdhError::CorruptHeader(format!(
            "selected_count {selected_count} exceeds {} candidates",
            order.len()
        )));
    }
    let cols = marked.cols();
    let mut restored = marked.clone();
    let mut flags = overflow_map.iter();
    let mut bits = Vec::new();
    for &idx in &order[..selected_count] {
        let (r, c) = (idx / cols, idx % cols);
        let value = marked.get(r, c) as i32;
        let predicted = prediction.pixels().get(r, c) as i32;
        if needs_flag(predicted, value, t_p, t_n) {
            let skipped = flags
                .next()
                .ok_or_else(|| RdhError::CorruptHeader("overflow map exhausted".into()))?;
            if *skipped {
                continue;
            }
        }
        let (e, bit) = recover_error(value - predicted, t_p, t_n);
        let original = predicted + e;
        if !(0..=255).contains(&original) {
            return Err(RdhError::CorruptHeader(format!(
                "recovered value {original} at ({r}, {c}) is out of range"
            )));
        }
        bits.extend(bit);
        restored.set(r, c, original as u8)?;
    }
    if flags.next().is_some() {
        return Err(RdhError::CorruptHeader(
            "overflow map has unread bits".into(),
        ));
    }
    Ok((bits, restored))
}
