//! The per-pixel histogram-shifting map and its inverse.
//!
//! Errors inside `[t_n, t_p]` are expanded to `2e + b`; errors above `t_p`
//! move up by `t_p + 1`, errors below `t_n` move down by `|t_n|`. The inverse
//! uses floor division so negative marked errors decode correctly.

/// Marked error for prediction error `e` carrying `bit` (ignored outside the band).
#[inline]
pub fn embed_error(e: i32, bit: bool, t_p: i32, t_n: i32) -> i32 {
    if e > t_p {
        e + t_p + 1
    } else if e < t_n {
        e + t_n
    } else {
        2 * e + bit as i32
    }
}

/// Original error and, for expanded errors, the carried bit.
#[inline]
pub fn recover_error(marked: i32, t_p: i32, t_n: i32) -> (i32, Option<bool>) {
    if marked > 2 * t_p + 1 {
        (marked - t_p - 1, None)
    } else if marked < 2 * t_n {
        (marked - t_n, None)
    } else {
        (marked.div_euclid(2), Some(marked.rem_euclid(2) == 1))
    }
}

/// Largest possible pixel change for these thresholds.
#[inline]
pub fn ambiguity_margin(t_p: i32, t_n: i32) -> i32 {
    (t_p + 1).max(-t_n)
}

/// Whether a marked value could also be a skipped original, and so owns a map bit.
///
/// Skipped pixels keep their value, so they always test positive; the
/// decoder evaluates the same rule from the marked value and the prediction.
#[inline]
pub fn needs_flag(predicted: i32, value: i32, t_p: i32, t_n: i32) -> bool {
    classify(predicted, value - predicted, t_p, t_n) == Slot::Skip
}

/// What the encoder does with one candidate pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    /// Carries a bit; the marked value is `base + bit`.
    Embed { base: i32 },
    /// Shifted without carrying a bit.
    Shift { value: i32 },
    /// Left untouched because some outcome would leave `[0, 255]`.
    Skip,
}

/// Classification of a pixel with prediction `predicted` and error `e`.
///
/// Expandable pixels are skipped when either bit value would overflow, so the
/// decision does not depend on the payload and can be planned exactly.
#[inline]
pub fn classify(predicted: i32, e: i32, t_p: i32, t_n: i32) -> Slot {
    if (t_n..=t_p).contains(&e) {
        let base = predicted + 2 * e;
        if base < 0 || base + 1 > 255 {
            Slot::Skip
        } else {
            Slot::Embed { base }
        }
    } else {
        let value = predicted + embed_error(e, false, t_p, t_n);
        if (0..=255).contains(&value) {
            Slot::Shift { value }
        } else {
            Slot::Skip
        }
    }
}
