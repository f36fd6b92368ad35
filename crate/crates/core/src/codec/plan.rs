//! Error maps, candidate ordering and threshold planning.

use crate::complexity::{is_interior, ComplexityMap};
use crate::error::{RdhError, Result};
use crate::image::{Parity, SubImage};
use crate::predictor::PredictorOutput;

use super::scalar::{classify, needs_flag, Slot};

/// Default bound on threshold magnitudes: `t_p < 16`, `t_n >= -16`.
pub const DEFAULT_THRESHOLD_CAP: u8 = 16;

/// Prediction errors on the interior positions of one parity; 0 elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorMap {
    rows: usize,
    cols: usize,
    target: Parity,
    values: Vec<i32>,
}

impl ErrorMap {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn target(&self) -> Parity {
        self.target
    }

    pub fn get(&self, row: usize, col: usize) -> i32 {
        self.values[row * self.cols + col]
    }

    pub fn values(&self) -> &[i32] {
        &self.values
    }
}

/// `actual - predicted` on the prediction's support.
pub fn compute_errors(target: &SubImage, prediction: &PredictorOutput) -> Result<ErrorMap> {
    if (target.rows(), target.cols()) != (prediction.rows(), prediction.cols()) {
        return Err(RdhError::DimensionMismatch(format!(
            "target {}x{} vs prediction {}x{}",
            target.rows(),
            target.cols(),
            prediction.rows(),
            prediction.cols()
        )));
    }
    if target.kept() != prediction.target() {
        return Err(RdhError::ParityMismatch(
            "prediction targets the other parity".into(),
        ));
    }
    let (rows, cols) = (target.rows(), target.cols());
    let mut values = vec![0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            if Parity::of(r, c) == target.kept() && is_interior(r, c, rows, cols) {
                values[r * cols + c] =
                    target.get(r, c) as i32 - prediction.pixels().get(r, c) as i32;
            }
        }
    }
    Ok(ErrorMap {
        rows,
        cols,
        target: target.kept(),
        values,
    })
}

/// Interior `target` positions (row-major indices), least complex first.
///
/// Keys are `round(c * 1024)` so last-bit noise cannot reorder candidates;
/// equal keys fall back to row-major order.
pub fn sort_candidates(complexity: &ComplexityMap, target: Parity) -> Vec<usize> {
    let (rows, cols) = (complexity.rows(), complexity.cols());
    let mut keyed: Vec<(i64, usize)> = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (r, c)))
        .filter(|&(r, c)| Parity::of(r, c) == target && is_interior(r, c, rows, cols))
        .map(|(r, c)| ((complexity.get(r, c) * 1024.0).round() as i64, r * cols + c))
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, idx)| idx).collect()
}

/// One position in sorted order with its prediction and error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub index: usize,
    pub predicted: u8,
    pub error: i32,
}

pub fn candidates(
    order: &[usize],
    errors: &ErrorMap,
    prediction: &PredictorOutput,
) -> Vec<Candidate> {
    let pixels = prediction.pixels().pixels();
    order
        .iter()
        .map(|&index| Candidate {
            index,
            predicted: pixels[index],
            error: errors.values[index],
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbedPlan {
    pub pass: Parity,
    pub t_p: i32,
    pub t_n: i32,
    /// Length of the sorted prefix that is modified.
    pub selected_count: usize,
    /// Bits the prefix carries; equals the request.
    pub capacity_bits: usize,
    /// Upper bound on the overflow-map length for this prefix.
    pub map_bits_bound: usize,
    pub estimated_distortion: f64,
}

/// Cost of one candidate under fixed thresholds.
#[derive(Debug, Clone, Copy)]
struct Cost {
    bits: usize,
    map_bits: usize,
    distortion: f64,
}

/// Whether neither skipping nor a map bit is possible for any threshold pair
/// within `cap`: prediction and pixel both sit at least `2 * cap` away from
/// the ends of the range.
fn far_from_range_ends(c: &Candidate, cap: u8) -> bool {
    let (lo, hi) = (2 * cap as i32, 255 - 2 * cap as i32);
    let (p, x) = (c.predicted as i32, c.predicted as i32 + c.error);
    (lo..=hi).contains(&p) && (lo..=hi).contains(&x)
}

#[inline]
fn cost_fast(e: i32, t_p: i32, t_n: i32) -> Cost {
    if e > t_p {
        Cost {
            bits: 0,
            map_bits: 0,
            distortion: ((t_p + 1) * (t_p + 1)) as f64,
        }
    } else if e < t_n {
        Cost {
            bits: 0,
            map_bits: 0,
            distortion: (t_n * t_n) as f64,
        }
    } else {
        Cost {
            bits: 1,
            map_bits: 0,
            distortion: (e * e + e) as f64 + 0.5,
        }
    }
}

#[inline]
fn cost(c: &Candidate, safe: bool, t_p: i32, t_n: i32) -> Cost {
    if safe {
        return cost_fast(c.error, t_p, t_n);
    }
    let (p, e) = (c.predicted as i32, c.error);
    match classify(p, e, t_p, t_n) {
        Slot::Skip => Cost {
            bits: 0,
            map_bits: 1,
            distortion: 0.0,
        },
        Slot::Embed { base } => Cost {
            bits: 1,
            map_bits: (needs_flag(p, base, t_p, t_n) || needs_flag(p, base + 1, t_p, t_n)) as usize,
            distortion: (e * e + e) as f64 + 0.5,
        },
        Slot::Shift { value } => {
            let d = if e > t_p { t_p + 1 } else { t_n };
            Cost {
                bits: 0,
                map_bits: needs_flag(p, value, t_p, t_n) as usize,
                distortion: (d * d) as f64,
            }
        }
    }
}

fn threshold_pairs(cap: u8) -> impl Iterator<Item = (i32, i32)> {
    let cap = cap as i32;
    (0..cap).flat_map(move |t_p| (1..=cap).map(move |a| (t_p, -a)))
}

/// Most bits any threshold pair can carry with at most `map_budget` map bits.
pub fn max_capacity(cands: &[Candidate], map_budget: usize, cap: u8) -> usize {
    let safe: Vec<bool> = cands.iter().map(|c| far_from_range_ends(c, cap)).collect();
    threshold_pairs(cap)
        .map(|(t_p, t_n)| {
            let (mut bits, mut map) = (0, 0);
            for (c, &safe) in cands.iter().zip(&safe) {
                let k = cost(c, safe, t_p, t_n);
                map += k.map_bits;
                if map > map_budget {
                    break;
                }
                bits += k.bits;
            }
            bits
        })
        .max()
        .unwrap_or(0)
}

/// Cheapest (expected squared change) plan carrying exactly `required_bits`.
///
/// For each pair `t_p in [0, cap)`, `t_n in [-cap, -1]` the shortest sorted
/// prefix with enough capacity is taken; plans whose overflow map could
/// exceed `map_budget` are rejected. Ties prefer shorter prefixes, then
/// smaller `t_p`, then `t_n` closer to zero.
pub fn select_plan(
    cands: &[Candidate],
    required_bits: usize,
    map_budget: usize,
    cap: u8,
    pass: Parity,
) -> Result<EmbedPlan> {
    let safe: Vec<bool> = cands.iter().map(|c| far_from_range_ends(c, cap)).collect();
    let mut best: Option<EmbedPlan> = None;
    for (t_p, t_n) in threshold_pairs(cap) {
        let (mut bits, mut map, mut dist) = (0usize, 0usize, 0.0f64);
        let mut n = 0;
        // Every further bit costs at least 0.5 (e in {-1, 0}), which bounds the final distortion.
        let beats = |best: &Option<EmbedPlan>, dist: f64, bits: usize, n: usize| match best {
            None => true,
            Some(b) => {
                let bound = dist + 0.5 * required_bits.saturating_sub(bits) as f64;
                bound < b.estimated_distortion
                    || (bound == b.estimated_distortion && n < b.selected_count)
            }
        };
        loop {
            if map > map_budget || !beats(&best, dist, bits, n) {
                break;
            }
            if bits >= required_bits {
                best = Some(EmbedPlan {
                    pass,
                    t_p,
                    t_n,
                    selected_count: n,
                    capacity_bits: bits,
                    map_bits_bound: map,
                    estimated_distortion: dist,
                });
                break;
            }
            let Some(c) = cands.get(n) else { break };
            let k = cost(c, safe[n], t_p, t_n);
            bits += k.bits;
            map += k.map_bits;
            dist += k.distortion;
            n += 1;
        }
    }
    best.ok_or(RdhError::CapacityExceeded {
        requested: required_bits,
        max_bits: max_capacity(cands, map_budget, cap),
    })
}
