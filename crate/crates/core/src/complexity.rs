//! Reference per-pixel complexity: the normalized root of squared differences
//! between a pixel and its (up to) 5x5 neighbourhood.
//!
//! For an interior pixel the window spans rows `-2..=2` and cols `-2..=2`,
//! except on the second and second-to-last row/column where it is shifted
//! inwards to `-1..=2` / `-2..=1`. With `R = rows_in_window * cols_in_window - 1`,
//! `C = sqrt(sum (I(r+k, c+l) - I(r, c))^2) / R`.
//! Border positions and positions of the other parity are 0.

use crate::error::{RdhError, Result};
use crate::image::{GrayImage, Parity};

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityMap {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl ComplexityMap {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(RdhError::DimensionMismatch(format!(
                "{} complexities for a {rows}x{cols} map",
                values.len()
            )));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            values: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.values[row * self.cols + col] = value;
    }

    /// Linear rescale to `[0, 255]` for display only.
    pub fn to_display(&self) -> GrayImage {
        let max = self.values.iter().cloned().fold(0.0f64, f64::max);
        let scale = if max > 0.0 { 255.0 / max } else { 0.0 };
        let pixels = self
            .values
            .iter()
            .map(|&v| (v * scale).round().clamp(0.0, 255.0) as u8)
            .collect();
        GrayImage::new(self.rows, self.cols, pixels).expect("map dimensions are valid")
    }
}

/// True for positions that are neither on the image border nor of the wrong parity.
#[inline]
pub fn is_interior(row: usize, col: usize, rows: usize, cols: usize) -> bool {
    row >= 1 && col >= 1 && row + 1 < rows && col + 1 < cols
}

#[inline]
fn window(index: usize, len: usize) -> (isize, isize) {
    if index == 1 {
        (-1, 2)
    } else if index == len - 2 {
        (-2, 1)
    } else {
        (-2, 2)
    }
}

pub fn reference_complexity(img: &GrayImage, target: Parity) -> Result<ComplexityMap> {
    let (rows, cols) = (img.rows(), img.cols());
    if rows < 4 || cols < 4 {
        return Err(RdhError::InvalidDimensions {
            rows,
            cols,
            reason: "reference complexity needs at least 4x4",
        });
    }
    let mut map = ComplexityMap::zeros(rows, cols);
    for r in 1..rows - 1 {
        let (k1, k2) = window(r, rows);
        for c in 1..cols - 1 {
            if Parity::of(r, c) != target {
                continue;
            }
            let (l1, l2) = window(c, cols);
            let center = img.get(r, c) as f64;
            let mut sum = 0.0f64;
            for k in k1..=k2 {
                let rr = (r as isize + k) as usize;
                for l in l1..=l2 {
                    let cc = (c as isize + l) as usize;
                    let d = img.get(rr, cc) as f64 - center;
                    sum += d * d;
                }
            }
            let area = ((k2 - k1 + 1) * (l2 - l1 + 1) - 1) as f64;
            map.set(r, c, sum.sqrt() / area);
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prng::XorShift64Star;

    fn random_image(rows: usize, cols: usize, lo: u8, hi: u8, seed: u64) -> GrayImage {
        let mut g = XorShift64Star::new(seed);
        let span = (hi - lo) as u64 + 1;
        GrayImage::from_fn(rows, cols, |_, _| lo + g.below(span) as u8).unwrap()
    }

    #[test]
    fn constant_image_is_flat() {
        for v in [0u8, 77, 255] {
            let img = GrayImage::filled(9, 7, v).unwrap();
            let map = reference_complexity(&img, Parity::Dot).unwrap();
            assert!(map.values().iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn border_and_wrong_parity_are_zero() {
        let img = random_image(10, 12, 0, 255, 5);
        for target in [Parity::Dot, Parity::Cross] {
            let map = reference_complexity(&img, target).unwrap();
            for r in 0..10 {
                for c in 0..12 {
                    if !is_interior(r, c, 10, 12) || Parity::of(r, c) != target {
                        assert_eq!(map.get(r, c), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn second_row_uses_shifted_window() {
        // Single bright pixel at (0, 0) shows up only in windows that reach row 0 / col 0.
        let mut img = GrayImage::filled(8, 8, 10).unwrap();
        img.set(0, 0, 25);
        let map = reference_complexity(&img, Parity::Dot).unwrap();
        // (1, 1): window rows -1..=2 and cols -1..=2 covers (0, 0); R = 15.
        assert!((map.get(1, 1) - 15.0 / 15.0).abs() < 1e-15);
        // (2, 2): full 5x5 window covers (0, 0); R = 24.
        assert!((map.get(2, 2) - 15.0 / 24.0).abs() < 1e-15);
        // (3, 3) does not reach row 0.
        assert_eq!(map.get(3, 3), 0.0);
    }

    #[test]
    fn rejects_small_images() {
        let img = GrayImage::filled(3, 8, 1).unwrap();
        assert!(reference_complexity(&img, Parity::Dot).is_err());
    }

    #[test]
    fn shift_invariance_without_clamping() {
        let base = random_image(16, 16, 50, 200, 9);
        let shifted = GrayImage::from_fn(16, 16, |r, c| base.get(r, c) + 10).unwrap();
        for target in [Parity::Dot, Parity::Cross] {
            assert_eq!(
                reference_complexity(&base, target).unwrap(),
                reference_complexity(&shifted, target).unwrap()
            );
        }
    }

    #[test]
    fn scales_with_contrast() {
        let base = random_image(16, 16, 0, 60, 13);
        let scaled = GrayImage::from_fn(16, 16, |r, c| base.get(r, c) * 3 + 20).unwrap();
        let a = reference_complexity(&base, Parity::Cross).unwrap();
        let b = reference_complexity(&scaled, Parity::Cross).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((3.0 * x - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }
}
