//! Deterministic natural-looking test images.
//!
//! Used for tests, benchmarks and the demo when no photo corpus is at hand.
//! Each image mixes multi-octave value noise (soft illumination and clutter),
//! a handful of shaded shapes with hard edges, a patch of oriented texture,
//! sensor noise whose strength varies across the frame, and a few small
//! clipped highlights.

use crate::image::GrayImage;
use crate::prng::XorShift64Star;

/// Bilinear value noise on a `cells x cells` lattice, in `[0, 1)`.
struct ValueNoise {
    cells: usize,
    lattice: Vec<f64>,
}

impl ValueNoise {
    fn new(cells: usize, rng: &mut XorShift64Star) -> Self {
        let n = cells + 1;
        Self {
            cells,
            lattice: (0..n * n).map(|_| rng.next_f64()).collect(),
        }
    }

    /// `u`, `v` in `[0, 1]`.
    fn sample(&self, u: f64, v: f64) -> f64 {
        let (x, y) = (u * self.cells as f64, v * self.cells as f64);
        let (x0, y0) = (
            (x.floor() as usize).min(self.cells - 1),
            (y.floor() as usize).min(self.cells - 1),
        );
        let (fx, fy) = (smooth(x - x0 as f64), smooth(y - y0 as f64));
        let n = self.cells + 1;
        let at = |i: usize, j: usize| self.lattice[j * n + i];
        let top = at(x0, y0) * (1.0 - fx) + at(x0 + 1, y0) * fx;
        let bottom = at(x0, y0 + 1) * (1.0 - fx) + at(x0 + 1, y0 + 1) * fx;
        top * (1.0 - fy) + bottom * fy
    }
}

fn smooth(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

enum Shape {
    Ellipse {
        cy: f64,
        cx: f64,
        ry: f64,
        rx: f64,
    },
    Rect {
        top: f64,
        left: f64,
        bottom: f64,
        right: f64,
    },
}

impl Shape {
    fn contains(&self, y: f64, x: f64) -> bool {
        match *self {
            Shape::Ellipse { cy, cx, ry, rx } => {
                ((y - cy) / ry).powi(2) + ((x - cx) / rx).powi(2) <= 1.0
            }
            Shape::Rect {
                top,
                left,
                bottom,
                right,
            } => y >= top && y <= bottom && x >= left && x <= right,
        }
    }
}

/// One `rows x cols` image; the same seed always gives the same pixels.
pub fn natural_image(rows: usize, cols: usize, seed: u64) -> GrayImage {
    let mut rng = XorShift64Star::new(seed ^ 0x5EED_0F_1AA6E5);
    let octaves: Vec<(ValueNoise, f64)> = [(3, 0.55), (7, 0.25), (17, 0.12), (41, 0.08)]
        .into_iter()
        .map(|(cells, amp)| (ValueNoise::new(cells, &mut rng), amp))
        .collect();
    let grain = ValueNoise::new(5, &mut rng);
    let fine = ValueNoise::new(97, &mut rng);
    let base_level = 60.0 + 120.0 * rng.next_f64();
    let contrast = 90.0 + 80.0 * rng.next_f64();

    let shapes: Vec<(Shape, f64, f64)> = (0..3 + rng.below(4))
        .map(|_| {
            let (cy, cx) = (rng.next_f64(), rng.next_f64());
            let shape = if rng.below(2) == 0 {
                Shape::Ellipse {
                    cy,
                    cx,
                    ry: 0.05 + 0.2 * rng.next_f64(),
                    rx: 0.05 + 0.2 * rng.next_f64(),
                }
            } else {
                let (h, w) = (0.05 + 0.3 * rng.next_f64(), 0.05 + 0.3 * rng.next_f64());
                Shape::Rect {
                    top: cy - h / 2.0,
                    left: cx - w / 2.0,
                    bottom: cy + h / 2.0,
                    right: cx + w / 2.0,
                }
            };
            // Flat level plus a gentle vertical shading gradient.
            (
                shape,
                20.0 + 215.0 * rng.next_f64(),
                40.0 * (rng.next_f64() - 0.5),
            )
        })
        .collect();

    let (tt, tl) = (0.6 * rng.next_f64(), 0.6 * rng.next_f64());
    let texture = Shape::Rect {
        top: tt,
        left: tl,
        bottom: tt + 0.25,
        right: tl + 0.3,
    };
    let angle = std::f64::consts::PI * rng.next_f64();
    let period = 3.0 + 6.0 * rng.next_f64();
    let (ta, tb) = (angle.cos(), angle.sin());

    let highlights: Vec<(f64, f64, f64)> = (0..rng.below(3))
        .map(|_| {
            (
                rng.next_f64(),
                rng.next_f64(),
                0.01 + 0.015 * rng.next_f64(),
            )
        })
        .collect();

    let mut noise = XorShift64Star::new(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1);
    GrayImage::from_fn(rows, cols, |r, c| {
        let (v, u) = (
            r as f64 / (rows - 1).max(1) as f64,
            c as f64 / (cols - 1).max(1) as f64,
        );
        let field: f64 = octaves.iter().map(|(n, a)| a * n.sample(u, v)).sum();
        let mut value = base_level + contrast * (field - 0.5);
        for (shape, level, shade) in &shapes {
            if shape.contains(v, u) {
                value = 0.35 * value
                    + 0.65 * (level + shade * v)
                    + 12.0 * (octaves[2].0.sample(u, v) - 0.5);
            }
        }
        if texture.contains(v, u) {
            value +=
                18.0 * ((ta * r as f64 + tb * c as f64) * std::f64::consts::TAU / period).sin();
        }
        for &(hy, hx, radius) in &highlights {
            let d2 = (v - hy).powi(2) + (u - hx).powi(2);
            value += 160.0 * (-d2 / (radius * radius)).exp();
        }
        // Busy regions: fine clutter and stronger grain where the grain field is high.
        let busy = (grain.sample(u, v) - 0.45).max(0.0) * 2.0;
        value += busy * 60.0 * (fine.sample(u, v) - 0.5);
        // Roughly triangular noise, from a level or two up to about ten.
        value += (noise.next_f64() + noise.next_f64() - 1.0) * (2.5 + 12.0 * busy);
        value.round().clamp(0.0, 255.0) as u8
    })
    .expect("non-empty dimensions")
}

/// `count` images with consecutive seeds starting at `seed`.
pub fn corpus(count: usize, rows: usize, cols: usize, seed: u64) -> Vec<GrayImage> {
    (0..count as u64)
        .map(|k| natural_image(rows, cols, seed.wrapping_add(k)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_varied() {
        let a = natural_image(64, 80, 3);
        assert_eq!(a, natural_image(64, 80, 3));
        assert_ne!(a, natural_image(64, 80, 4));
        assert_eq!((a.rows(), a.cols()), (64, 80));
    }

    #[test]
    fn uses_a_wide_range_without_flat_clipping() {
        for seed in 0..8 {
            let img = natural_image(128, 128, seed);
            let (lo, hi) = img
                .pixels()
                .iter()
                .fold((255, 0), |(l, h), &p| (l.min(p), h.max(p)));
            assert!(hi - lo > 60, "seed {seed}: range {lo}..{hi}");
            let clipped = img.pixels().iter().filter(|&&p| p == 255 || p == 0).count();
            assert!(
                clipped < img.pixels().len() / 10,
                "seed {seed}: {clipped} clipped"
            );
        }
    }
}
