//! 8-bit grayscale images, binary PGM I/O, checkerboard decomposition,
//! quarter-turn rotation and PSNR.
//!
//! Positions are 0-based `(row, col)`. A position is `Dot` when `row + col`
//! is even and `Cross` otherwise.

use crate::error::{RdhError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Dot,
    Cross,
}

impl Parity {
    pub fn of(row: usize, col: usize) -> Self {
        if (row + col) % 2 == 0 {
            Parity::Dot
        } else {
            Parity::Cross
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Parity::Dot => Parity::Cross,
            Parity::Cross => Parity::Dot,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    rows: usize,
    cols: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(rows: usize, cols: usize, pixels: Vec<u8>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(RdhError::InvalidDimensions {
                rows,
                cols,
                reason: "image must not be empty",
            });
        }
        if pixels.len() != rows * cols {
            return Err(RdhError::DimensionMismatch(format!(
                "{} pixels for a {rows}x{cols} image",
                pixels.len()
            )));
        }
        Ok(Self { rows, cols, pixels })
    }

    pub fn filled(rows: usize, cols: usize, value: u8) -> Result<Self> {
        Self::new(rows, cols, vec![value; rows * cols])
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                pixels.push(f(r, c));
            }
        }
        Self::new(rows, cols, pixels)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.pixels[row * self.cols + col] = value;
    }

    pub fn same_shape(&self, other: &GrayImage) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    /// Crops a `height x width` window starting at `(top, left)`.
    pub fn crop(&self, top: usize, left: usize, height: usize, width: usize) -> Result<GrayImage> {
        if top + height > self.rows || left + width > self.cols {
            return Err(RdhError::DimensionMismatch(format!(
                "crop {height}x{width}@({top},{left}) outside {}x{}",
                self.rows, self.cols
            )));
        }
        GrayImage::from_fn(height, width, |r, c| self.get(top + r, left + c))
    }
}

/// A checkerboard half: pixels of `kept` parity are retained, the rest are 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubImage {
    image: GrayImage,
    kept: Parity,
}

impl SubImage {
    pub fn new(image: GrayImage, kept: Parity) -> Result<Self> {
        for r in 0..image.rows {
            for c in 0..image.cols {
                if Parity::of(r, c) != kept && image.get(r, c) != 0 {
                    return Err(RdhError::ParityMismatch(format!(
                        "non-zero value at ({r}, {c}) of the discarded parity"
                    )));
                }
            }
        }
        Ok(Self { image, kept })
    }

    /// Keeps only `kept`-parity pixels of `image`.
    pub fn extract(image: &GrayImage, kept: Parity) -> Self {
        let masked = GrayImage::from_fn(image.rows, image.cols, |r, c| {
            if Parity::of(r, c) == kept {
                image.get(r, c)
            } else {
                0
            }
        })
        .expect("dimensions come from a valid image");
        Self {
            image: masked,
            kept,
        }
    }

    pub fn image(&self) -> &GrayImage {
        &self.image
    }

    pub fn kept(&self) -> Parity {
        self.kept
    }

    pub fn rows(&self) -> usize {
        self.image.rows
    }

    pub fn cols(&self) -> usize {
        self.image.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.image.get(row, col)
    }

    /// Overwrites a kept-parity pixel.
    pub fn set(&mut self, row: usize, col: usize, value: u8) -> Result<()> {
        if Parity::of(row, col) != self.kept {
            return Err(RdhError::ParityMismatch(format!(
                "({row}, {col}) is not a kept position"
            )));
        }
        self.image.set(row, col, value);
        Ok(())
    }

    pub fn rotate(&self, direction: Rotation) -> SubImage {
        // (r, c) -> (c, M-1-r) shifts r+c by M-1 (CW); CCW shifts it by N-1.
        let flips = match direction {
            Rotation::Clockwise => self.rows() % 2 == 0,
            Rotation::CounterClockwise => self.cols() % 2 == 0,
        };
        let kept = if flips {
            self.kept.opposite()
        } else {
            self.kept
        };
        SubImage {
            image: rotate90(&self.image, direction),
            kept,
        }
    }

    /// Clears the least significant bit of every pixel in the given rows.
    pub fn clear_row_lsbs(&mut self, rows: &[usize]) {
        let cols = self.cols();
        for &r in rows {
            for v in &mut self.image.pixels[r * cols..(r + 1) * cols] {
                *v &= !1;
            }
        }
    }
}

/// Splits an image into its Dot and Cross halves.
pub fn split_checkerboard(img: &GrayImage) -> (SubImage, SubImage) {
    (
        SubImage::extract(img, Parity::Dot),
        SubImage::extract(img, Parity::Cross),
    )
}

/// Reassembles an image from two complementary halves.
pub fn merge(a: &SubImage, b: &SubImage) -> Result<GrayImage> {
    if !a.image.same_shape(&b.image) {
        return Err(RdhError::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    if a.kept == b.kept {
        return Err(RdhError::ParityMismatch(
            "both sub-images keep the same parity".into(),
        ));
    }
    GrayImage::from_fn(a.rows(), a.cols(), |r, c| {
        if Parity::of(r, c) == a.kept {
            a.get(r, c)
        } else {
            b.get(r, c)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rotation {
    Clockwise,
    CounterClockwise,
}

impl Rotation {
    pub fn inverse(self) -> Self {
        match self {
            Rotation::Clockwise => Rotation::CounterClockwise,
            Rotation::CounterClockwise => Rotation::Clockwise,
        }
    }
}

/// Where `(row, col)` of a `rows x cols` grid lands after rotation.
#[inline]
pub fn rotated_position(
    row: usize,
    col: usize,
    rows: usize,
    cols: usize,
    direction: Rotation,
) -> (usize, usize) {
    match direction {
        Rotation::Clockwise => (col, rows - 1 - row),
        Rotation::CounterClockwise => (cols - 1 - col, row),
    }
}

/// Rotates a row-major `rows x cols` grid; the result is `cols x rows`.
pub fn rotate_grid<T: Copy>(data: &[T], rows: usize, cols: usize, direction: Rotation) -> Vec<T> {
    assert_eq!(data.len(), rows * cols);
    if data.is_empty() {
        return Vec::new();
    }
    let mut out = vec![data[0]; data.len()];
    for r in 0..rows {
        for c in 0..cols {
            let (nr, nc) = rotated_position(r, c, rows, cols, direction);
            out[nr * rows + nc] = data[r * cols + c];
        }
    }
    out
}

pub fn rotate90(img: &GrayImage, direction: Rotation) -> GrayImage {
    GrayImage {
        rows: img.cols,
        cols: img.rows,
        pixels: rotate_grid(&img.pixels, img.rows, img.cols, direction),
    }
}

/// Picks the quarter turn that maps the Dot class onto the Cross class.
pub fn rotation_direction(rows: usize, cols: usize) -> Result<Rotation> {
    if rows % 2 == 0 {
        Ok(Rotation::Clockwise)
    } else if cols % 2 == 0 {
        Ok(Rotation::CounterClockwise)
    } else {
        Err(RdhError::UnsupportedDimensions { rows, cols })
    }
}

/// PSNR in dB against a peak of 255; `f64::INFINITY` for identical images.
pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    if !a.same_shape(b) {
        return Err(RdhError::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let sse: u64 = a
        .pixels
        .iter()
        .zip(&b.pixels)
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum();
    if sse == 0 {
        return Ok(f64::INFINITY);
    }
    let mse = sse as f64 / a.pixels.len() as f64;
    Ok(10.0 * (255.0f64 * 255.0 / mse).log10())
}

// ---------------------------------------------------------------- PGM (P5)

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_whitespace_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\n' | b'\r' | 0x0b | 0x0c => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(RdhError::MalformedPgm(format!("missing {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| RdhError::MalformedPgm(format!("{what} out of range")))
    }
}

pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(RdhError::MalformedPgm("expected magic \"P5\"".into()));
    }
    let mut cur = HeaderCursor { bytes, pos: 2 };
    let cols = cur.number("width")? as usize;
    let rows = cur.number("height")? as usize;
    let maxval = cur.number("maxval")?;
    if maxval != 255 {
        return Err(RdhError::UnsupportedMaxval(maxval));
    }
    if cols == 0 || rows == 0 {
        return Err(RdhError::MalformedPgm("zero width or height".into()));
    }
    match bytes.get(cur.pos) {
        Some(c) if c.is_ascii_whitespace() => cur.pos += 1,
        _ => {
            return Err(RdhError::MalformedPgm(
                "expected a single whitespace byte after maxval".into(),
            ))
        }
    }
    let expected = rows * cols;
    let data = &bytes[cur.pos..];
    if data.len() < expected {
        return Err(RdhError::TruncatedPgm {
            expected,
            found: data.len(),
        });
    }
    GrayImage::new(rows, cols, data[..expected].to_vec())
}

pub fn save_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.cols, img.rows).into_bytes();
    out.extend_from_slice(&img.pixels);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prng::XorShift64Star;
    use proptest::prelude::*;

    fn random_image(rows: usize, cols: usize, seed: u64) -> GrayImage {
        let mut g = XorShift64Star::new(seed);
        GrayImage::from_fn(rows, cols, |_, _| g.next_u64() as u8).unwrap()
    }

    #[test]
    fn loads_minimal_p5() {
        let mut bytes = b"P5 2 2 255\n".to_vec();
        bytes.extend([0, 255, 17, 42]);
        let img = load_pgm(&bytes).unwrap();
        assert_eq!((img.rows(), img.cols()), (2, 2));
        assert_eq!(img.pixels(), &[0, 255, 17, 42]);
    }

    #[test]
    fn width_precedes_height() {
        let mut bytes = b"P5\n3 1\n255\n".to_vec();
        bytes.extend([1, 2, 3]);
        let img = load_pgm(&bytes).unwrap();
        assert_eq!((img.rows(), img.cols()), (1, 3));
    }

    #[test]
    fn accepts_comments() {
        let mut bytes = b"P5\n# made by hand\n2 # inline\n1\n255\n".to_vec();
        bytes.extend([9, 8]);
        assert_eq!(load_pgm(&bytes).unwrap().pixels(), &[9, 8]);
    }

    #[test]
    fn rejects_bad_headers() {
        assert!(matches!(
            load_pgm(b"P6 1 1 255\n\x00\x00\x00"),
            Err(RdhError::MalformedPgm(_))
        ));
        assert_eq!(
            load_pgm(b"P5 1 1 65535\n\x00\x00"),
            Err(RdhError::UnsupportedMaxval(65535))
        );
        assert_eq!(
            load_pgm(b"P5 2 2 255\n\x00\x01"),
            Err(RdhError::TruncatedPgm {
                expected: 4,
                found: 2
            })
        );
        assert!(load_pgm(b"P5 2").is_err());
        assert!(load_pgm(b"").is_err());
    }

    #[test]
    fn saves_minimal_image() {
        let img = GrayImage::new(1, 1, vec![7]).unwrap();
        let mut expected = b"P5\n1 1\n255\n".to_vec();
        expected.push(7);
        assert_eq!(save_pgm(&img), expected);
    }

    #[test]
    fn pgm_roundtrip_saturated() {
        let img = GrayImage::filled(5, 9, 255).unwrap();
        assert_eq!(load_pgm(&save_pgm(&img)).unwrap(), img);
    }

    #[test]
    fn split_two_by_two() {
        let img = GrayImage::new(2, 2, vec![1, 2, 3, 4]).unwrap();
        let (dot, cross) = split_checkerboard(&img);
        assert_eq!(dot.image().pixels(), &[1, 0, 0, 4]);
        assert_eq!(cross.image().pixels(), &[0, 2, 3, 0]);
        assert_eq!(dot.kept(), Parity::Dot);
    }

    #[test]
    fn split_sums_to_original() {
        let img = random_image(8, 8, 3);
        let (dot, cross) = split_checkerboard(&img);
        for i in 0..64 {
            let sum = dot.image().pixels()[i] as u16 + cross.image().pixels()[i] as u16;
            assert_eq!(sum, img.pixels()[i] as u16);
        }
        let zero = GrayImage::filled(4, 4, 0).unwrap();
        let (d, c) = split_checkerboard(&zero);
        assert!(d
            .image()
            .pixels()
            .iter()
            .chain(c.image().pixels())
            .all(|&v| v == 0));
    }

    #[test]
    fn merge_rejects_mismatches() {
        let a = SubImage::extract(&GrayImage::filled(4, 4, 1).unwrap(), Parity::Dot);
        let b = SubImage::extract(&GrayImage::filled(4, 6, 1).unwrap(), Parity::Cross);
        assert!(matches!(merge(&a, &b), Err(RdhError::DimensionMismatch(_))));
        assert!(matches!(merge(&a, &a), Err(RdhError::ParityMismatch(_))));
        let z = GrayImage::filled(3, 3, 0).unwrap();
        let (d, c) = split_checkerboard(&z);
        assert_eq!(merge(&d, &c).unwrap(), z);
    }

    #[test]
    fn subimage_new_validates_zeros() {
        let img = GrayImage::new(2, 2, vec![1, 2, 0, 4]).unwrap();
        assert!(SubImage::new(img, Parity::Dot).is_err());
    }

    #[test]
    fn rotate_two_by_three() {
        let img = GrayImage::new(2, 3, vec![1, 2, 3, 4, 5, 6]).unwrap();
        let cw = rotate90(&img, Rotation::Clockwise);
        assert_eq!((cw.rows(), cw.cols()), (3, 2));
        assert_eq!(cw.pixels(), &[4, 1, 5, 2, 6, 3]);
        assert_eq!(rotate90(&cw, Rotation::CounterClockwise), img);
    }

    #[test]
    fn rotation_direction_cases() {
        assert_eq!(rotation_direction(512, 512).unwrap(), Rotation::Clockwise);
        assert_eq!(
            rotation_direction(511, 512).unwrap(),
            Rotation::CounterClockwise
        );
        assert!(matches!(
            rotation_direction(511, 511),
            Err(RdhError::UnsupportedDimensions { .. })
        ));
    }

    #[test]
    fn rotated_dot_half_shows_cross_pattern() {
        for (rows, cols) in [(6, 7), (7, 6), (8, 8), (4, 9)] {
            let img = random_image(rows, cols, 11);
            let dir = rotation_direction(rows, cols).unwrap();
            let dot = SubImage::extract(&img, Parity::Dot);
            let rotated = dot.rotate(dir);
            assert_eq!(rotated.kept(), Parity::Cross, "{rows}x{cols}");
            // The rotated half must be a valid sub-image of the reported parity.
            assert!(SubImage::new(rotated.image().clone(), Parity::Cross).is_ok());
        }
    }

    #[test]
    fn psnr_cases() {
        let a = GrayImage::filled(3, 5, 100).unwrap();
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        let z = GrayImage::filled(1, 1, 0).unwrap();
        let w = GrayImage::filled(1, 1, 255).unwrap();
        assert!(psnr(&z, &w).unwrap().abs() < 1e-12);
        let b = GrayImage::filled(3, 5, 105).unwrap();
        let expected = 10.0 * (255.0f64 * 255.0 / 25.0).log10();
        assert!((psnr(&a, &b).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 34.1514).abs() < 1e-3);
        assert!(psnr(&a, &z).is_err());
    }

    proptest! {
        #[test]
        fn split_merge_is_identity(rows in 1usize..12, cols in 1usize..12, seed: u64) {
            let img = random_image(rows, cols, seed);
            let (d, c) = split_checkerboard(&img);
            prop_assert_eq!(merge(&d, &c).unwrap(), img.clone());
            prop_assert_eq!(merge(&c, &d).unwrap(), img);
        }

        #[test]
        fn rotations_invert(rows in 1usize..10, cols in 1usize..10, seed: u64) {
            let img = random_image(rows, cols, seed);
            let cw = rotate90(&img, Rotation::Clockwise);
            prop_assert_eq!(rotate90(&cw, Rotation::CounterClockwise), img.clone());
            let mut four = img.clone();
            for _ in 0..4 {
                four = rotate90(&four, Rotation::Clockwise);
            }
            prop_assert_eq!(four, img);
        }

        #[test]
        fn pgm_roundtrip(rows in 1usize..20, cols in 1usize..20, seed: u64) {
            let img = random_image(rows, cols, seed);
            prop_assert_eq!(load_pgm(&save_pgm(&img)).unwrap(), img);
        }
    }
}
