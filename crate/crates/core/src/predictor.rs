//! Predictor abstraction used by the codec, plus the classical baselines.
//!
//! Every predictor maps a context half-image to integer pixel predictions and
//! a complexity value for each interior position of the opposite parity.
//! Everything outside that support is 0.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::complexity::{is_interior, ComplexityMap};
use crate::error::{RdhError, Result};
use crate::image::{GrayImage, Parity, SubImage};
use crate::model::IcnnpModel;

#[derive(Debug, Clone, PartialEq)]
pub struct PredictorOutput {
    pixels: GrayImage,
    complexity: ComplexityMap,
    target: Parity,
}

impl PredictorOutput {
    pub fn new(pixels: GrayImage, complexity: ComplexityMap, target: Parity) -> Self {
        debug_assert_eq!(
            (pixels.rows(), pixels.cols()),
            (complexity.rows(), complexity.cols())
        );
        Self {
            pixels,
            complexity,
            target,
        }
    }

    pub fn pixels(&self) -> &GrayImage {
        &self.pixels
    }

    pub fn complexity(&self) -> &ComplexityMap {
        &self.complexity
    }

    pub fn target(&self) -> Parity {
        self.target
    }

    pub fn rows(&self) -> usize {
        self.pixels.rows()
    }

    pub fn cols(&self) -> usize {
        self.pixels.cols()
    }

    pub fn into_parts(self) -> (GrayImage, ComplexityMap) {
        (self.pixels, self.complexity)
    }
}

#[derive(Debug, Clone)]
pub enum PredictorKind {
    /// Learned pixel and complexity heads.
    Icnnp(Arc<IcnnpModel>),
    /// Learned pixel head, 4-neighbour variance for ordering.
    CnnPixelPlusLocalVariance(Arc<IcnnpModel>),
    /// Rounded 4-neighbour mean, 4-neighbour variance for ordering.
    Rhombus,
}

/// Predictor family without its parameters, as named on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KindName {
    Icnnp,
    CnnpLv,
    Rhombus,
}

impl KindName {
    pub fn needs_weights(self) -> bool {
        !matches!(self, KindName::Rhombus)
    }

    pub fn with_model(self, model: Option<Arc<IcnnpModel>>) -> Result<PredictorKind> {
        match (self, model) {
            (KindName::Rhombus, _) => Ok(PredictorKind::Rhombus),
            (KindName::Icnnp, Some(m)) => Ok(PredictorKind::Icnnp(m)),
            (KindName::CnnpLv, Some(m)) => Ok(PredictorKind::CnnPixelPlusLocalVariance(m)),
            (_, None) => Err(RdhError::InvalidConfig(format!(
                "predictor {self} needs a weight file"
            ))),
        }
    }
}

impl fmt::Display for KindName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KindName::Icnnp => "icnnp",
            KindName::CnnpLv => "cnnp-lv",
            KindName::Rhombus => "rhombus",
        })
    }
}

impl FromStr for KindName {
    type Err = RdhError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "icnnp" => Ok(KindName::Icnnp),
            "cnnp-lv" | "cnnp" => Ok(KindName::CnnpLv),
            "rhombus" => Ok(KindName::Rhombus),
            other => Err(RdhError::InvalidConfig(format!(
                "unknown predictor {other:?} (expected icnnp, cnnp-lv or rhombus)"
            ))),
        }
    }
}

impl PredictorKind {
    pub fn name(&self) -> KindName {
        match self {
            PredictorKind::Icnnp(_) => KindName::Icnnp,
            PredictorKind::CnnPixelPlusLocalVariance(_) => KindName::CnnpLv,
            PredictorKind::Rhombus => KindName::Rhombus,
        }
    }
}

pub fn predict_with(kind: &PredictorKind, context: &SubImage) -> Result<PredictorOutput> {
    match kind {
        PredictorKind::Icnnp(model) => model.predict(context),
        PredictorKind::CnnPixelPlusLocalVariance(model) => {
            let (pixels, _) = model.predict_pixels(context)?.into_parts();
            Ok(PredictorOutput::new(
                pixels,
                local_variance_map(context),
                context.kept().opposite(),
            ))
        }
        PredictorKind::Rhombus => Ok(rhombus_output(context)),
    }
}

fn check_position(context: &SubImage, row: usize, col: usize) -> Result<()> {
    if !is_interior(row, col, context.rows(), context.cols())
        || Parity::of(row, col) == context.kept()
    {
        return Err(RdhError::NotInterior { row, col });
    }
    Ok(())
}

#[inline]
fn neighbours(context: &SubImage, row: usize, col: usize) -> [u8; 4] {
    [
        context.get(row - 1, col),
        context.get(row, col - 1),
        context.get(row, col + 1),
        context.get(row + 1, col),
    ]
}

/// Mean of the four orthogonal neighbours, rounded half away from zero.
pub fn rhombus_predict(context: &SubImage, row: usize, col: usize) -> Result<u8> {
    check_position(context, row, col)?;
    let sum: u32 = neighbours(context, row, col)
        .iter()
        .map(|&v| v as u32)
        .sum();
    Ok(((sum + 2) / 4).min(255) as u8)
}

/// Population variance of the four orthogonal neighbours.
pub fn local_variance_complexity(context: &SubImage, row: usize, col: usize) -> Result<f64> {
    check_position(context, row, col)?;
    let n = neighbours(context, row, col).map(|v| v as f64);
    let mean = n.iter().sum::<f64>() / 4.0;
    Ok(n.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 4.0)
}

fn support(context: &SubImage) -> impl Iterator<Item = (usize, usize)> + '_ {
    let (rows, cols) = (context.rows(), context.cols());
    (1..rows.saturating_sub(1))
        .flat_map(move |r| (1..cols.saturating_sub(1)).map(move |c| (r, c)))
        .filter(move |&(r, c)| Parity::of(r, c) != context.kept())
}

fn local_variance_map(context: &SubImage) -> ComplexityMap {
    let mut map = ComplexityMap::zeros(context.rows(), context.cols());
    for (r, c) in support(context) {
        map.set(
            r,
            c,
            local_variance_complexity(context, r, c).expect("support position"),
        );
    }
    map
}

fn rhombus_output(context: &SubImage) -> PredictorOutput {
    let (rows, cols) = (context.rows(), context.cols());
    let mut pixels = GrayImage::filled(rows, cols, 0).expect("context is non-empty");
    for (r, c) in support(context) {
        pixels.set(
            r,
            c,
            rhombus_predict(context, r, c).expect("support position"),
        );
    }
    PredictorOutput::new(
        pixels,
        local_variance_map(context),
        context.kept().opposite(),
    )
}
