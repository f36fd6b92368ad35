//! `key = value` configuration for the network and its trainer.
//!
//! Lines starting with `#` and blank lines are ignored. Unknown keys are an
//! error so typos do not silently fall back to defaults.

use crate::error::{RdhError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct IcnnpConfig {
    pub branch_kernels: Vec<usize>,
    pub branch_channels: usize,
    pub head_channels: usize,
    pub leaky_slope: f32,
    /// Multiplier mapping 8-bit pixels into network units.
    pub pixel_scale: f32,
}

impl Default for IcnnpConfig {
    fn default() -> Self {
        Self {
            branch_kernels: vec![3, 5, 7],
            branch_channels: 32,
            head_channels: 32,
            leaky_slope: 0.01,
            pixel_scale: 1.0 / 255.0,
        }
    }
}

impl IcnnpConfig {
    /// Reduced widths for single-core training and tests.
    pub fn desk() -> Self {
        Self {
            branch_channels: 8,
            head_channels: 16,
            ..Self::default()
        }
    }

    pub fn trunk_channels(&self) -> usize {
        self.branch_kernels.len() * self.branch_channels
    }

    pub fn validate(&self) -> Result<()> {
        if self.branch_kernels.is_empty() {
            return Err(RdhError::InvalidConfig("no feature branches".into()));
        }
        if let Some(k) = self.branch_kernels.iter().find(|&&k| k % 2 == 0 || k == 0) {
            return Err(RdhError::InvalidConfig(format!(
                "branch kernel {k} is not odd"
            )));
        }
        if self.branch_channels == 0 || self.head_channels == 0 {
            return Err(RdhError::InvalidConfig(
                "channel counts must be positive".into(),
            ));
        }
        if !(self.leaky_slope > 0.0 && self.leaky_slope < 1.0) {
            return Err(RdhError::InvalidConfig(
                "leaky_slope must be in (0, 1)".into(),
            ));
        }
        if !(self.pixel_scale > 0.0) {
            return Err(RdhError::InvalidConfig(
                "pixel_scale must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub lr: f32,
    pub batch: usize,
    pub weight_decay: f32,
    pub epochs: usize,
    /// Side of the square training tiles; even so tiles keep the checkerboard phase.
    pub crop: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            batch: 4,
            weight_decay: 1e-3,
            epochs: 5,
            crop: 32,
            seed: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch == 0 {
            return Err(RdhError::InvalidConfig("batch must be >= 1".into()));
        }
        if !(self.weight_decay >= 0.0) {
            return Err(RdhError::InvalidConfig("weight_decay must be >= 0".into()));
        }
        if !(self.lr > 0.0) {
            return Err(RdhError::InvalidConfig("lr must be positive".into()));
        }
        if self.crop < 8 || self.crop % 2 != 0 {
            return Err(RdhError::InvalidConfig("crop must be even and >= 8".into()));
        }
        Ok(())
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| RdhError::InvalidConfig(format!("bad value for {key}: {value:?}")))
}

/// Parses a combined network + trainer config, starting from the given defaults.
pub fn parse_config(
    text: &str,
    mut net: IcnnpConfig,
    mut train: TrainConfig,
) -> Result<(IcnnpConfig, TrainConfig)> {
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            RdhError::InvalidConfig(format!("line {}: expected key=value", lineno + 1))
        })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "branch_kernels" => {
                net.branch_kernels = value
                    .split(',')
                    .map(|v| parse(key, v.trim()))
                    .collect::<Result<_>>()?
            }
            "branch_channels" => net.branch_channels = parse(key, value)?,
            "head_channels" => net.head_channels = parse(key, value)?,
            "leaky_slope" => net.leaky_slope = parse(key, value)?,
            "pixel_scale" => net.pixel_scale = parse(key, value)?,
            "lr" => train.lr = parse(key, value)?,
            "batch" => train.batch = parse(key, value)?,
            "weight_decay" => train.weight_decay = parse(key, value)?,
            "epochs" => train.epochs = parse(key, value)?,
            "crop" => train.crop = parse(key, value)?,
            "seed" => train.seed = parse(key, value)?,
            other => {
                return Err(RdhError::InvalidConfig(format!(
                    "line {}: unknown key {other:?}",
                    lineno + 1
                )))
            }
        }
    }
    net.validate()?;
    train.validate()?;
    Ok((net, train))
}

pub fn format_config(net: &IcnnpConfig, train: &TrainConfig) -> String {
    let kernels: Vec<String> = net.branch_kernels.iter().map(|k| k.to_string()).collect();
    format!(
        "branch_kernels={}\nbranch_channels={}\nhead_channels={}\nleaky_slope={}\npixel_scale={}\n\
         lr={}\nbatch={}\nweight_decay={}\nepochs={}\ncrop={}\nseed={}\n",
        kernels.join(","),
        net.branch_channels,
        net.head_channels,
        net.leaky_slope,
        net.pixel_scale,
        train.lr,
        train.batch,
        train.weight_decay,
        train.epochs,
        train.crop,
        train.seed
    )
}
