//! The learned predictor: multi-scale feature extraction feeding a pixel head
//! and a complexity head, and its two-stage trainer.

mod config;
mod network;
mod train;

pub use config::{format_config, parse_config, IcnnpConfig, TrainConfig};
pub use network::{Head, IcnnpModel, MIN_SIDE};
pub use train::{complexity_objective, train_stage1, train_stage2, TrainReport};
