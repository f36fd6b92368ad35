pub mod bench;
pub mod codec;
pub mod complexity;
pub mod error;
pub mod image;
pub mod model;
pub mod predictor;
pub mod prng;
pub mod synth;
pub mod tensor;
