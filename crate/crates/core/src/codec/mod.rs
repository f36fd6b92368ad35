//! Reversible double-embedding histogram-shifting codec.

mod header;
mod keystream;
mod pass;
mod pipeline;
mod plan;
mod scalar;

pub use header::{AuxHeader, HEADER_BITS};
pub use keystream::{bits_to_bytes, bytes_to_bits, keystream_xor};
pub use pass::{embed_pass, extract_pass};
pub use pipeline::{
    embed, embed_with, extract, CodecOptions, EmbedOutcome, Extracted, PassReport, MIN_SIDE,
};
pub use plan::{
    candidates, compute_errors, max_capacity, select_plan, sort_candidates, Candidate, EmbedPlan,
    ErrorMap, DEFAULT_THRESHOLD_CAP,
};
pub use scalar::{ambiguity_margin, classify, embed_error, needs_flag, recover_error, Slot};
