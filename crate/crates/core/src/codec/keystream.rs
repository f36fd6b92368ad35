//! Payload encryption and byte/bit conversion.

use crate::prng::XorShift64Star;

/// XORs `bits` with the xorshift64* keystream seeded by `key`. Self-inverse.
pub fn keystream_xor(bits: &[bool], key: u64) -> Vec<bool> {
    let stream = XorShift64Star::new(key).bits(bits.len());
    bits.iter().zip(stream).map(|(&b, k)| b ^ k).collect()
}

/// Bits of `bytes`, most significant first.
pub fn bytes_to_bits(bytes: &[u8]) -> Vec<bool> {
    bytes
        .iter()
        .flat_map(|&byte| (0..8).map(move |k| (byte >> (7 - k)) & 1 == 1))
        .collect()
}

/// Packs bits most significant first; a trailing partial byte is zero-padded.
pub fn bits_to_bytes(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (k, &b)| acc | ((b as u8) << (7 - k)))
        })
        .collect()
}
