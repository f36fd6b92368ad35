//! Per-pass auxiliary data stored in the LSBs of a reserved border row.
//!
//! Layout (big-endian, 112 bits): `t_p: u8`, `|t_n|: u8`,
//! `selected_count: u32`, `payload_bit_count: u32`, `map_bit_count: u32`,
//! followed by the overflow map. Remaining LSBs of the row are zero.

use crate::error::{RdhError, Result};

pub const HEADER_BITS: usize = 112;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxHeader {
    pub t_p: u8,
    pub t_n_abs: u8,
    pub selected_count: u32,
    /// Encrypted payload bits carried by the pass, excluding the displaced row LSBs.
    pub payload_bit_count: u32,
    pub overflow_map: Vec<bool>,
}

fn push_be(out: &mut Vec<bool>, value: u32, width: usize) {
    out.extend((0..width).rev().map(|k| (value >> k) & 1 == 1));
}

fn read_be(bits: &[bool]) -> u32 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as u32)
}

impl AuxHeader {
    pub fn t_p(&self) -> i32 {
        self.t_p as i32
    }

    pub fn t_n(&self) -> i32 {
        -(self.t_n_abs as i32)
    }

    pub fn bit_len(&self) -> usize {
        HEADER_BITS + self.overflow_map.len()
    }

    pub fn to_bits(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.bit_len());
        push_be(&mut out, self.t_p as u32, 8);
        push_be(&mut out, self.t_n_abs as u32, 8);
        push_be(&mut out, self.selected_count, 32);
        push_be(&mut out, self.payload_bit_count, 32);
        push_be(&mut out, self.overflow_map.len() as u32, 32);
        out.extend_from_slice(&self.overflow_map);
        out
    }

    /// Parses a reserved row's LSBs; trailing bits are ignored.
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        if bits.len() < HEADER_BITS {
            return Err(RdhError::CorruptHeader(format!(
                "row holds {} bits, header needs {HEADER_BITS}",
                bits.len()
            )));
        }
        let t_p = read_be(&bits[0..8]) as u8;
        let t_n_abs = read_be(&bits[8..16]) as u8;
        let selected_count = read_be(&bits[16..48]);
        let payload_bit_count = read_be(&bits[48..80]);
        let map_len = read_be(&bits[80..112]) as usize;
        if t_n_abs == 0 || t_p >= 128 || t_n_abs > 128 {
            return Err(RdhError::CorruptHeader(format!(
                "thresholds t_p={t_p} t_n=-{t_n_abs} out of range"
            )));
        }
        if map_len > bits.len() - HEADER_BITS {
            return Err(RdhError::CorruptHeader(format!(
                "overflow map of {map_len} bits does not fit in the row"
            )));
        }
        Ok(Self {
            t_p,
            t_n_abs,
            selected_count,
            payload_bit_count,
            overflow_map: bits[HEADER_BITS..HEADER_BITS + map_len].to_vec(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_with_padding() {
        let h = AuxHeader {
            t_p: 3,
            t_n_abs: 16,
            selected_count: 70_000,
            payload_bit_count: 0xDEAD_BEEF,
            overflow_map: vec![true, false, true],
        };
        let mut bits = h.to_bits();
        assert_eq!(bits.len(), 115);
        assert_eq!(
            &bits[..8],
            &[false, false, false, false, false, false, true, true]
        );
        bits.extend([true; 20]);
        assert_eq!(AuxHeader::from_bits(&bits).unwrap(), h);
    }

    #[test]
    fn rejects_garbage() {
        assert!(AuxHeader::from_bits(&[false; 100]).is_err());
        // |t_n| = 0
        assert!(AuxHeader::from_bits(&[false; 128]).is_err());
        let mut bits = AuxHeader {
            t_p: 0,
            t_n_abs: 1,
            selected_count: 0,
            payload_bit_count: 0,
            overflow_map: vec![],
        }
        .to_bits();
        bits[100] = true;
        assert!(matches!(
            AuxHeader::from_bits(&bits),
            Err(RdhError::CorruptHeader(_))
        ));
    }
}
