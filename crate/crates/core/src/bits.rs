//! MSB-first bit strings, readers and writers, and Elias-delta integer codes.

use std::fmt;

use crate::error::{Error, Result};

/// A bit string packed most-significant-bit first into bytes.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Bits {
    bytes: Vec<u8>,
    len: usize,
}

impl Bits {
    pub fn new() -> Self {
        Self::default()
    }

    /// Wraps packed bytes; `len` may be shorter than `8 * bytes.len()`.
    pub fn from_bytes(bytes: Vec<u8>, len: usize) -> Result<Self> {
        if len > bytes.len() * 8 || bytes.len() != len.div_ceil(8) {
            return Err(Error::format(format!(
                "{} bytes cannot hold exactly {len} bits",
                bytes.len()
            )));
        }
        let mut bits = Self { bytes, len };
        bits.clear_padding();
        Ok(bits)
    }

    /// Parses a string of `0` and `1` characters.
    pub fn parse01(s: &str) -> Result<Self> {
        let mut w = BitWriter::new();
        for c in s.chars().filter(|c| !c.is_whitespace()) {
            match c {
                '0' => w.push(false),
                '1' => w.push(true),
                other => return Err(Error::format(format!("unexpected character {other:?} in bit string"))),
            }
        }
        Ok(w.finish())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    /// Bit at 0-based position `i`.
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.bytes[i / 8] & (0x80 >> (i % 8)) != 0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Number of ones in the 1-based prefix `1..=x`, counted by a linear scan.
    pub fn rank1(&self, x: usize) -> usize {
        (0..x.min(self.len)).filter(|&i| self.get(i)).count()
    }

    pub fn count_ones(&self) -> usize {
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    fn clear_padding(&mut self) {
        let used = self.len % 8;
        if used != 0 {
            if let Some(last) = self.bytes.last_mut() {
                *last &= 0xFFu8 << (8 - used);
            }
        }
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({self})")
    }
}

#[derive(Debug, Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    len: usize,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    /// Writes the low `count` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, count: u32) {
        debug_assert!(count <= 64);
        for i in (0..count).rev() {
            self.push((value >> i) & 1 == 1);
        }
    }

    /// Elias-delta code of `value`; `value` must be at least 1.
    pub fn push_elias_delta(&mut self, value: u64) {
        assert!(value >= 1, "Elias-delta codes positive integers only");
        let len = 64 - value.leading_zeros();
        let len_len = 32 - len.leading_zeros();
        self.push_bits(0, len_len - 1);
        self.push_bits(len as u64, len_len);
        self.push_bits(value, len - 1);
    }

    /// Pads with zeros up to the next byte boundary.
    pub fn align(&mut self) {
        self.len = self.bytes.len() * 8;
    }

    pub fn finish(self) -> Bits {
        Bits { bytes: self.bytes, len: self.len }
    }
}

/// Length in bits of the Elias-delta code of `value`.
pub fn elias_delta_len(value: u64) -> usize {
    assert!(value >= 1);
    let len = 64 - value.leading_zeros();
    let len_len = 32 - len.leading_zeros();
    (2 * len_len - 1 + len - 1) as usize
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    len: usize,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, len: bytes.len() * 8, pos: 0 }
    }

    pub fn from_bits(bits: &'a Bits) -> Self {
        Self { bytes: &bits.bytes, len: bits.len, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.len - self.pos
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        if self.pos >= self.len {
            return Err(Error::Truncated);
        }
        let bit = self.bytes[self.pos / 8] & (0x80 >> (self.pos % 8)) != 0;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, count: u32) -> Result<u64> {
        debug_assert!(count <= 64);
        let mut v = 0u64;
        for _ in 0..count {
            v = (v << 1) | self.read_bit()? as u64;
        }
        Ok(v)
    }

    pub fn read_elias_delta(&mut self) -> Result<u64> {
        let mut zeros = 0u32;
        while !self.read_bit()? {
            zeros += 1;
            if zeros > 6 {
                return Err(Error::format("Elias-delta length prefix too long"));
            }
        }
        let len = ((1u64 << zeros) | self.read_bits(zeros)?) as u32;
        if len == 0 || len > 64 {
            return Err(Error::format("Elias-delta value exceeds 64 bits"));
        }
        let low = self.read_bits(len - 1)?;
        Ok(if len == 64 { (1u64 << 63) | low } else { (1u64 << (len - 1)) | low })
    }

    /// Skips to the next byte boundary.
    pub fn align(&mut self) {
        self.pos = self.pos.div_ceil(8) * 8;
        self.pos = self.pos.min(self.len);
    }
}
