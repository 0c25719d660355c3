//! Renormalizing integer range coder over exact frequency models.
//!
//! The coder keeps a 64-bit `low` and a 64-bit `range` that is renormalized
//! back above 2^56 by shifting out one byte at a time. A carry out of `low`
//! is propagated into the bytes already emitted. Frequency totals are capped
//! at 2^24, so `range / total` is at least 2^32 and the truncation loss per
//! symbol is below 2^-31 bits.
//!
//! [`RangeEncoder::finish`] emits two more bytes, chosen so that the message
//! decodes correctly whatever bytes follow them. The decoder reads zeros
//! past the end of its input but allows at most six such bytes, which is
//! exactly what a complete stream needs; reading further means the input
//! was truncated.

use crate::error::{Error, Result};

/// Largest permitted sum of frequencies in a model.
pub const MAX_TOTAL: u32 = 1 << 24;

const TOP: u64 = 1 << 56;
const FLUSH_BYTES: usize = 2;
/// Bytes the decoder may read beyond its input: 8 to prime `code` minus the
/// flush bytes the encoder wrote.
const MAX_OVERRUN: usize = 8 - FLUSH_BYTES;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolModel {
    /// `cumulative[s]..cumulative[s + 1]` is the slot of symbol `s`.
    cumulative: Vec<u32>,
}

impl SymbolModel {
    pub fn new(freqs: &[u32]) -> Result<Self> {
        if freqs.len() < 2 {
            return Err(Error::Model(format!("need at least 2 symbols, got {}", freqs.len())));
        }
        let mut cumulative = Vec::with_capacity(freqs.len() + 1);
        cumulative.push(0u32);
        let mut total = 0u64;
        for (s, &f) in freqs.iter().enumerate() {
            if f == 0 {
                return Err(Error::Model(format!("symbol {s} has zero frequency")));
            }
            total += f as u64;
            if total > MAX_TOTAL as u64 {
                return Err(Error::Model(format!("frequency total exceeds {MAX_TOTAL}")));
            }
            cumulative.push(total as u32);
        }
        Ok(Self { cumulative })
    }

    pub fn uniform(symbols: usize) -> Result<Self> {
        Self::new(&vec![1; symbols])
    }

    pub fn symbols(&self) -> usize {
        self.cumulative.len() - 1
    }

    pub fn total(&self) -> u32 {
        *self.cumulative.last().unwrap()
    }

    pub fn freq(&self, symbol: usize) -> u32 {
        self.cumulative[symbol + 1] - self.cumulative[symbol]
    }

    /// Information content of `symbol` under this model, in bits.
    pub fn cost_bits(&self, symbol: usize) -> f64 {
        (self.total() as f64 / self.freq(symbol) as f64).log2()
    }

    fn slot(&self, symbol: usize) -> (u64, u64, bool) {
        assert!(symbol < self.symbols(), "symbol {symbol} out of range for a {}-symbol model", self.symbols());
        let start = self.cumulative[symbol] as u64;
        let freq = self.freq(symbol) as u64;
        (start, freq, symbol + 1 == self.symbols())
    }

    fn find(&self, target: u32) -> usize {
        // largest s with cumulative[s] <= target
        self.cumulative.partition_point(|&c| c <= target) - 1
    }
}

#[derive(Clone, Debug)]
pub struct RangeEncoder {
    low: u64,
    range: u64,
    out: Vec<u8>,
    symbols: u64,
    ideal_bits: f64,
}

impl Default for RangeEncoder {
    fn default() -> Self {
        Self::new()
    }
}

impl RangeEncoder {
    pub fn new() -> Self {
        Self { low: 0, range: u64::MAX, out: Vec::new(), symbols: 0, ideal_bits: 0.0 }
    }

    /// Narrows the interval to `symbol`'s slot. Panics if `symbol` is not in
    /// the model.
    pub fn encode(&mut self, model: &SymbolModel, symbol: usize) {
        let (start, freq, last) = model.slot(symbol);
        let r = self.range / model.total() as u64;
        let offset = r * start;
        let (low, carry) = self.low.overflowing_add(offset);
        if carry {
            self.propagate_carry();
        }
        self.low = low;
        // The last symbol absorbs the division remainder.
        self.range = if last { self.range - offset } else { r * freq };
        while self.range < TOP {
            self.out.push((self.low >> 56) as u8);
            self.low <<= 8;
            self.range <<= 8;
        }
        self.symbols += 1;
        self.ideal_bits += model.cost_bits(symbol);
    }

    /// Symbols encoded so far.
    pub fn symbol_count(&self) -> u64 {
        self.symbols
    }

    /// Sum of `log2(total / freq)` over the symbols encoded so far.
    pub fn ideal_bits(&self) -> f64 {
        self.ideal_bits
    }

    /// Terminates the stream. An empty message produces no bytes.
    pub fn finish(mut self) -> Vec<u8> {
        if self.symbols == 0 {
            return Vec::new();
        }
        // Round low up to a multiple of 2^48: the result plus any 48-bit
        // tail still lies below low + range, since range >= 2^56.
        const GRAIN: u64 = 1 << 48;
        let (v, carry) = self.low.overflowing_add(GRAIN - 1);
        if carry {
            self.propagate_carry();
        }
        let v = v & !(GRAIN - 1);
        self.out.push((v >> 56) as u8);
        self.out.push((v >> 48) as u8);
        self.out
    }

    fn propagate_carry(&mut self) {
        for byte in self.out.iter_mut().rev() {
            let (b, overflow) = byte.overflowing_add(1);
            *byte = b;
            if !overflow {
                return;
            }
        }
        debug_assert!(false, "carry past the start of the stream");
    }
}

#[derive(Clone, Debug)]
pub struct RangeDecoder<'a> {
    input: &'a [u8],
    pos: usize,
    code: u64,
    range: u64,
}

impl<'a> RangeDecoder<'a> {
    pub fn new(input: &'a [u8]) -> Self {
        let mut d = Self { input, pos: 0, code: 0, range: u64::MAX };
        for _ in 0..8 {
            d.code = (d.code << 8) | d.next_byte() as u64;
        }
        d
    }

    /// Bytes consumed, including the zero bytes read past the end.
    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn decode(&mut self, model: &SymbolModel) -> Result<usize> {
        let total = model.total();
        let r = self.range / total as u64;
        let target = (self.code / r).min(total as u64 - 1) as u32;
        let symbol = model.find(target);
        let (start, freq, last) = model.slot(symbol);
        let offset = r * start;
        self.code -= offset;
        self.range = if last { self.range - offset } else { r * freq };
        while self.range < TOP {
            self.code = (self.code << 8) | self.next_byte() as u64;
            self.range <<= 8;
        }
        if self.pos > self.input.len() + MAX_OVERRUN {
            return Err(Error::Truncated);
        }
        Ok(symbol)
    }

    fn next_byte(&mut self) -> u8 {
        let b = self.input.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        b
    }
}
