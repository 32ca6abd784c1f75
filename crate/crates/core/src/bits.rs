//! MSB-first bit packing.
//!
//! Bits fill each byte from the most significant position down, and bytes
//! follow stream order, so a code written as `110` followed by `0` lands in
//! the first byte as `0b1100_0000`.

use crate::error::{Error, Result};

/// Writes MSB-first bits into a caller-provided buffer.
///
/// The buffer must be large enough for every bit written; unwritten tail
/// bytes are left untouched, so pre-zeroed buffers yield zero pad bits.
pub struct BitWriter<'a> {
    out: &'a mut [u8],
    pos: usize,
    acc: u64,
    pending: u32,
}

impl<'a> BitWriter<'a> {
    pub fn new(out: &'a mut [u8]) -> Self {
        Self {
            out,
            pos: 0,
            acc: 0,
            pending: 0,
        }
    }

    /// Appends the low `count` bits of `value`, most significant first.
    /// `count` must be at most 56.
    #[inline]
    pub fn write_bits(&mut self, value: u64, count: u32) {
        debug_assert!(count <= 56);
        if count == 0 {
            return;
        }
        self.acc = (self.acc << count) | (value & ((1u64 << count) - 1));
        self.pending += count;
        while self.pending >= 8 {
            self.pending -= 8;
            self.out[self.pos] = (self.acc >> self.pending) as u8;
            self.pos += 1;
        }
    }

    /// Flushes a partially filled byte, padding with zero bits.
    /// Returns the number of bytes touched.
    pub fn finish(mut self) -> usize {
        if self.pending > 0 {
            self.out[self.pos] = (self.acc << (8 - self.pending)) as u8;
            self.pos += 1;
            self.pending = 0;
        }
        self.pos
    }
}

/// Reads MSB-first bits from a byte slice, stopping at a declared bit count.
pub struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
    cache: u64,
    cached: u32,
    remaining: u64,
    consumed: u64,
}

impl<'a> BitReader<'a> {
    /// Fails if `bit_count` exceeds the bits available in `data`.
    pub fn new(data: &'a [u8], bit_count: u64) -> Result<Self> {
        let available = data.len() as u64 * 8;
        if bit_count > available {
            return Err(Error::TruncatedStream {
                consumed: available,
                declared: bit_count,
            });
        }
        Ok(Self {
            data,
            pos: 0,
            cache: 0,
            cached: 0,
            remaining: bit_count,
            consumed: 0,
        })
    }

    #[inline]
    fn refill(&mut self) {
        while self.cached <= 56 && self.pos < self.data.len() {
            self.cache |= (self.data[self.pos] as u64) << (56 - self.cached);
            self.cached += 8;
            self.pos += 1;
        }
    }

    /// Next bit (0 or 1), or `None` once the declared bit count is consumed.
    #[inline]
    pub fn read_bit(&mut self) -> Option<u32> {
        if self.remaining == 0 {
            return None;
        }
        if self.cached == 0 {
            self.refill();
        }
        let bit = (self.cache >> 63) as u32;
        self.cache <<= 1;
        self.cached -= 1;
        self.remaining -= 1;
        self.consumed += 1;
        Some(bit)
    }

    /// Next `count` bits (at most 32) without consuming them. Only valid
    /// while `remaining() >= count`.
    #[inline]
    pub fn peek(&mut self, count: u32) -> u32 {
        debug_assert!(count <= 32 && self.remaining >= count as u64);
        if self.cached < count {
            self.refill();
        }
        (self.cache >> (64 - count)) as u32
    }

    /// Consumes `count` bits already made available by [`peek`](Self::peek).
    #[inline]
    pub fn skip(&mut self, count: u32) {
        debug_assert!(count <= self.cached);
        self.cache <<= count;
        self.cached -= count;
        self.remaining -= count as u64;
        self.consumed += count as u64;
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    pub fn is_exhausted(&self) -> bool {
        self.remaining == 0
    }

    pub fn consumed(&self) -> u64 {
        self.consumed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msb_first_packing() {
        let mut buf = [0u8; 2];
        let mut w = BitWriter::new(&mut buf);
        w.write_bits(0b110, 3);
        w.write_bits(0b0, 1);
        w.write_bits(0b1, 1);
        assert_eq!(w.finish(), 1);
        assert_eq!(buf, [0b1100_1000, 0]);
    }

    #[test]
    fn crosses_byte_boundaries() {
        let mut buf = [0u8; 5];
        let mut w = BitWriter::new(&mut buf);
        w.write_bits(0x1ff, 9);
        w.write_bits(0x3, 2);
        w.write_bits(0xabcdef, 24);
        let n = w.finish();
        assert_eq!(n, 5);
        let mut r = BitReader::new(&buf, 35).unwrap();
        let mut got = 0u64;
        while let Some(b) = r.read_bit() {
            got = (got << 1) | b as u64;
        }
        assert_eq!(got, (0x1ffu64 << 26) | (0x3 << 24) | 0xabcdef);
        assert!(r.is_exhausted());
    }

    #[test]
    fn reader_stops_at_declared_count() {
        let data = [0xffu8];
        let mut r = BitReader::new(&data, 3).unwrap();
        assert_eq!(r.read_bit(), Some(1));
        assert_eq!(r.read_bit(), Some(1));
        assert_eq!(r.read_bit(), Some(1));
        assert_eq!(r.read_bit(), None);
        assert_eq!(r.consumed(), 3);
    }

    #[test]
    fn peek_and_skip() {
        let data = [0b1011_0011, 0b1100_0000];
        let mut r = BitReader::new(&data, 12).unwrap();
        assert_eq!(r.peek(4), 0b1011);
        r.skip(3);
        assert_eq!(r.peek(7), 0b100_1111);
        r.skip(7);
        assert_eq!(r.remaining(), 2);
        assert_eq!(r.read_bit(), Some(0));
        assert_eq!(r.read_bit(), Some(0));
        assert_eq!(r.read_bit(), None);
    }

    #[test]
    fn reader_rejects_overlong_count() {
        assert!(matches!(
            BitReader::new(&[0u8; 2], 17),
            Err(Error::TruncatedStream { .. })
        ));
    }
}
