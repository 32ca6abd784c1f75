use std::fmt;

use crate::error::{Error, Result};

use super::tree::DecodeTree;

/// Longest code a one-byte length field can describe.
pub const MAX_CODE_LEN: usize = 255;

/// A prefix code of up to 255 bits.
///
/// The bits are held as a 256-bit unsigned integer (`words[0]` most
/// significant) whose low `len` bits are the code, first-transmitted bit
/// highest.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Codeword {
    words: [u64; 4],
    len: u8,
}

impl Codeword {
    pub fn len(&self) -> u32 {
        self.len as u32
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit `i` counted from the first transmitted bit.
    pub fn bit(&self, i: u32) -> u32 {
        debug_assert!(i < self.len());
        self.raw_bit(self.len() - 1 - i)
    }

    fn raw_bit(&self, from_lsb: u32) -> u32 {
        let word = 3 - (from_lsb / 64) as usize;
        ((self.words[word] >> (from_lsb % 64)) & 1) as u32
    }

    /// `count` bits (≤ 56) starting `lo` bits above the least significant.
    fn chunk(&self, lo: u32, count: u32) -> u64 {
        let mut v = 0u64;
        for i in (lo..lo + count).rev() {
            v = (v << 1) | self.raw_bit(i) as u64;
        }
        v
    }

    /// The code as a `u64` when it fits, for the common short-code path.
    #[inline]
    pub fn low_bits(&self) -> u64 {
        self.words[3]
    }

    pub fn from_bits(bits: &[u32]) -> Self {
        let mut c = Codeword::default();
        for &b in bits {
            c.shl(1);
            c.words[3] |= (b & 1) as u64;
            c.len += 1;
        }
        c
    }

    pub fn is_prefix_of(&self, other: &Codeword) -> bool {
        self.len <= other.len && (0..self.len()).all(|i| self.bit(i) == other.bit(i))
    }

    fn shl(&mut self, n: u32) {
        for _ in 0..n {
            let mut carry = 0u64;
            for w in self.words.iter_mut().rev() {
                let next = *w >> 63;
                *w = (*w << 1) | carry;
                carry = next;
            }
        }
    }

    fn increment(&mut self) {
        for w in self.words.iter_mut().rev() {
            let (v, overflow) = w.overflowing_add(1);
            *w = v;
            if !overflow {
                break;
            }
        }
    }

    /// Emits the code into an MSB-first writer.
    #[inline]
    pub(crate) fn write_to(&self, writer: &mut crate::bits::BitWriter<'_>) {
        let len = self.len();
        if len <= 56 {
            writer.write_bits(self.words[3], len);
            return;
        }
        let mut remaining = len;
        while remaining > 0 {
            let n = remaining.min(32);
            writer.write_bits(self.chunk(remaining - n, n), n);
            remaining -= n;
        }
    }
}

impl fmt::Debug for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Codeword(\"{self}\")")
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.bit(i) == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Per-symbol canonical prefix codes; the encoder's lookup structure.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CodeTable {
    lengths: [u8; 256],
    codes: [Codeword; 256],
}

/// How a set of code lengths relates to a complete prefix code.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LengthsShape {
    /// No symbol present.
    Empty,
    /// Exactly one symbol, with length 1.
    Degenerate(u8),
    /// Kraft sum is exactly one.
    Complete,
}

/// Checks lengths for Kraft equality without big-number arithmetic: codes
/// at each depth pair up into their parents, which must leave exactly one
/// node at the root.
pub fn classify_lengths(lengths: &[u8; 256]) -> Result<LengthsShape> {
    let present: Vec<u8> = (0..=255u8).filter(|&s| lengths[s as usize] > 0).collect();
    match present.len() {
        0 => return Ok(LengthsShape::Empty),
        1 => {
            let s = present[0];
            return if lengths[s as usize] == 1 {
                Ok(LengthsShape::Degenerate(s))
            } else {
                Err(Error::MalformedCodebook(format!(
                    "single symbol 0x{s:02x} must have length 1, found {}",
                    lengths[s as usize]
                )))
            };
        }
        _ => {}
    }
    let mut per_len = [0u32; MAX_CODE_LEN + 1];
    for &s in &present {
        per_len[lengths[s as usize] as usize] += 1;
    }
    let mut nodes = 0u32;
    for depth in (1..=MAX_CODE_LEN).rev() {
        let here = per_len[depth] + nodes;
        if !here.is_multiple_of(2) {
            return Err(Error::MalformedCodebook(format!(
                "code lengths violate Kraft equality at depth {depth}"
            )));
        }
        nodes = here / 2;
    }
    if nodes != 1 {
        return Err(Error::MalformedCodebook(
            "code lengths over-subscribe the code space".into(),
        ));
    }
    Ok(LengthsShape::Complete)
}

impl CodeTable {
    /// Assigns canonical codes: symbols sorted by (length, value) receive
    /// consecutive code values, shifted left whenever the length grows.
    pub fn from_lengths(lengths: &[u8; 256]) -> Result<Self> {
        if classify_lengths(lengths)? == LengthsShape::Empty {
            return Err(Error::MalformedCodebook("no symbol has a code".into()));
        }
        let mut order: Vec<u8> = (0..=255u8).filter(|&s| lengths[s as usize] > 0).collect();
        order.sort_by_key(|&s| (lengths[s as usize], s));

        let mut codes = [Codeword::default(); 256];
        let mut next = Codeword::default();
        let mut prev_len = 0u32;
        for (i, &s) in order.iter().enumerate() {
            let len = lengths[s as usize] as u32;
            if i > 0 {
                next.increment();
            }
            next.shl(len - prev_len);
            next.len = len as u8;
            prev_len = len;
            codes[s as usize] = next;
        }
        Ok(Self {
            lengths: *lengths,
            codes,
        })
    }

    pub fn lengths(&self) -> &[u8; 256] {
        &self.lengths
    }

    pub fn length(&self, symbol: u8) -> u32 {
        self.lengths[symbol as usize] as u32
    }

    pub fn code(&self, symbol: u8) -> Option<&Codeword> {
        let c = &self.codes[symbol as usize];
        (!c.is_empty()).then_some(c)
    }

    #[inline]
    pub(crate) fn raw_code(&self, symbol: u8) -> &Codeword {
        &self.codes[symbol as usize]
    }

    /// Present symbols with their codes, ascending by symbol value.
    pub fn entries(&self) -> impl Iterator<Item = (u8, &Codeword)> + '_ {
        (0..=255u8).filter_map(move |s| self.code(s).map(|c| (s, c)))
    }

    pub fn is_degenerate(&self) -> bool {
        self.entries().count() == 1
    }
}

/// Derives the canonical code table for a tree. Only the leaf depths are
/// kept; bit patterns are reassigned canonically.
pub fn derive_codes(tree: &DecodeTree) -> CodeTable {
    CodeTable::from_lengths(&tree.leaf_depths())
        .expect("leaf depths of a well-formed tree satisfy Kraft equality")
}
