//! Independently decodable blocks.
//!
//! A block record on the wire is a 4-byte little-endian bit count followed
//! by the MSB-first packed codes, zero-padded to the next 4-byte boundary:
//!
//! ```text
//! [bit_length: u32 LE][payload: ceil(bit_length / 32) * 4 bytes]
//! ```
//!
//! The bit count is computed by a pre-pass that sums code lengths, so the
//! record size of every block is known before any bits are written.

use crate::error::{Error, Result};
use crate::huffman::{encoded_bit_length, walk_codes, write_codes, CodeTable, DecodeTree};

pub const DELIMITER_BYTES: usize = 4;

/// Largest allowed symbols per block. At the 255-bit maximum code length
/// this keeps every block's bit count below 2^32.
pub const MAX_BLOCK_SYMBOLS: u32 = 1 << 24;

/// Payload bytes for a block of `bit_length` bits.
#[inline]
pub fn padded_payload_len(bit_length: u64) -> usize {
    (bit_length.div_ceil(32) * 4) as usize
}

/// Delimiter plus padded payload.
#[inline]
pub fn record_len(bit_length: u64) -> usize {
    DELIMITER_BYTES + padded_payload_len(bit_length)
}

/// Bits a block record spends beyond its coded payload: the delimiter plus
/// tail padding. Always within 32..=63 for a non-empty block.
#[inline]
pub fn record_overhead_bits(bit_length: u64) -> u64 {
    record_len(bit_length) as u64 * 8 - bit_length
}

/// How an input is cut into blocks.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BlockLayout {
    pub block_size_symbols: u32,
    pub block_count: u64,
    pub last_block_symbols: u32,
    pub total_symbols: u64,
}

impl BlockLayout {
    pub fn new(total_symbols: u64, block_size_symbols: u32) -> Result<Self> {
        check_block_size(block_size_symbols)?;
        let block_count = total_symbols.div_ceil(block_size_symbols as u64);
        let last_block_symbols = if block_count == 0 {
            0
        } else {
            (total_symbols - (block_count - 1) * block_size_symbols as u64) as u32
        };
        Ok(Self {
            block_size_symbols,
            block_count,
            last_block_symbols,
            total_symbols,
        })
    }

    /// Symbol range of block `index` within the input.
    pub fn block_range(&self, index: u64) -> std::ops::Range<usize> {
        let start = index * self.block_size_symbols as u64;
        let end = (start + self.block_size_symbols as u64).min(self.total_symbols);
        start as usize..end as usize
    }
}

pub fn check_block_size(block_size_symbols: u32) -> Result<()> {
    if block_size_symbols == 0 || block_size_symbols > MAX_BLOCK_SYMBOLS {
        return Err(Error::InvalidConfig(format!(
            "block size must be in 1..={MAX_BLOCK_SYMBOLS}, got {block_size_symbols}"
        )));
    }
    Ok(())
}

/// An owned, encoded block.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EncodedBlock {
    pub bit_length: u32,
    pub payload: Vec<u8>,
}

/// A borrowed view of a block record's fields.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BlockRef<'a> {
    pub bit_length: u32,
    pub payload: &'a [u8],
}

impl EncodedBlock {
    pub fn as_ref(&self) -> BlockRef<'_> {
        BlockRef {
            bit_length: self.bit_length,
            payload: &self.payload,
        }
    }

    /// Size of this block's wire record.
    pub fn record_len(&self) -> usize {
        DELIMITER_BYTES + self.payload.len()
    }
}

/// The length pre-pass: the block's coded size in bits.
pub fn block_encoded_length(block: &[u8], table: &CodeTable) -> Result<u64> {
    encoded_bit_length(block, table)
}

fn checked_bit_length(bits: u64) -> Result<u32> {
    u32::try_from(bits).map_err(|_| Error::BlockTooLarge(bits))
}

pub fn encode_block(block: &[u8], table: &CodeTable) -> Result<EncodedBlock> {
    if block.is_empty() {
        return Err(Error::EmptyInput);
    }
    let bit_length = checked_bit_length(block_encoded_length(block, table)?)?;
    let mut payload = vec![0u8; padded_payload_len(bit_length as u64)];
    write_codes(block, table, &mut payload);
    Ok(EncodedBlock {
        bit_length,
        payload,
    })
}

/// Writes a full record (delimiter and payload) into `record`, which must
/// be zeroed and exactly `record_len(bit_length)` bytes. `bit_length` must
/// come from [`block_encoded_length`] over the same block.
pub(crate) fn encode_record_into(
    block: &[u8],
    table: &CodeTable,
    bit_length: u32,
    record: &mut [u8],
) {
    debug_assert_eq!(record.len(), record_len(bit_length as u64));
    record[..DELIMITER_BYTES].copy_from_slice(&bit_length.to_le_bytes());
    write_codes(block, table, &mut record[DELIMITER_BYTES..]);
}

/// The length pre-pass, rejecting blocks whose bit count
/// overflows the delimiter.
pub(crate) fn measure_block(block: &[u8], table: &CodeTable) -> Result<u32> {
    checked_bit_length(block_encoded_length(block, table)?)
}

fn check_payload(block: &BlockRef<'_>) -> Result<()> {
    if block.payload.len() < padded_payload_len(block.bit_length as u64) {
        return Err(Error::TruncatedStream {
            consumed: block.payload.len() as u64 * 8,
            declared: block.bit_length as u64,
        });
    }
    Ok(())
}

/// Decodes exactly `bit_length` bits of the payload. Pad bits are never read.
pub fn decode_block(block: BlockRef<'_>, tree: &DecodeTree) -> Result<Vec<u8>> {
    check_payload(&block)?;
    let mut out = Vec::new();
    walk_codes(block.payload, block.bit_length as u64, tree, |s| {
        out.push(s);
        Ok(())
    })?;
    Ok(out)
}

/// Decodes a block straight into its slot of the output, which must be
/// filled exactly.
pub fn decode_block_into(block: BlockRef<'_>, tree: &DecodeTree, out: &mut [u8]) -> Result<()> {
    check_payload(&block)?;
    let expected = out.len() as u64;
    let mut written = 0usize;
    walk_codes(block.payload, block.bit_length as u64, tree, |s| {
        if written == out.len() {
            return Err(Error::OutputLengthMismatch {
                expected,
                actual: expected + 1,
            });
        }
        out[written] = s;
        written += 1;
        Ok(())
    })?;
    if written != out.len() {
        return Err(Error::OutputLengthMismatch {
            expected,
            actual: written as u64,
        });
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct OffsetEntry {
    /// Offset of the record's delimiter within the encoded region.
    pub byte_offset: usize,
    pub bit_length: u32,
}

impl OffsetEntry {
    pub fn payload_range(&self) -> std::ops::Range<usize> {
        let start = self.byte_offset + DELIMITER_BYTES;
        start..start + padded_payload_len(self.bit_length as u64)
    }

    pub fn record_len(&self) -> usize {
        record_len(self.bit_length as u64)
    }
}

/// Per-block positions inside an encoded region, built from delimiters.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct OffsetTable {
    pub entries: Vec<OffsetEntry>,
}

impl OffsetTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn block<'a>(&self, region: &'a [u8], index: usize) -> BlockRef<'a> {
        let e = &self.entries[index];
        BlockRef {
            bit_length: e.bit_length,
            payload: &region[e.payload_range()],
        }
    }

    pub fn blocks<'a>(&'a self, region: &'a [u8]) -> impl Iterator<Item = BlockRef<'a>> + 'a {
        (0..self.entries.len()).map(move |i| self.block(region, i))
    }

    pub fn total_bits(&self) -> u64 {
        self.entries.iter().map(|e| e.bit_length as u64).sum()
    }
}

/// Scans delimiters front to back. The region must hold exactly
/// `block_count` records with nothing left over.
pub fn build_offset_table(region: &[u8], block_count: u64) -> Result<OffsetTable> {
    // Every record is at least 8 bytes, which bounds any honest block count.
    if block_count > (region.len() / 8) as u64 {
        return Err(Error::MalformedContainer(format!(
            "{block_count} blocks cannot fit in {} bytes",
            region.len()
        )));
    }
    let mut entries = Vec::with_capacity(block_count as usize);
    let mut at = 0usize;
    for index in 0..block_count {
        let Some(delim) = region.get(at..at + DELIMITER_BYTES) else {
            return Err(Error::MalformedContainer(format!(
                "block {index} delimiter runs past the end of the data"
            )));
        };
        let bit_length = u32::from_le_bytes(delim.try_into().unwrap());
        if bit_length == 0 {
            return Err(Error::MalformedContainer(format!(
                "block {index} declares zero bits"
            )));
        }
        let entry = OffsetEntry {
            byte_offset: at,
            bit_length,
        };
        if entry.payload_range().end > region.len() {
            return Err(Error::MalformedContainer(format!(
                "block {index} payload runs past the end of the data"
            )));
        }
        at += entry.record_len();
        entries.push(entry);
    }
    if at != region.len() {
        return Err(Error::MalformedContainer(format!(
            "{} trailing bytes after the last block",
            region.len() - at
        )));
    }
    Ok(OffsetTable { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::huffman::{code_table_for, rebuild_tree_from_lengths};

    fn table(pairs: &[(u8, u8)]) -> CodeTable {
        let mut l = [0u8; 256];
        for &(s, n) in pairs {
            l[s as usize] = n;
        }
        CodeTable::from_lengths(&l).unwrap()
    }

    fn record(bit_length: u32) -> Vec<u8> {
        let mut r = bit_length.to_le_bytes().to_vec();
        r.resize(record_len(bit_length as u64), 0);
        r
    }

    #[test]
    fn length_prepass_sums_code_lengths() {
        let t = table(&[(b'a', 1), (b'b', 2), (b'c', 3), (b'd', 3)]);
        assert_eq!(block_encoded_length(b"abc", &t).unwrap(), 6);
        assert_eq!(block_encoded_length(b"", &t).unwrap(), 0);
        assert!(matches!(
            block_encoded_length(b"e", &t),
            Err(Error::UnknownSymbol(b'e'))
        ));
    }

    #[test]
    fn six_bit_payload_pads_to_four_bytes() {
        let t = table(&[(b'a', 1), (b'b', 2), (b'c', 3), (b'd', 3)]);
        let b = encode_block(b"abc", &t).unwrap();
        assert_eq!(b.bit_length, 6);
        assert_eq!(b.payload, vec![0b0101_1000, 0, 0, 0]);
        assert_eq!(record_overhead_bits(6), 58);
    }

    #[test]
    fn overhead_extremes() {
        assert_eq!(record_overhead_bits(32), 32);
        assert_eq!(padded_payload_len(33), 8);
        assert_eq!(record_overhead_bits(33), 63);
        assert_eq!(record_overhead_bits(1), 63);
        assert_eq!(record_overhead_bits(64), 32);
    }

    #[test]
    fn thirty_two_bit_payload_has_no_padding() {
        // 16 two-bit codes.
        let t = table(&[(0, 2), (1, 2), (2, 2), (3, 2)]);
        let data: Vec<u8> = (0..16).map(|i| (i % 4) as u8).collect();
        let b = encode_block(&data, &t).unwrap();
        assert_eq!(b.bit_length, 32);
        assert_eq!(b.payload.len(), 4);
        assert_eq!(b.payload, vec![0x1b; 4]);
    }

    #[test]
    fn round_trip_and_pad_hygiene() {
        let data = b"mississippi river banks";
        let t = code_table_for(data).unwrap();
        let tree = rebuild_tree_from_lengths(t.lengths()).unwrap();
        for chunk in data.chunks(5) {
            let b = encode_block(chunk, &t).unwrap();
            let tail_bits = b.payload.len() as u64 * 8 - b.bit_length as u64;
            assert!(tail_bits <= 31);
            // Bits past bit_length are zero.
            for bit in b.bit_length as usize..b.payload.len() * 8 {
                assert_eq!(b.payload[bit / 8] >> (7 - bit % 8) & 1, 0);
            }
            assert_eq!(decode_block(b.as_ref(), &tree).unwrap(), chunk);
            let mut slot = vec![0u8; chunk.len()];
            decode_block_into(b.as_ref(), &tree, &mut slot).unwrap();
            assert_eq!(slot, chunk);
            let mut short = vec![0u8; chunk.len() - 1];
            assert!(matches!(
                decode_block_into(b.as_ref(), &tree, &mut short),
                Err(Error::OutputLengthMismatch { .. })
            ));
        }
    }

    #[test]
    fn empty_block_is_rejected() {
        let t = table(&[(b'a', 1), (b'b', 1)]);
        assert!(encode_block(b"", &t).is_err());
    }

    #[test]
    fn nine_symbols_in_blocks_of_three() {
        let data = b"abracadab";
        let layout = BlockLayout::new(9, 3).unwrap();
        assert_eq!(layout.block_count, 3);
        assert_eq!(layout.last_block_symbols, 3);
        let t = code_table_for(data).unwrap();
        let tree = rebuild_tree_from_lengths(t.lengths()).unwrap();
        let mut out = Vec::new();
        for i in 0..layout.block_count {
            let b = encode_block(&data[layout.block_range(i)], &t).unwrap();
            out.extend(decode_block(b.as_ref(), &tree).unwrap());
        }
        assert_eq!(out, data);
    }

    #[test]
    fn layout_short_last_block() {
        let l = BlockLayout::new(10, 4).unwrap();
        assert_eq!((l.block_count, l.last_block_symbols), (3, 2));
        assert_eq!(l.block_range(2), 8..10);
        assert_eq!(BlockLayout::new(0, 4).unwrap().block_count, 0);
        assert!(BlockLayout::new(10, 0).is_err());
        assert!(BlockLayout::new(10, MAX_BLOCK_SYMBOLS + 1).is_err());
    }

    #[test]
    fn offsets_are_prefix_sums() {
        // Payloads of 4, 8 and 4 bytes.
        let mut region = record(20);
        region.extend(record(40));
        region.extend(record(1));
        let t = build_offset_table(&region, 3).unwrap();
        let offsets: Vec<usize> = t.entries.iter().map(|e| e.byte_offset).collect();
        assert_eq!(offsets, [0, 8, 20]);
        assert_eq!(t.total_bits(), 61);
    }

    #[test]
    fn offsets_of_nothing() {
        assert!(build_offset_table(&[], 0).unwrap().is_empty());
        assert!(build_offset_table(&[0; 8], 0).is_err());
    }

    #[test]
    fn truncated_region_is_malformed() {
        let mut region = record(20);
        region.extend(record(40));
        for cut in 0..region.len() {
            assert!(matches!(
                build_offset_table(&region[..cut], 2),
                Err(Error::MalformedContainer(_))
            ));
        }
        assert!(matches!(
            build_offset_table(&record(0), 1),
            Err(Error::MalformedContainer(_))
        ));
    }
}
