//! Self-describing file format.
//!
//! ```text
//! offset   0  magic "HBK1"
//! offset   4  version (1)
//! offset   5  flags (0)
//! offset   6  reserved, 2 bytes (0)
//! offset   8  block_size_symbols     u32 LE
//! offset  12  original_length_bytes  u64 LE
//! offset  20  block_count            u32 LE
//! offset  24  codebook: 256 code lengths, one byte per symbol value
//! offset 280  block records back to back
//! ```

use std::io::{Read, Write};

use crate::block::{
    build_offset_table, check_block_size, BlockRef, EncodedBlock, OffsetTable, DELIMITER_BYTES,
};
use crate::error::{Error, Result};
use crate::huffman::{classify_lengths, LengthsShape};

pub const MAGIC: [u8; 4] = *b"HBK1";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 280;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ContainerHeader {
    pub block_size_symbols: u32,
    pub original_length_bytes: u64,
    pub block_count: u32,
    pub codebook: [u8; 256],
}

impl ContainerHeader {
    /// Header of the container for empty input.
    pub fn empty(block_size_symbols: u32) -> Self {
        Self {
            block_size_symbols,
            original_length_bytes: 0,
            block_count: 0,
            codebook: [0; 256],
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_block_size(self.block_size_symbols)
            .map_err(|e| Error::MalformedContainer(e.to_string()))?;
        let expected = self
            .original_length_bytes
            .div_ceil(self.block_size_symbols as u64);
        if self.block_count as u64 != expected {
            return Err(Error::MalformedContainer(format!(
                "block count {} does not match {} bytes in blocks of {}",
                self.block_count, self.original_length_bytes, self.block_size_symbols
            )));
        }
        let shape = classify_lengths(&self.codebook)?;
        match (shape, self.original_length_bytes) {
            (LengthsShape::Empty, 0) => Ok(()),
            (LengthsShape::Empty, _) => Err(Error::MalformedCodebook(
                "codebook is empty but the input is not".into(),
            )),
            (_, 0) => Err(Error::MalformedCodebook(
                "codebook must be empty for empty input".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[0..4].copy_from_slice(&MAGIC);
        out[4] = VERSION;
        out[8..12].copy_from_slice(&self.block_size_symbols.to_le_bytes());
        out[12..20].copy_from_slice(&self.original_length_bytes.to_le_bytes());
        out[20..24].copy_from_slice(&self.block_count.to_le_bytes());
        out[24..].copy_from_slice(&self.codebook);
        out
    }

    /// Parses and validates the fixed-size header at the start of `bytes`.
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() {
            return Err(Error::MalformedContainer(format!(
                "{} bytes is too short for a header",
                bytes.len()
            )));
        }
        let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
        if magic != MAGIC {
            return Err(Error::BadMagic(magic));
        }
        if bytes.len() < HEADER_LEN {
            return Err(Error::MalformedContainer(format!(
                "{} bytes is too short for a header",
                bytes.len()
            )));
        }
        if bytes[4] != VERSION {
            return Err(Error::UnsupportedVersion(bytes[4]));
        }
        if bytes[5] != 0 || bytes[6] != 0 || bytes[7] != 0 {
            return Err(Error::MalformedContainer(
                "reserved header bytes are not zero".into(),
            ));
        }
        let header = Self {
            block_size_symbols: u32::from_le_bytes(bytes[8..12].try_into().unwrap()),
            original_length_bytes: u64::from_le_bytes(bytes[12..20].try_into().unwrap()),
            block_count: u32::from_le_bytes(bytes[20..24].try_into().unwrap()),
            codebook: bytes[24..HEADER_LEN].try_into().unwrap(),
        };
        header.validate()?;
        Ok(header)
    }
}

/// A header plus its encoded block region.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Container {
    pub header: ContainerHeader,
    pub region: Vec<u8>,
    pub offsets: OffsetTable,
}

impl Container {
    pub fn from_blocks(header: ContainerHeader, blocks: &[EncodedBlock]) -> Result<Self> {
        let mut region = Vec::with_capacity(blocks.iter().map(EncodedBlock::record_len).sum());
        for b in blocks {
            append_record(&mut region, b.as_ref());
        }
        Self::from_region(header, region)
    }

    pub fn from_region(header: ContainerHeader, region: Vec<u8>) -> Result<Self> {
        header.validate()?;
        let offsets = build_offset_table(&region, header.block_count as u64)?;
        Ok(Self {
            header,
            region,
            offsets,
        })
    }

    pub fn blocks(&self) -> impl Iterator<Item = BlockRef<'_>> + '_ {
        self.offsets.blocks(&self.region)
    }

    pub fn block(&self, index: usize) -> BlockRef<'_> {
        self.offsets.block(&self.region, index)
    }

    pub fn byte_len(&self) -> u64 {
        (HEADER_LEN + self.region.len()) as u64
    }

    pub fn write_to<W: Write>(&self, sink: &mut W) -> Result<u64> {
        sink.write_all(&self.header.to_bytes())?;
        sink.write_all(&self.region)?;
        Ok(self.byte_len())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.byte_len() as usize);
        out.extend_from_slice(&self.header.to_bytes());
        out.extend_from_slice(&self.region);
        out
    }
}

fn append_record(region: &mut Vec<u8>, block: BlockRef<'_>) {
    region.extend_from_slice(&block.bit_length.to_le_bytes());
    region.extend_from_slice(block.payload);
}

/// Writes a header followed by block records; returns bytes written.
pub fn write_container<'a, W, I>(header: &ContainerHeader, blocks: I, sink: &mut W) -> Result<u64>
where
    W: Write,
    I: IntoIterator<Item = BlockRef<'a>>,
{
    header.validate()?;
    sink.write_all(&header.to_bytes())?;
    let mut written = HEADER_LEN as u64;
    let mut count = 0u64;
    for block in blocks {
        sink.write_all(&block.bit_length.to_le_bytes())?;
        sink.write_all(block.payload)?;
        written += (DELIMITER_BYTES + block.payload.len()) as u64;
        count += 1;
    }
    if count != header.block_count as u64 {
        return Err(Error::MalformedContainer(format!(
            "header declares {} blocks but {count} were written",
            header.block_count
        )));
    }
    Ok(written)
}

/// A validated container borrowed from a byte buffer.
#[derive(Clone, Debug)]
pub struct ParsedContainer<'a> {
    pub header: ContainerHeader,
    pub region: &'a [u8],
    pub offsets: OffsetTable,
}

impl<'a> ParsedContainer<'a> {
    pub fn block(&self, index: usize) -> BlockRef<'a> {
        self.offsets.block(self.region, index)
    }
}

/// Validates header and block framing without decoding any payload.
pub fn parse_container(bytes: &[u8]) -> Result<ParsedContainer<'_>> {
    let header = ContainerHeader::parse(bytes)?;
    let region = &bytes[HEADER_LEN..];
    let offsets = build_offset_table(region, header.block_count as u64)?;
    Ok(ParsedContainer {
        header,
        region,
        offsets,
    })
}

/// Reads a whole container from `source`, returning the header and the raw
/// encoded region.
pub fn read_container<R: Read>(source: &mut R) -> Result<(ContainerHeader, Vec<u8>)> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    let header = parse_container(&bytes)?.header;
    bytes.drain(..HEADER_LEN);
    Ok((header, bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::{encode_block, BlockLayout};
    use crate::huffman::code_table_for;

    fn sample(data: &[u8], block_size: u32) -> Container {
        let table = code_table_for(data).unwrap();
        let layout = BlockLayout::new(data.len() as u64, block_size).unwrap();
        let blocks: Vec<EncodedBlock> = (0..layout.block_count)
            .map(|i| encode_block(&data[layout.block_range(i)], &table).unwrap())
            .collect();
        let header = ContainerHeader {
            block_size_symbols: block_size,
            original_length_bytes: data.len() as u64,
            block_count: layout.block_count as u32,
            codebook: *table.lengths(),
        };
        Container::from_blocks(header, &blocks).unwrap()
    }

    #[test]
    fn empty_container_is_280_bytes() {
        let mut out = Vec::new();
        let n = write_container(&ContainerHeader::empty(3), std::iter::empty(), &mut out).unwrap();
        assert_eq!(n, 280);
        assert_eq!(out.len(), 280);
        assert_eq!(&out[..8], b"HBK1\x01\x00\x00\x00");
        let (h, region) = read_container(&mut out.as_slice()).unwrap();
        assert_eq!(h, ContainerHeader::empty(3));
        assert!(region.is_empty());
    }

    #[test]
    fn field_layout() {
        let c = sample(b"abracadab", 3);
        let bytes = c.to_bytes();
        assert_eq!(&bytes[8..12], &3u32.to_le_bytes());
        assert_eq!(&bytes[12..20], &9u64.to_le_bytes());
        assert_eq!(&bytes[20..24], &3u32.to_le_bytes());
        assert_eq!(&bytes[24..280], &c.header.codebook);
        assert_eq!(c.offsets.len(), 3);
        let expected_len: usize = 280
            + c.blocks()
                .map(|b| 4 + (b.bit_length as usize).div_ceil(32) * 4)
                .sum::<usize>();
        assert_eq!(bytes.len(), expected_len);
    }

    #[test]
    fn write_read_round_trip() {
        let c = sample(b"the rain in spain falls mainly", 7);
        let mut out = Vec::new();
        let n = write_container(&c.header, c.blocks(), &mut out).unwrap();
        assert_eq!(n as usize, out.len());
        assert_eq!(out, c.to_bytes());
        let (h, region) = read_container(&mut out.as_slice()).unwrap();
        assert_eq!(h, c.header);
        assert_eq!(region, c.region);
    }

    #[test]
    fn bad_magic_and_version() {
        let mut bytes = sample(b"hello", 2).to_bytes();
        bytes[4] = 2;
        assert!(matches!(
            parse_container(&bytes),
            Err(Error::UnsupportedVersion(2))
        ));
        bytes[4] = 1;
        bytes[0] ^= 0xff;
        assert!(matches!(parse_container(&bytes), Err(Error::BadMagic(_))));
    }

    #[test]
    fn every_truncation_is_rejected() {
        let bytes = sample(b"hello, world", 5).to_bytes();
        for cut in 0..bytes.len() {
            let err = parse_container(&bytes[..cut]).unwrap_err();
            assert!(
                matches!(err, Error::MalformedContainer(_)),
                "cut {cut}: {err}"
            );
        }
    }

    #[test]
    fn header_inconsistencies() {
        let c = sample(b"hello, world", 5);
        let mut h = c.header.clone();
        h.block_count += 1;
        assert!(matches!(h.validate(), Err(Error::MalformedContainer(_))));
        let mut h = c.header.clone();
        h.codebook[0] = 1;
        assert!(matches!(h.validate(), Err(Error::MalformedCodebook(_))));
        let mut h = c.header.clone();
        h.block_size_symbols = 0;
        assert!(h.validate().is_err());
        let mut bytes = c.to_bytes();
        bytes[6] = 1;
        assert!(matches!(
            parse_container(&bytes),
            Err(Error::MalformedContainer(_))
        ));
    }

    #[test]
    fn block_count_must_match_records() {
        let c = sample(b"hello, world", 5);
        let mut out = Vec::new();
        let err = write_container(&c.header, c.blocks().take(2), &mut out).unwrap_err();
        assert!(matches!(err, Error::MalformedContainer(_)));
    }
}
