use crate::bits::{BitReader, BitWriter};
use crate::error::{Error, Result};

use super::code::CodeTable;
use super::tree::{DecodeTree, LOOKUP_BITS, LOOKUP_DEAD, LOOKUP_LEAF, SLOT_ABSENT, SLOT_LEAF};

/// A packed MSB-first bit sequence with an exact bit length.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct BitSequence {
    pub bytes: Vec<u8>,
    pub bit_len: u64,
}

/// Sum of code lengths over `data`.
pub fn encoded_bit_length(data: &[u8], table: &CodeTable) -> Result<u64> {
    let lengths = table.lengths();
    let mut bits = 0u64;
    for &b in data {
        match lengths[b as usize] {
            0 => return Err(Error::UnknownSymbol(b)),
            n => bits += n as u64,
        }
    }
    Ok(bits)
}

/// Writes the codes for `data` into `out`, which must hold at least
/// `ceil(bits / 8)` bytes. Returns bytes touched.
pub(crate) fn write_codes(data: &[u8], table: &CodeTable, out: &mut [u8]) -> usize {
    let mut writer = BitWriter::new(out);
    for &b in data {
        table.raw_code(b).write_to(&mut writer);
    }
    writer.finish()
}

/// Replaces every symbol with its code, concatenated in input order.
pub fn sequential_encode(data: &[u8], table: &CodeTable) -> Result<BitSequence> {
    let bit_len = encoded_bit_length(data, table)?;
    let mut bytes = vec![0u8; bit_len.div_ceil(8) as usize];
    write_codes(data, table, &mut bytes);
    Ok(BitSequence { bytes, bit_len })
}

/// Walks the tree for exactly `bit_count` bits, handing each decoded
/// symbol to `emit`. A code left unfinished at `bit_count` is an error.
///
/// While enough bits remain, the first `LOOKUP_BITS` of each code are
/// resolved through the tree's prefix table; longer codes and the stream
/// tail continue one bit and one edge at a time.
#[inline]
pub(crate) fn walk_codes<F>(
    bits: &[u8],
    bit_count: u64,
    tree: &DecodeTree,
    mut emit: F,
) -> Result<()>
where
    F: FnMut(u8) -> Result<()>,
{
    let mut reader = BitReader::new(bits, bit_count)?;
    let root = tree.root();
    let mut node = root;
    while reader.remaining() >= LOOKUP_BITS as u64 {
        let entry = tree.lookup(reader.peek(LOOKUP_BITS));
        if entry & LOOKUP_LEAF != 0 {
            reader.skip((entry >> 8) & 0xff);
            emit(entry as u8)?;
            continue;
        }
        if entry & LOOKUP_DEAD != 0 {
            return Err(Error::InvalidCode(
                reader.consumed() + (entry & 0xff) as u64,
            ));
        }
        reader.skip(LOOKUP_BITS);
        node = entry;
        loop {
            let Some(bit) = reader.read_bit() else {
                return Err(Error::TruncatedStream {
                    consumed: reader.consumed(),
                    declared: bit_count,
                });
            };
            let slot = tree.slot(node, bit);
            if slot & SLOT_LEAF != 0 {
                emit(slot as u8)?;
                node = root;
                break;
            } else if slot == SLOT_ABSENT {
                return Err(Error::InvalidCode(reader.consumed() - 1));
            }
            node = slot;
        }
    }
    while let Some(bit) = reader.read_bit() {
        let slot = tree.slot(node, bit);
        if slot & SLOT_LEAF != 0 {
            emit(slot as u8)?;
            node = root;
        } else if slot == SLOT_ABSENT {
            return Err(Error::InvalidCode(reader.consumed() - 1));
        } else {
            node = slot;
        }
    }
    if node != root {
        return Err(Error::TruncatedStream {
            consumed: reader.consumed(),
            declared: bit_count,
        });
    }
    Ok(())
}

pub fn sequential_decode(bits: &[u8], bit_count: u64, tree: &DecodeTree) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    walk_codes(bits, bit_count, tree, |s| {
        out.push(s);
        Ok(())
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::huffman::{
        build_histogram, build_tree, code_table_for, derive_codes, rebuild_tree_from_lengths,
    };

    fn ab_table() -> (CodeTable, DecodeTree) {
        // a = "0", b = "10", c = "11"
        let mut l = [0u8; 256];
        l[b'a' as usize] = 1;
        l[b'b' as usize] = 2;
        l[b'c' as usize] = 2;
        (
            CodeTable::from_lengths(&l).unwrap(),
            rebuild_tree_from_lengths(&l).unwrap(),
        )
    }

    #[test]
    fn empty_data_encodes_to_nothing() {
        let (t, _) = ab_table();
        assert_eq!(sequential_encode(&[], &t).unwrap(), BitSequence::default());
    }

    #[test]
    fn ab_encodes_to_010() {
        let (t, tree) = ab_table();
        let s = sequential_encode(b"ab", &t).unwrap();
        assert_eq!(s.bit_len, 3);
        assert_eq!(s.bytes, vec![0b0100_0000]);
        assert_eq!(sequential_decode(&s.bytes, 3, &tree).unwrap(), b"ab");
    }

    #[test]
    fn straddling_code_is_truncated() {
        let (_, tree) = ab_table();
        assert!(matches!(
            sequential_decode(&[0b0100_0000], 2, &tree),
            Err(Error::TruncatedStream {
                consumed: 2,
                declared: 2
            })
        ));
    }

    #[test]
    fn unknown_symbol() {
        let (t, _) = ab_table();
        assert!(matches!(
            sequential_encode(b"abz", &t),
            Err(Error::UnknownSymbol(b'z'))
        ));
    }

    #[test]
    fn degenerate_tree_uses_one_bit_per_symbol() {
        let data = b"zzzzz";
        let table = derive_codes(&build_tree(&build_histogram(data)).unwrap());
        let s = sequential_encode(data, &table).unwrap();
        assert_eq!(s.bit_len, 5);
        assert_eq!(s.bytes, vec![0]);
        let tree = rebuild_tree_from_lengths(table.lengths()).unwrap();
        assert_eq!(sequential_decode(&s.bytes, 5, &tree).unwrap(), data);
        // A 1 bit has nowhere to go in the one-leaf tree.
        assert!(matches!(
            sequential_decode(&[0b0100_0000], 2, &tree),
            Err(Error::InvalidCode(1))
        ));
    }

    #[test]
    fn long_codes_and_table_path_agree() {
        // Lengths 1..=20 plus a second 20: codes far longer than the lookup prefix.
        let mut l = [0u8; 256];
        for (s, len) in l.iter_mut().enumerate().take(20) {
            *len = (s + 1) as u8;
        }
        l[20] = 20;
        let table = CodeTable::from_lengths(&l).unwrap();
        let tree = rebuild_tree_from_lengths(&l).unwrap();
        let data: Vec<u8> = (0..500u32).map(|i| ((i * 7) % 21) as u8).collect();
        let s = sequential_encode(&data, &table).unwrap();
        assert_eq!(sequential_decode(&s.bytes, s.bit_len, &tree).unwrap(), data);
        // Chopping any number of bits off the end never decodes silently to
        // the full input.
        for cut in 1..40 {
            match sequential_decode(&s.bytes, s.bit_len - cut, &tree) {
                Ok(out) => assert!(out.len() < data.len()),
                Err(e) => assert!(matches!(e, Error::TruncatedStream { .. })),
            }
        }
    }

    #[test]
    fn degenerate_dead_end_inside_lookup_window() {
        let data = vec![b'q'; 40];
        let table = code_table_for(&data).unwrap();
        let tree = rebuild_tree_from_lengths(table.lengths()).unwrap();
        let mut s = sequential_encode(&data, &table).unwrap();
        s.bytes[2] = 0b0001_0000;
        assert!(matches!(
            sequential_decode(&s.bytes, s.bit_len, &tree),
            Err(Error::InvalidCode(19))
        ));
    }

    #[test]
    fn bit_length_is_weighted_sum() {
        let data = b"aabacada";
        let h = build_histogram(data);
        let table = derive_codes(&build_tree(&h).unwrap());
        let s = sequential_encode(data, &table).unwrap();
        let independent: u64 = h
            .present()
            .map(|x| h.count(x) * table.length(x) as u64)
            .sum();
        assert_eq!(s.bit_len, independent);
        assert_eq!(s.bit_len, encoded_bit_length(data, &table).unwrap());
    }
}
