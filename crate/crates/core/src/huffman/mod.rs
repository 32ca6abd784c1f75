//! Classical Huffman machinery plus the single-stream (non-block) coder.

mod code;
mod histogram;
mod sequential;
mod tree;

pub use code::{classify_lengths, derive_codes, CodeTable, Codeword, LengthsShape, MAX_CODE_LEN};
pub use histogram::{build_histogram, SymbolHistogram};
pub use sequential::{encoded_bit_length, sequential_decode, sequential_encode, BitSequence};
pub use tree::{build_tree, rebuild_tree_from_lengths, Child, DecodeTree};

pub(crate) use sequential::{walk_codes, write_codes};

/// Histogram, tree and canonical table for `data` in one step.
pub fn code_table_for(data: &[u8]) -> crate::Result<CodeTable> {
    Ok(derive_codes(&build_tree(&build_histogram(data))?))
}
