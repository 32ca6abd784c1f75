//! Block-decomposed Huffman coding.
//!
//! Input is cut into blocks of a fixed number of symbols. Every block is
//! coded with one shared canonical Huffman table, prefixed with its length
//! in bits and padded to a 32-bit boundary, so blocks can be encoded and
//! decoded independently and in parallel while the output stays
//! bit-identical regardless of thread count.

pub mod bench;
pub mod bits;
pub mod block;
pub mod container;
pub mod corpus;
mod error;
pub mod huffman;
pub mod parallel;

pub use error::{Error, Result};
