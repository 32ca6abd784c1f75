use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

use super::code::{classify_lengths, CodeTable, LengthsShape};
use super::histogram::SymbolHistogram;

const ABSENT: u32 = 0;
const LEAF: u32 = 1 << 31;

/// What sits below an internal node on one side.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Child {
    Internal(u32),
    Leaf(u8),
    Absent,
}

/// Binary code tree with byte symbols at the leaves; 0 = left, 1 = right.
///
/// Internal nodes live in a flat array with the root at index 0. A child
/// slot holds `LEAF | symbol`, an internal index, or `ABSENT` (index 0 can
/// never be a child). The only tree with an absent slot is the one-symbol
/// tree, whose single leaf hangs off the root's 0 side.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DecodeTree {
    nodes: Vec<[u32; 2]>,
    /// Result of walking every `LOOKUP_BITS`-bit prefix from the root.
    lookup: Vec<u32>,
}

/// Prefix width resolved by one table lookup while decoding.
pub(crate) const LOOKUP_BITS: u32 = 11;

// Lookup entries: a leaf reached within the prefix (symbol and code length),
// the internal node reached after the whole prefix, or a dead end.
pub(crate) const LOOKUP_LEAF: u32 = 1 << 31;
pub(crate) const LOOKUP_DEAD: u32 = 1 << 30;

impl DecodeTree {
    pub fn root(&self) -> u32 {
        0
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn child(&self, node: u32, bit: u32) -> Child {
        decode_slot(self.nodes[node as usize][bit as usize])
    }

    /// Raw slot for the decode hot loop.
    #[inline]
    pub(crate) fn slot(&self, node: u32, bit: u32) -> u32 {
        self.nodes[node as usize][bit as usize]
    }

    pub fn is_degenerate(&self) -> bool {
        self.nodes.len() == 1 && self.nodes[0][1] == ABSENT
    }

    /// Every leaf with its root-to-leaf path (0 = left, 1 = right).
    pub fn leaf_paths(&self) -> Vec<(u8, Vec<u32>)> {
        let mut out = Vec::new();
        let mut stack = vec![(self.root(), Vec::new())];
        while let Some((node, path)) = stack.pop() {
            for bit in 0..2u32 {
                let mut p = path.clone();
                p.push(bit);
                match self.child(node, bit) {
                    Child::Internal(i) => stack.push((i, p)),
                    Child::Leaf(s) => out.push((s, p)),
                    Child::Absent => {}
                }
            }
        }
        out.sort_by_key(|(s, _)| *s);
        out
    }

    /// Depth of every leaf, indexed by symbol; 0 for symbols not in the tree.
    pub fn leaf_depths(&self) -> [u8; 256] {
        let mut depths = [0u8; 256];
        let mut stack = vec![(self.root(), 1u32)];
        while let Some((node, depth)) = stack.pop() {
            for bit in 0..2u32 {
                match self.child(node, bit) {
                    Child::Internal(i) => stack.push((i, depth + 1)),
                    Child::Leaf(s) => depths[s as usize] = depth as u8,
                    Child::Absent => {}
                }
            }
        }
        depths
    }

    #[inline]
    pub(crate) fn lookup(&self, prefix: u32) -> u32 {
        self.lookup[prefix as usize]
    }

    fn from_nodes(nodes: Vec<[u32; 2]>) -> Self {
        let mut lookup = Vec::with_capacity(1 << LOOKUP_BITS);
        for prefix in 0..1u32 << LOOKUP_BITS {
            let mut node = 0u32;
            let mut entry = node;
            for i in 0..LOOKUP_BITS {
                let bit = (prefix >> (LOOKUP_BITS - 1 - i)) & 1;
                let slot = nodes[node as usize][bit as usize];
                if slot & LEAF != 0 {
                    entry = LOOKUP_LEAF | (i + 1) << 8 | (slot & 0xff);
                    break;
                } else if slot == ABSENT {
                    entry = LOOKUP_DEAD | i;
                    break;
                }
                node = slot;
                entry = node;
            }
            lookup.push(entry);
        }
        Self { nodes, lookup }
    }

    fn degenerate(symbol: u8) -> Self {
        Self::from_nodes(vec![[LEAF | symbol as u32, ABSENT]])
    }
}

#[inline]
pub(crate) fn decode_slot(slot: u32) -> Child {
    if slot == ABSENT {
        Child::Absent
    } else if slot & LEAF != 0 {
        Child::Leaf(slot as u8)
    } else {
        Child::Internal(slot)
    }
}

pub(crate) const SLOT_LEAF: u32 = LEAF;
pub(crate) const SLOT_ABSENT: u32 = ABSENT;

enum Building {
    Leaf(u8),
    Merge(usize, usize),
}

/// Builds the Huffman tree for a histogram.
///
/// Pending subtrees are ordered by (weight, smallest symbol they contain);
/// the two earliest are merged, the earlier becoming the left child. The
/// key is unique per subtree, so construction is fully deterministic.
pub fn build_tree(hist: &SymbolHistogram) -> Result<DecodeTree> {
    if hist.total() == 0 {
        return Err(Error::EmptyInput);
    }
    let present: Vec<u8> = hist.present().collect();
    if present.len() == 1 {
        return Ok(DecodeTree::degenerate(present[0]));
    }

    let mut arena: Vec<Building> = Vec::with_capacity(present.len() * 2);
    let mut heap = BinaryHeap::with_capacity(present.len());
    for &s in &present {
        heap.push(Reverse((hist.count(s), s, arena.len())));
        arena.push(Building::Leaf(s));
    }
    while heap.len() > 1 {
        let Reverse((w0, m0, left)) = heap.pop().unwrap();
        let Reverse((w1, m1, right)) = heap.pop().unwrap();
        heap.push(Reverse((w0 + w1, m0.min(m1), arena.len())));
        arena.push(Building::Merge(left, right));
    }
    let Reverse((_, _, root)) = heap.pop().unwrap();

    // Flatten so that the root lands at index 0.
    let mut nodes: Vec<[u32; 2]> = vec![[ABSENT; 2]];
    let mut stack = vec![(root, 0usize)];
    while let Some((id, at)) = stack.pop() {
        let Building::Merge(l, r) = arena[id] else {
            unreachable!("root of a multi-symbol tree is a merge");
        };
        for (side, child) in [l, r].into_iter().enumerate() {
            nodes[at][side] = match arena[child] {
                Building::Leaf(s) => LEAF | s as u32,
                Building::Merge(..) => {
                    nodes.push([ABSENT; 2]);
                    let idx = nodes.len() - 1;
                    stack.push((child, idx));
                    idx as u32
                }
            };
        }
    }
    Ok(DecodeTree::from_nodes(nodes))
}

/// Reconstructs the decoder tree for serialized code lengths, placing each
/// symbol at the path given by its canonical code.
pub fn rebuild_tree_from_lengths(lengths: &[u8; 256]) -> Result<DecodeTree> {
    match classify_lengths(lengths)? {
        LengthsShape::Empty => Err(Error::MalformedCodebook("no symbol has a code".into())),
        LengthsShape::Degenerate(s) => Ok(DecodeTree::degenerate(s)),
        LengthsShape::Complete => {
            let table = CodeTable::from_lengths(lengths)?;
            let mut nodes: Vec<[u32; 2]> = vec![[ABSENT; 2]];
            for (symbol, code) in table.entries() {
                let mut at = 0usize;
                let last = code.len() - 1;
                for i in 0..code.len() {
                    let bit = code.bit(i) as usize;
                    let slot = nodes[at][bit];
                    if i == last {
                        if slot != ABSENT {
                            return Err(Error::MalformedCodebook(format!(
                                "code for 0x{symbol:02x} collides with another code"
                            )));
                        }
                        nodes[at][bit] = LEAF | symbol as u32;
                    } else if slot == ABSENT {
                        nodes.push([ABSENT; 2]);
                        let idx = nodes.len() - 1;
                        nodes[at][bit] = idx as u32;
                        at = idx;
                    } else if slot & LEAF != 0 {
                        return Err(Error::MalformedCodebook(format!(
                            "code for 0x{symbol:02x} extends another code"
                        )));
                    } else {
                        at = slot as usize;
                    }
                }
            }
            Ok(DecodeTree::from_nodes(nodes))
        }
    }
}
