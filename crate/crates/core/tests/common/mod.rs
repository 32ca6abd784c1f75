//! Oracles shared by the integration suites. None of these call into the
//! code paths they check.

#![allow(dead_code)]

/// Minimum weighted path length over every full binary tree on `weights`,
/// found by trying every sequence of pairwise merges. Each full binary
/// tree arises from at least one merge sequence, and a sequence's cost is
/// the sum of its merged weights.
pub fn exhaustive_optimal_cost(weights: &[u64]) -> u64 {
    fn go(ws: &[u64]) -> u64 {
        if ws.len() <= 1 {
            return 0;
        }
        let mut best = u64::MAX;
        for i in 0..ws.len() {
            for j in i + 1..ws.len() {
                let (a, b) = (ws[i], ws[j]);
                let mut rest: Vec<u64> = ws
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i && k != j)
                    .map(|(_, &w)| w)
                    .collect();
                rest.push(a + b);
                best = best.min(a + b + go(&rest));
            }
        }
        best
    }
    assert!(weights.len() >= 2);
    go(weights)
}

/// Σ 2^-len over present lengths as an exact fraction `num / 2^max_len`.
pub fn kraft_sum(lengths: &[u8; 256]) -> (u128, u32) {
    let max = lengths.iter().copied().max().unwrap_or(0) as u32;
    assert!(max < 120, "oracle limited to short codes");
    let num = lengths
        .iter()
        .filter(|&&l| l > 0)
        .map(|&l| 1u128 << (max - l as u32))
        .sum();
    (num, max)
}

/// Σ count(s) · length(s), by direct counting over the data.
pub fn weighted_bits(data: &[u8], lengths: &[u8; 256]) -> u64 {
    let mut counts = [0u64; 256];
    for &b in data {
        counts[b as usize] += 1;
    }
    counts
        .iter()
        .zip(lengths)
        .map(|(&c, &l)| c * l as u64)
        .sum()
}

/// Parses a container's block delimiters by hand from raw bytes.
pub fn raw_block_bits(container: &[u8]) -> Vec<u32> {
    let count = u32::from_le_bytes(container[20..24].try_into().unwrap());
    let mut at = 280usize;
    let mut out = Vec::new();
    for _ in 0..count {
        let bits = u32::from_le_bytes(container[at..at + 4].try_into().unwrap());
        out.push(bits);
        at += 4 + (bits as usize).div_ceil(32) * 4;
    }
    assert_eq!(at, container.len());
    out
}
