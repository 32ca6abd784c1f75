/// Occurrence counts over the 256-value byte alphabet.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymbolHistogram {
    counts: [u64; 256],
    total: u64,
}

impl SymbolHistogram {
    /// Builds a histogram directly from counts. `total` is derived.
    pub fn from_counts(counts: [u64; 256]) -> Self {
        let total = counts.iter().sum();
        Self { counts, total }
    }

    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn count(&self, symbol: u8) -> u64 {
        self.counts[symbol as usize]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of symbols with a nonzero count.
    pub fn distinct(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Present symbols in ascending order.
    pub fn present(&self) -> impl Iterator<Item = u8> + '_ {
        (0..=255u8).filter(move |&s| self.counts[s as usize] > 0)
    }
}

pub fn build_histogram(data: &[u8]) -> SymbolHistogram {
    // Four interleaved tables keep consecutive equal bytes from serializing
    // on the same counter.
    let mut lanes = [[0u64; 256]; 4];
    let mut chunks = data.chunks_exact(4);
    for c in &mut chunks {
        lanes[0][c[0] as usize] += 1;
        lanes[1][c[1] as usize] += 1;
        lanes[2][c[2] as usize] += 1;
        lanes[3][c[3] as usize] += 1;
    }
    for &b in chunks.remainder() {
        lanes[0][b as usize] += 1;
    }
    let mut counts = [0u64; 256];
    for (s, slot) in counts.iter_mut().enumerate() {
        *slot = lanes.iter().map(|l| l[s]).sum();
    }
    SymbolHistogram {
        counts,
        total: data.len() as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input() {
        let h = build_histogram(&[]);
        assert_eq!(h.total(), 0);
        assert!(h.counts().iter().all(|&c| c == 0));
    }

    #[test]
    fn counts_aab() {
        let h = build_histogram(b"aab");
        assert_eq!(h.count(b'a'), 2);
        assert_eq!(h.count(b'b'), 1);
        assert_eq!(h.total(), 3);
        assert_eq!(h.distinct(), 2);
    }

    #[test]
    fn nine_symbols_is_72_bits() {
        let h = build_histogram(b"abcdefghi");
        assert_eq!(h.total(), 9);
        assert_eq!(h.total() * 8, 72);
    }

    #[test]
    fn total_matches_sum_of_counts() {
        let data: Vec<u8> = (0..1031u32).map(|i| (i * 7 % 13) as u8).collect();
        let h = build_histogram(&data);
        assert_eq!(h.total(), h.counts().iter().sum::<u64>());
        assert_eq!(h, SymbolHistogram::from_counts(*h.counts()));
    }
}
