//! Benchmark and test corpora: files on disk or seeded generators.

use std::path::Path;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::Zipf;

use crate::error::Result;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Generator {
    /// Independent uniform bytes; incompressible by a byte-level code.
    UniformRandom,
    /// Words drawn from a Zipf-ranked vocabulary, with punctuation and line
    /// breaks; statistically close to natural-language text.
    ZipfText,
    /// One byte value repeated.
    RepeatedByte,
}

impl Generator {
    pub const ALL: [Generator; 3] = [
        Generator::UniformRandom,
        Generator::ZipfText,
        Generator::RepeatedByte,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::UniformRandom => "uniform-random",
            Generator::ZipfText => "zipf-text",
            Generator::RepeatedByte => "repeated-byte",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.name() == name)
    }

    pub fn generate(self, len: usize, seed: u64) -> Vec<u8> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self {
            Generator::UniformRandom => {
                let mut v = vec![0u8; len];
                rng.fill_bytes(&mut v);
                v
            }
            Generator::RepeatedByte => vec![rng.gen::<u8>(); len],
            Generator::ZipfText => zipf_text(&mut rng, len),
        }
    }
}

// English letter frequencies, a..z, in tenths of a percent.
const LETTER_WEIGHTS: [u32; 26] = [
    82, 15, 28, 43, 127, 22, 20, 61, 70, 2, 8, 40, 24, 67, 75, 19, 1, 60, 63, 91, 28, 10, 24, 2,
    20, 1,
];
const VOCABULARY: usize = 4096;

fn zipf_text(rng: &mut ChaCha8Rng, len: usize) -> Vec<u8> {
    let letters = WeightedIndex::new(LETTER_WEIGHTS).unwrap();
    let vocab: Vec<Vec<u8>> = (0..VOCABULARY)
        .map(|rank| {
            // Frequent words tend to be short.
            let max = 2 + (rank as f64).log2() as usize;
            let n = rng.gen_range(1..=max.min(12));
            (0..n).map(|_| b'a' + letters.sample(rng) as u8).collect()
        })
        .collect();
    let ranks = Zipf::new(VOCABULARY as u64, 1.07f64).unwrap();

    let mut out = Vec::with_capacity(len + 16);
    let mut capitalize = true;
    while out.len() < len {
        let word = &vocab[ranks.sample(rng) as usize - 1];
        let start = out.len();
        out.extend_from_slice(word);
        if capitalize {
            out[start] = out[start].to_ascii_uppercase();
            capitalize = false;
        }
        match rng.gen_range(0..100) {
            0..=6 => out.extend_from_slice(b", "),
            7..=11 => {
                out.extend_from_slice(b". ");
                capitalize = true;
            }
            12 => {
                out.extend_from_slice(b".\n");
                capitalize = true;
            }
            _ => out.push(b' '),
        }
    }
    out.truncate(len);
    out
}

/// Loads a corpus by generator name, or from a file path otherwise.
/// `len` and `seed` apply to generators only.
pub fn corpus_load(spec: &str, len: usize, seed: u64) -> Result<Vec<u8>> {
    match Generator::from_name(spec) {
        Some(g) => Ok(g.generate(len, seed)),
        None => Ok(std::fs::read(Path::new(spec))?),
    }
}
