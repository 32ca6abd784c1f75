//! Overhead and throughput experiments with CSV output.
//!
//! Every timed run is checked for a correct round trip before its row is
//! recorded. Timing never includes loading the corpus.

use std::fmt;
use std::io::Write;

use crate::container::{Container, HEADER_LEN};
use crate::error::{Error, Result};
use crate::huffman::{code_table_for, encoded_bit_length};
use crate::parallel::{decode_stream_timed, encode_stream_timed, ParallelConfig, StageTimings};

pub const CSV_COLUMNS: [&str; 11] = [
    "experiment",
    "corpus",
    "block_size",
    "workers",
    "trial",
    "setup_seconds",
    "parallel_seconds",
    "total_seconds",
    "throughput_bps",
    "output_bytes",
    "overhead_fraction",
];

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Experiment {
    Overhead,
    Encode,
    Decode,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Overhead => "overhead",
            Experiment::Encode => "encode",
            Experiment::Decode => "decode",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct BenchResult {
    pub experiment: Experiment,
    pub corpus: String,
    pub block_size_symbols: u32,
    pub worker_count: usize,
    pub trial: u32,
    pub timings: StageTimings,
    pub input_bytes: u64,
    pub throughput_bps: f64,
    /// Container size in bytes (encode side) or decoded size (decode side).
    pub output_bytes: u64,
    pub overhead_fraction: f64,
    pub block_count: u32,
    /// Sum of all blocks' delimiter and padding bits.
    pub overhead_bits: u64,
}

impl BenchResult {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.9},{:.9},{:.9},{:.1},{},{:.9}",
            self.experiment,
            self.corpus,
            self.block_size_symbols,
            self.worker_count,
            self.trial,
            self.timings.setup.as_secs_f64(),
            self.timings.parallel.as_secs_f64(),
            self.timings.total().as_secs_f64(),
            self.throughput_bps,
            self.output_bytes,
            self.overhead_fraction,
        )
    }
}

/// Size a single unblocked bitstream would need: the same header plus the
/// code bits rounded up to whole bytes.
pub fn sequential_coded_size(payload_bits: u64) -> u64 {
    HEADER_LEN as u64 + payload_bits.div_ceil(8)
}

/// Fraction of the block-coded container spent on block framing, relative
/// to the unblocked stream of the same codes.
pub fn overhead_fraction(container_bytes: u64, payload_bits: u64) -> f64 {
    if container_bytes == 0 {
        return 0.0;
    }
    let seq = sequential_coded_size(payload_bits);
    (container_bytes - seq) as f64 / container_bytes as f64
}

fn container_overhead_bits(c: &Container) -> u64 {
    c.region.len() as u64 * 8 - c.offsets.total_bits()
}

fn throughput(bytes: u64, t: &StageTimings) -> f64 {
    let secs = t.total().as_secs_f64();
    if secs > 0.0 {
        bytes as f64 / secs
    } else {
        f64::INFINITY
    }
}

fn verify(decoded: &[u8], original: &[u8], what: &str) -> Result<()> {
    if decoded.len() != original.len() {
        return Err(Error::OutputLengthMismatch {
            expected: original.len() as u64,
            actual: decoded.len() as u64,
        });
    }
    if decoded != original {
        return Err(Error::RoundTrip(format!("{what} decoded different bytes")));
    }
    Ok(())
}

/// Compresses the corpus once per block size and records the framing
/// overhead.
pub fn sweep_overhead(
    corpus: &[u8],
    corpus_name: &str,
    block_sizes: &[u32],
    worker_count: usize,
) -> Result<Vec<BenchResult>> {
    if corpus.is_empty() {
        return Err(Error::InvalidConfig(
            "overhead sweep needs a non-empty corpus".into(),
        ));
    }
    let table = code_table_for(corpus)?;
    let payload_bits = encoded_bit_length(corpus, &table)?;
    let mut rows = Vec::with_capacity(block_sizes.len());
    for &bs in block_sizes {
        let config = ParallelConfig::new(worker_count, bs)?;
        let (container, timings) = encode_stream_timed(corpus, &config)?;
        let bytes = container.to_bytes();
        let (decoded, _) = decode_stream_timed(&bytes, &config)?;
        verify(&decoded, corpus, "overhead sweep")?;
        debug_assert_eq!(container.offsets.total_bits(), payload_bits);
        rows.push(BenchResult {
            experiment: Experiment::Overhead,
            corpus: corpus_name.to_string(),
            block_size_symbols: bs,
            worker_count,
            trial: 0,
            timings,
            input_bytes: corpus.len() as u64,
            throughput_bps: throughput(corpus.len() as u64, &timings),
            output_bytes: container.byte_len(),
            overhead_fraction: overhead_fraction(container.byte_len(), payload_bits),
            block_count: container.header.block_count,
            overhead_bits: container_overhead_bits(&container),
        });
    }
    Ok(rows)
}

/// Times encode or decode at each worker count, `trials` times each.
pub fn sweep_throughput(
    corpus: &[u8],
    corpus_name: &str,
    worker_counts: &[usize],
    mode: Experiment,
    trials: u32,
    block_size_symbols: u32,
) -> Result<Vec<BenchResult>> {
    if trials < 3 {
        return Err(Error::InvalidConfig(format!(
            "need at least 3 trials, got {trials}"
        )));
    }
    if mode == Experiment::Overhead {
        return Err(Error::InvalidConfig(
            "use sweep_overhead for the overhead experiment".into(),
        ));
    }
    let reference_config = ParallelConfig::new(1, block_size_symbols)?;
    let (reference, _) = encode_stream_timed(corpus, &reference_config)?;
    let reference_bytes = reference.to_bytes();
    let fraction = overhead_fraction(reference.byte_len(), reference.offsets.total_bits());
    let overhead_bits = container_overhead_bits(&reference);

    let mut rows = Vec::new();
    for &workers in worker_counts {
        let config = ParallelConfig::new(workers, block_size_symbols)?;
        for trial in 0..trials {
            let (timings, output_bytes) = match mode {
                Experiment::Encode => {
                    let (c, t) = encode_stream_timed(corpus, &config)?;
                    let bytes = c.to_bytes();
                    if bytes != reference_bytes {
                        return Err(Error::RoundTrip(format!(
                            "encode with {workers} workers differs from the 1-worker container"
                        )));
                    }
                    let (decoded, _) = decode_stream_timed(&bytes, &config)?;
                    verify(&decoded, corpus, "encode sweep")?;
                    (t, bytes.len() as u64)
                }
                Experiment::Decode => {
                    let (decoded, t) = decode_stream_timed(&reference_bytes, &config)?;
                    verify(&decoded, corpus, "decode sweep")?;
                    (t, decoded.len() as u64)
                }
                Experiment::Overhead => unreachable!(),
            };
            rows.push(BenchResult {
                experiment: mode,
                corpus: corpus_name.to_string(),
                block_size_symbols,
                worker_count: workers,
                trial,
                timings,
                input_bytes: corpus.len() as u64,
                throughput_bps: throughput(corpus.len() as u64, &timings),
                output_bytes,
                overhead_fraction: fraction,
                block_count: reference.header.block_count,
                overhead_bits,
            });
        }
    }
    Ok(rows)
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    })
}

/// Median throughput over all rows recorded at `workers`.
pub fn median_throughput(rows: &[BenchResult], workers: usize) -> Option<f64> {
    let mut v: Vec<f64> = rows
        .iter()
        .filter(|r| r.worker_count == workers)
        .map(|r| r.throughput_bps)
        .collect();
    median(&mut v)
}

/// `# key=value` lines describing the machine.
pub fn machine_metadata() -> Vec<String> {
    let mut lines = vec![format!(
        "# logical_cores={}",
        crate::parallel::default_workers()
    )];
    let cpuinfo = std::fs::read_to_string("/proc/cpuinfo").unwrap_or_default();
    let field = |key: &str| {
        cpuinfo
            .lines()
            .find(|l| l.starts_with(key))
            .and_then(|l| l.split(':').nth(1))
            .map(|v| v.trim().to_string())
    };
    lines.push(format!(
        "# cpu_model={}",
        field("model name").unwrap_or_else(|| "unknown".into())
    ));
    lines.push(format!(
        "# cpu_mhz={}",
        field("cpu MHz").unwrap_or_else(|| "unknown".into())
    ));
    lines
}

pub fn write_csv<W: Write>(sink: &mut W, comments: &[String], rows: &[BenchResult]) -> Result<()> {
    for c in comments {
        writeln!(sink, "{c}")?;
    }
    writeln!(sink, "{}", CSV_COLUMNS.join(","))?;
    for r in rows {
        writeln!(sink, "{}", r.csv_row())?;
    }
    Ok(())
}
