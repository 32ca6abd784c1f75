//! Data-parallel block encode and decode.
//!
//! Setup (histogram and tree on encode, header and offset table on decode)
//! runs on the calling thread. Blocks are then handed to a pool of
//! `worker_count` threads, each writing only into its own block's disjoint
//! slice of a preallocated output, so the result never depends on
//! scheduling.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::block::{
    check_block_size, decode_block_into, encode_record_into, measure_block, record_len,
    BlockLayout, BlockRef, OffsetEntry, OffsetTable,
};
use crate::container::{parse_container, Container, ContainerHeader};
use crate::error::{Error, Result};
use crate::huffman::{build_histogram, build_tree, derive_codes, rebuild_tree_from_lengths};

pub const DEFAULT_BLOCK_SIZE: u32 = 65536;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ParallelConfig {
    pub worker_count: usize,
    pub block_size_symbols: u32,
}

impl Default for ParallelConfig {
    fn default() -> Self {
        Self {
            worker_count: default_workers(),
            block_size_symbols: DEFAULT_BLOCK_SIZE,
        }
    }
}

impl ParallelConfig {
    pub fn new(worker_count: usize, block_size_symbols: u32) -> Result<Self> {
        let c = Self {
            worker_count,
            block_size_symbols,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.worker_count == 0 {
            return Err(Error::InvalidConfig(
                "worker count must be at least 1".into(),
            ));
        }
        check_block_size(self.block_size_symbols)
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(NonZeroUsize::get)
        .unwrap_or(1)
}

/// Wall time of the sequential setup and of the parallel block phase.
#[derive(Clone, Copy, PartialEq, Debug, Default)]
pub struct StageTimings {
    pub setup: Duration,
    pub parallel: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.setup + self.parallel
    }
}

fn pool(workers: usize) -> Result<Arc<rayon::ThreadPool>> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<rayon::ThreadPool>>>> = OnceLock::new();
    let mut pools = POOLS.get_or_init(Default::default).lock().unwrap();
    if let Some(p) = pools.get(&workers) {
        return Ok(p.clone());
    }
    let p = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .thread_name(|i| format!("blockhuff-{i}"))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start {workers} workers: {e}")))?;
    let p = Arc::new(p);
    pools.insert(workers, p.clone());
    Ok(p)
}

/// Runs `job` inside a pool of exactly `workers` threads.
fn run_with<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    Ok(pool(workers)?.install(job))
}

pub fn encode_stream(data: &[u8], config: &ParallelConfig) -> Result<Container> {
    encode_stream_timed(data, config).map(|(c, _)| c)
}

pub fn encode_stream_timed(
    data: &[u8],
    config: &ParallelConfig,
) -> Result<(Container, StageTimings)> {
    config.validate()?;
    let start = Instant::now();
    let layout = BlockLayout::new(data.len() as u64, config.block_size_symbols)?;
    let block_count = u32::try_from(layout.block_count).map_err(|_| {
        Error::InvalidConfig(format!(
            "{} blocks exceed the 32-bit block count; use a larger block size",
            layout.block_count
        ))
    })?;
    if data.is_empty() {
        let header = ContainerHeader::empty(config.block_size_symbols);
        let c = Container {
            header,
            region: Vec::new(),
            offsets: OffsetTable::default(),
        };
        return Ok((
            c,
            StageTimings {
                setup: start.elapsed(),
                parallel: Duration::ZERO,
            },
        ));
    }
    let table = derive_codes(&build_tree(&build_histogram(data))?);
    let setup = start.elapsed();

    let start = Instant::now();
    let bs = config.block_size_symbols as usize;
    let region = run_with(
        config.worker_count,
        || -> Result<(Vec<u8>, Vec<OffsetEntry>)> {
            let bit_lengths: Vec<u32> = data
                .par_chunks(bs)
                .map(|block| measure_block(block, &table))
                .collect::<Result<_>>()?;

            let mut entries = Vec::with_capacity(bit_lengths.len());
            let mut at = 0usize;
            for &bit_length in &bit_lengths {
                entries.push(OffsetEntry {
                    byte_offset: at,
                    bit_length,
                });
                at += record_len(bit_length as u64);
            }

            let mut region = vec![0u8; at];
            let mut records = Vec::with_capacity(entries.len());
            let mut rest = region.as_mut_slice();
            for e in &entries {
                let (record, tail) = rest.split_at_mut(e.record_len());
                records.push(record);
                rest = tail;
            }
            records
                .into_par_iter()
                .zip(data.par_chunks(bs))
                .zip(bit_lengths.par_iter())
                .for_each(|((record, block), &bits)| {
                    encode_record_into(block, &table, bits, record)
                });
            Ok((region, entries))
        },
    )??;
    let parallel = start.elapsed();

    let (region, entries) = region;
    let header = ContainerHeader {
        block_size_symbols: config.block_size_symbols,
        original_length_bytes: data.len() as u64,
        block_count,
        codebook: *table.lengths(),
    };
    let container = Container {
        header,
        region,
        offsets: OffsetTable { entries },
    };
    Ok((container, StageTimings { setup, parallel }))
}

pub fn decode_stream(bytes: &[u8], config: &ParallelConfig) -> Result<Vec<u8>> {
    decode_stream_timed(bytes, config).map(|(d, _)| d)
}

pub fn decode_stream_timed(
    bytes: &[u8],
    config: &ParallelConfig,
) -> Result<(Vec<u8>, StageTimings)> {
    if config.worker_count == 0 {
        return Err(Error::InvalidConfig(
            "worker count must be at least 1".into(),
        ));
    }
    let start = Instant::now();
    let parsed = parse_container(bytes)?;
    let header = &parsed.header;
    if header.original_length_bytes == 0 {
        return Ok((
            Vec::new(),
            StageTimings {
                setup: start.elapsed(),
                parallel: Duration::ZERO,
            },
        ));
    }
    let tree = rebuild_tree_from_lengths(&header.codebook)?;
    let layout = BlockLayout::new(header.original_length_bytes, header.block_size_symbols)?;
    // Every code is at least one bit, so each block must declare at least as
    // many bits as it has symbols. Checking this first also bounds the
    // output allocation by the container's own size.
    for (i, e) in parsed.offsets.entries.iter().enumerate() {
        let symbols = layout.block_range(i as u64).len() as u64;
        if (e.bit_length as u64) < symbols {
            return Err(Error::MalformedContainer(format!(
                "block {i} declares {} bits for {symbols} symbols",
                e.bit_length
            )));
        }
    }
    let setup = start.elapsed();

    let start = Instant::now();
    let len = usize::try_from(header.original_length_bytes)
        .map_err(|_| Error::MalformedContainer("original length exceeds address space".into()))?;
    let mut out = vec![0u8; len];
    let bs = header.block_size_symbols as usize;
    let region = parsed.region;
    let entries = &parsed.offsets.entries;
    run_with(config.worker_count, || {
        out.par_chunks_mut(bs)
            .zip(entries.par_iter())
            .try_for_each(|(slot, e)| {
                let block = BlockRef {
                    bit_length: e.bit_length,
                    payload: &region[e.payload_range()],
                };
                decode_block_into(block, &tree, slot)
            })
    })??;
    Ok((
        out,
        StageTimings {
            setup,
            parallel: start.elapsed(),
        },
    ))
}
