//! `blockhuff`: compress, decompress, inspect and benchmark block-Huffman
//! containers.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::report::StatsFormat;

#[derive(Parser, Debug)]
#[command(
    name = "blockhuff",
    version,
    about = "Block-parallel Huffman compressor"
)]
struct Cli {
    /// Stats output style.
    #[arg(long, global = true, value_enum, default_value = "human")]
    stats_format: StatsFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compress a file ("-" for stdin) into a container.
    Compress(CodecArgs),
    /// Restore the original bytes from a container.
    Decompress(CodecArgs),
    /// Print header fields and block statistics of a container.
    Inspect {
        input: PathBuf,
        /// List every block's delimiter value.
        #[arg(long)]
        blocks: bool,
    },
    /// Run the overhead or throughput experiments and emit CSV.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct CodecArgs {
    input: PathBuf,
    /// Output path; "-" writes to stdout. Defaults to INPUT.hbk on compress
    /// and INPUT without .hbk on decompress.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Symbols per block.
    #[arg(long, default_value_t = blockhuff::parallel::DEFAULT_BLOCK_SIZE,
          value_parser = clap::value_parser!(u32).range(1..=(1 << 24)))]
    block_size: u32,
    /// Worker threads; defaults to the available hardware parallelism.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum ExperimentArg {
    Overhead,
    Encode,
    Decode,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_enum)]
    experiment: ExperimentArg,
    /// File path or generator: uniform-random, zipf-text, repeated-byte.
    #[arg(long, default_value = "zipf-text")]
    corpus: String,
    /// Generated corpus length in bytes.
    #[arg(long, default_value_t = 16 << 20)]
    corpus_size: usize,
    /// Comma-separated block sizes. The overhead sweep defaults to a
    /// doubling ladder from 16 to 2^20; throughput runs use the last entry,
    /// 65536 by default.
    #[arg(long, value_delimiter = ',')]
    block_sizes: Option<Vec<u32>>,
    /// Comma-separated worker counts; defaults to powers of two up to the
    /// hardware parallelism.
    #[arg(long, value_delimiter = ',')]
    workers_list: Option<Vec<usize>>,
    #[arg(long, default_value_t = 5)]
    trials: u32,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write CSV here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Process exit codes.
pub mod exit {
    pub const USAGE: u8 = 1;
    pub const IO: u8 = 2;
    pub const FORMAT: u8 = 3;
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            let msg = first.trim_start_matches("error: ");
            commands::diagnose("usage", msg);
            return ExitCode::from(exit::USAGE);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            commands::diagnose(e.kind(), &e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
