use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use blockhuff::bench::{
    machine_metadata, median_throughput, overhead_fraction, sweep_overhead, sweep_throughput,
    write_csv, Experiment,
};
use blockhuff::block::{padded_payload_len, DELIMITER_BYTES};
use blockhuff::container::{parse_container, HEADER_LEN, MAGIC, VERSION};
use blockhuff::corpus::corpus_load;
use blockhuff::parallel::{decode_stream, default_workers, encode_stream, ParallelConfig};

use crate::exit;
use crate::report::{Report, StatsFormat};
use crate::{BenchArgs, Cli, CodecArgs, Command, ExperimentArg};

pub enum CliError {
    Usage(String),
    Io(PathBuf, io::Error),
    Codec(blockhuff::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io(..) => "io",
            CliError::Codec(e) => e.kind(),
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Io(p, e) => format!("{}: {e}", p.display()),
            CliError::Codec(e) => e.to_string(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Io(..) => exit::IO,
            CliError::Codec(blockhuff::Error::Io(_)) => exit::IO,
            CliError::Codec(blockhuff::Error::InvalidConfig(_)) => exit::USAGE,
            CliError::Codec(_) => exit::FORMAT,
        }
    }
}

impl From<blockhuff::Error> for CliError {
    fn from(e: blockhuff::Error) -> Self {
        CliError::Codec(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// One line on stderr per failure.
pub fn diagnose(kind: &str, message: &str) {
    let message = message.replace('\n', " ");
    eprintln!("blockhuff: error kind={kind} message={message:?}");
}

pub fn run(cli: Cli) -> CliResult<()> {
    let format = cli.stats_format;
    match cli.command {
        Command::Compress(args) => compress(&args, format),
        Command::Decompress(args) => decompress(&args, format),
        Command::Inspect { input, blocks } => inspect(&input, blocks, format),
        Command::Bench(args) => bench(&args),
    }
}

fn is_stdio(p: &Path) -> bool {
    p.as_os_str() == "-"
}

fn read_input(path: &Path) -> CliResult<Vec<u8>> {
    if is_stdio(path) {
        let mut buf = Vec::new();
        io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| CliError::Io(path.into(), e))?;
        Ok(buf)
    } else {
        fs::read(path).map_err(|e| CliError::Io(path.into(), e))
    }
}

fn write_output(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let res = if is_stdio(path) {
        let mut out = io::stdout().lock();
        out.write_all(bytes).and_then(|_| out.flush())
    } else {
        fs::write(path, bytes)
    };
    res.map_err(|e| CliError::Io(path.into(), e))
}

/// Stats go to stdout unless the payload does.
fn emit_report(report: &Report, format: StatsFormat, payload_on_stdout: bool) {
    let res = if payload_on_stdout {
        report.write(format, &mut io::stderr().lock())
    } else {
        report.write(format, &mut io::stdout().lock())
    };
    let _ = res;
}

fn config(args: &CodecArgs) -> CliResult<ParallelConfig> {
    let workers = match args.workers {
        Some(w) => {
            usize::try_from(w).map_err(|_| CliError::Usage(format!("too many workers: {w}")))?
        }
        None => default_workers(),
    };
    Ok(ParallelConfig::new(workers, args.block_size)?)
}

fn mbps(bytes: u64, secs: f64) -> String {
    if secs > 0.0 {
        format!("{:.2}", bytes as f64 / secs / 1e6)
    } else {
        "inf".into()
    }
}

fn compress(args: &CodecArgs, format: StatsFormat) -> CliResult<()> {
    let output = match &args.output {
        Some(p) => p.clone(),
        None if is_stdio(&args.input) => PathBuf::from("-"),
        None => {
            let mut s = args.input.clone().into_os_string();
            s.push(".hbk");
            PathBuf::from(s)
        }
    };
    let config = config(args)?;
    let data = read_input(&args.input)?;
    let start = Instant::now();
    let container = encode_stream(&data, &config)?;
    let bytes = container.to_bytes();
    let secs = start.elapsed().as_secs_f64();
    write_output(&output, &bytes)?;

    let payload_bits = container.offsets.total_bits();
    let overhead_bits = container.region.len() as u64 * 8 - payload_bits;
    let pad_bytes: u64 = container
        .blocks()
        .map(|b| (b.payload.len() - (b.bit_length as usize).div_ceil(8)) as u64)
        .sum();
    let mut r = Report::new();
    r.add("input_bytes", data.len())
        .add("output_bytes", bytes.len())
        .add(
            "ratio",
            if data.is_empty() {
                "n/a".to_string()
            } else {
                format!("{:.4}", data.len() as f64 / bytes.len() as f64)
            },
        )
        .add("block_size", config.block_size_symbols)
        .add("block_count", container.header.block_count)
        .add("workers", config.worker_count)
        .add("payload_bits", payload_bits)
        .add("overhead_bits", overhead_bits)
        .add(
            "overhead_bytes",
            container.header.block_count as u64 * DELIMITER_BYTES as u64 + pad_bytes,
        )
        .add("wall_seconds", format!("{secs:.6}"))
        .add("throughput_mbps", mbps(data.len() as u64, secs));
    emit_report(&r, format, is_stdio(&output));
    Ok(())
}

fn decompress(args: &CodecArgs, format: StatsFormat) -> CliResult<()> {
    let output = match &args.output {
        Some(p) => p.clone(),
        None if is_stdio(&args.input) => PathBuf::from("-"),
        None => match args.input.extension() {
            Some(ext) if ext == "hbk" => args.input.with_extension(""),
            _ => {
                let mut s = args.input.clone().into_os_string();
                s.push(".out");
                PathBuf::from(s)
            }
        },
    };
    let config = config(args)?;
    let bytes = read_input(&args.input)?;
    let start = Instant::now();
    let data = decode_stream(&bytes, &config)?;
    let secs = start.elapsed().as_secs_f64();
    write_output(&output, &data)?;

    let mut r = Report::new();
    r.add("input_bytes", bytes.len())
        .add("output_bytes", data.len())
        .add("workers", config.worker_count)
        .add("wall_seconds", format!("{secs:.6}"))
        .add("throughput_mbps", mbps(data.len() as u64, secs));
    emit_report(&r, format, is_stdio(&output));
    Ok(())
}

fn inspect(input: &Path, list_blocks: bool, format: StatsFormat) -> CliResult<()> {
    let bytes = read_input(input)?;
    let parsed = parse_container(&bytes)?;
    let h = &parsed.header;
    let mut bits: Vec<u32> = parsed
        .offsets
        .entries
        .iter()
        .map(|e| e.bit_length)
        .collect();
    let payload_bits: u64 = bits.iter().map(|&b| b as u64).sum();
    let overhead_bits = parsed.region.len() as u64 * 8 - payload_bits;
    let overhead_bytes: u64 =
        parsed.region.len() as u64 - bits.iter().map(|&b| (b as u64).div_ceil(8)).sum::<u64>();
    debug_assert_eq!(
        parsed.region.len(),
        bits.iter()
            .map(|&b| DELIMITER_BYTES + padded_payload_len(b as u64))
            .sum::<usize>()
    );
    let lengths: Vec<u8> = h.codebook.iter().copied().filter(|&l| l > 0).collect();

    let mut r = Report::new();
    r.add("magic", String::from_utf8_lossy(&MAGIC))
        .add("version", VERSION)
        .add("header_bytes", HEADER_LEN)
        .add("container_bytes", bytes.len())
        .add("block_size", h.block_size_symbols)
        .add("original_bytes", h.original_length_bytes)
        .add("block_count", h.block_count);
    if list_blocks {
        let list: Vec<String> = bits.iter().map(u32::to_string).collect();
        r.add("block_bits", list.join(","));
    }
    bits.sort_unstable();
    let stat = |v: Option<&u32>| v.map_or("n/a".to_string(), u32::to_string);
    r.add("block_bits_min", stat(bits.first()))
        .add(
            "block_bits_median",
            stat(bits.get(bits.len().saturating_sub(1) / 2)),
        )
        .add("block_bits_max", stat(bits.last()))
        .add("payload_bits", payload_bits)
        .add("overhead_bits", overhead_bits)
        .add("overhead_bytes", overhead_bytes)
        .add(
            "overhead_fraction",
            format!("{:.6}", overhead_fraction(bytes.len() as u64, payload_bits)),
        )
        .add("distinct_symbols", lengths.len())
        .add(
            "min_code_len",
            lengths.iter().min().map_or("n/a".into(), u8::to_string),
        )
        .add(
            "max_code_len",
            lengths.iter().max().map_or("n/a".into(), u8::to_string),
        );
    emit_report(&r, format, false);
    Ok(())
}

fn bench(args: &BenchArgs) -> CliResult<()> {
    let corpus = corpus_load(&args.corpus, args.corpus_size, args.seed)?;
    let name = Path::new(&args.corpus)
        .file_name()
        .map_or(args.corpus.clone(), |n| n.to_string_lossy().into_owned());
    let workers_list = args.workers_list.clone().unwrap_or_else(|| {
        let max = default_workers();
        let mut v: Vec<usize> = std::iter::successors(Some(1usize), |w| Some(w * 2))
            .take_while(|&w| w < max)
            .collect();
        v.push(max);
        v
    });
    if workers_list.contains(&0) {
        return Err(CliError::Usage("worker counts must be at least 1".into()));
    }

    let mut comments = machine_metadata();
    comments.push(format!(
        "# corpus={} bytes={} seed={}",
        name,
        corpus.len(),
        args.seed
    ));
    let mut summary = Vec::new();
    let rows = match args.experiment {
        ExperimentArg::Overhead => {
            let workers = *workers_list.iter().max().unwrap();
            let ladder: Vec<u32> = (4..=20).step_by(2).map(|p| 1u32 << p).collect();
            let sizes = args.block_sizes.clone().unwrap_or(ladder);
            sweep_overhead(&corpus, &name, &sizes, workers)?
        }
        ExperimentArg::Encode | ExperimentArg::Decode => {
            let mode = if args.experiment == ExperimentArg::Encode {
                Experiment::Encode
            } else {
                Experiment::Decode
            };
            let block_size = args
                .block_sizes
                .as_ref()
                .and_then(|v| v.last().copied())
                .unwrap_or(blockhuff::parallel::DEFAULT_BLOCK_SIZE);
            let rows =
                sweep_throughput(&corpus, &name, &workers_list, mode, args.trials, block_size)?;
            let base = median_throughput(&rows, workers_list[0]);
            for &w in &workers_list {
                if let Some(m) = median_throughput(&rows, w) {
                    let speedup = base.map_or(f64::NAN, |b| m / b);
                    summary.push(format!(
                        "# median workers={w} throughput_bps={m:.1} speedup_vs_{}={speedup:.3}",
                        workers_list[0]
                    ));
                }
            }
            rows
        }
    };

    let mut csv = Vec::new();
    write_csv(&mut csv, &comments, &rows)?;
    for line in &summary {
        csv.extend_from_slice(line.as_bytes());
        csv.push(b'\n');
    }
    write_output(args.output.as_deref().unwrap_or(Path::new("-")), &csv)
}
