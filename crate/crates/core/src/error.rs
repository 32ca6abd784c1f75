use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot build a code tree from an empty histogram")]
    EmptyInput,
    #[error("malformed codebook: {0}")]
    MalformedCodebook(String),
    #[error("symbol 0x{0:02x} has no code in the table")]
    UnknownSymbol(u8),
    #[error("bitstream ended in the middle of a code ({consumed} of {declared} bits consumed)")]
    TruncatedStream { consumed: u64, declared: u64 },
    #[error("bit sequence at bit {0} does not match any code")]
    InvalidCode(u64),
    #[error("block payload of {0} bits does not fit a 32-bit length delimiter")]
    BlockTooLarge(u64),
    #[error("bad magic {0:02x?}, not a block-huffman container")]
    BadMagic([u8; 4]),
    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),
    #[error("malformed container: {0}")]
    MalformedContainer(String),
    #[error("decoded length mismatch: expected {expected} bytes, got {actual}")]
    OutputLengthMismatch { expected: u64, actual: u64 },
    #[error("round trip check failed: {0}")]
    RoundTrip(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Short machine-readable tag used in diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyInput => "empty_input",
            Error::MalformedCodebook(_) => "malformed_codebook",
            Error::UnknownSymbol(_) => "unknown_symbol",
            Error::TruncatedStream { .. } => "truncated_stream",
            Error::InvalidCode(_) => "invalid_code",
            Error::BlockTooLarge(_) => "block_too_large",
            Error::BadMagic(_) => "bad_magic",
            Error::UnsupportedVersion(_) => "unsupported_version",
            Error::MalformedContainer(_) => "malformed_container",
            Error::OutputLengthMismatch { .. } => "output_length_mismatch",
            Error::RoundTrip(_) => "round_trip",
            Error::InvalidConfig(_) => "invalid_config",
            Error::Io(_) => "io",
        }
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}
